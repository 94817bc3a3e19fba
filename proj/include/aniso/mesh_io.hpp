#pragma once

#include "aniso/mesh.hpp"

#include <map>
#include <ostream>
#include <string>

namespace aniso {

// Legacy ASCII VTK unstructured grid: quads (x, t) for d = 1, wedges (x, y, t) for d = 2.
// Cell data `level` always; `indicator` when given (keyed by leaf id, missing leaves get 0).
void write_vtk(std::ostream& out, const Partition& p, const std::map<Id, double>* indicator = nullptr);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace aniso
