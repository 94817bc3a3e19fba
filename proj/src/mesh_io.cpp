#include "aniso/mesh_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aniso {

void write_vtk(std::ostream& out, const Partition& p, const std::map<Id, double>* indicator) {
    const std::vector<Id> leaves = p.leaves();
    const int d = p.dim();
    const int corners = d == 1 ? 4 : 6;
    out << "# vtk DataFile Version 3.0\n";
    out << fmt::format("aniso space-time partition d={}\n", d);
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << fmt::format("POINTS {} double\n", leaves.size() * corners);
    for (Id leaf : leaves) {
        const auto& ivl = p.interval_of(leaf);
        const auto& s = p.simplex_of(leaf);
        if (d == 1) {
            const double a = std::min(s.vertices[0][0], s.vertices[1][0]);
            const double b = std::max(s.vertices[0][0], s.vertices[1][0]);
            out << fmt::format("{:.17g} {:.17g} 0\n{:.17g} {:.17g} 0\n", a, ivl.lo, b, ivl.lo);
            out << fmt::format("{:.17g} {:.17g} 0\n{:.17g} {:.17g} 0\n", b, ivl.hi, a, ivl.hi);
        } else {
            // the base triangle must wind clockwise seen from the top face
            int order[3] = {0, 1, 2};
            if (orient2d(s.vertices[0], s.vertices[1], s.vertices[2]) > 0) std::swap(order[1], order[2]);
            for (double t : {ivl.lo, ivl.hi})
                for (int i : order) out << fmt::format("{:.17g} {:.17g} {:.17g}\n", s.vertices[i][0], s.vertices[i][1], t);
        }
    }
    out << fmt::format("CELLS {} {}\n", leaves.size(), leaves.size() * (corners + 1));
    for (std::size_t c = 0; c < leaves.size(); ++c) {
        out << corners;
        for (int k = 0; k < corners; ++k) out << ' ' << c * corners + k;
        out << '\n';
    }
    out << fmt::format("CELL_TYPES {}\n", leaves.size());
    for (std::size_t c = 0; c < leaves.size(); ++c) out << (d == 1 ? 9 : 13) << '\n';
    out << fmt::format("CELL_DATA {}\n", leaves.size());
    out << "SCALARS level int 1\nLOOKUP_TABLE default\n";
    for (Id leaf : leaves) out << p.prism(leaf).level << '\n';
    if (indicator) {
        out << "SCALARS indicator double 1\nLOOKUP_TABLE default\n";
        for (Id leaf : leaves) {
            auto it = indicator->find(leaf);
            out << fmt::format("{:.17g}\n", it == indicator->end() ? 0.0 : it->second);
        }
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace aniso
