#pragma once

#include "aniso/besov.hpp"

#include <map>
#include <string>
#include <vector>

namespace aniso {

// Smoothness context of an analytic seminorm: |.|_{B^{s1,s2}_{q,q}} with difference orders (r1, r2).
struct SeminormContext {
    int d = 1;
    double s1 = 1.0, s2 = 1.0, q = 2.0;
    PolyOrders orders;
};

struct TestFunction {
    std::string name;
    SpaceTimeFn f;
    OracleSeminorm oracle;  // empty when no analytic local seminorm is known
};

// Names: smooth-sine (freq), tsingular (beta), xcorner (alpha, cx, cy), tkink (c), poly.
// Unknown names and unknown parameter keys throw std::invalid_argument.
TestFunction make_function(const std::string& name, const std::map<std::string, double>& params,
                           const SeminormContext& ctx);

std::vector<std::string> function_names();

}  // namespace aniso
