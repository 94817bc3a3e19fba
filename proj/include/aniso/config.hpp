#pragma once

#include "aniso/adapt.hpp"
#include "aniso/functions.hpp"

#include <map>
#include <string>

namespace aniso {

// Flat INI experiment description. Sections and keys (defaults in brackets):
//   [domain]   d [1], T [1], time_cells [1], cells [1], lower [0], upper [1], mesh [none: Kuhn box]
//   [params]   s1 [1], s2 [1]
//   [orders]   r1 [2], r2 [2]
//   [norms]    p [2], q [2], rho [min(p, q, 2)]          p and q accept "inf"
//   [function] name [smooth-sine]; every other key is a function parameter
//   [mark]     mode [whitney], degree [-1], scales [4]
//   [adapt]    delta [1e-3], factor [0.5], count [1], uniform_levels [0], besov_error [false], alpha_scale [0.5]
//   [budget]   max_rounds [100], max_leaves [200000], max_level [40]
//   [refine]   policy [corner], rounds [10], fraction [0.1]
//   [besov]    scales [4], ladder [0], alpha_scale [0.5]
//   [run]      seed [1], threads [0]
// Unknown sections or keys are errors so that typos do not silently fall back to defaults.
struct ExperimentConfig {
    int d = 1;
    double T = 1.0;
    int time_cells = 1;
    int cells = 1;
    double lower = 0.0, upper = 1.0;
    std::string mesh_file;

    AnisotropyParams params;
    PolyOrders orders;
    NormParams norms;

    std::string function = "smooth-sine";
    std::map<std::string, double> function_params;

    MarkMode mode = MarkMode::Whitney;
    int degree = -1;
    int mark_scales = 4;

    double delta = 1e-3;
    double factor = 0.5;
    int count = 1;
    int uniform_levels = 0;
    bool besov_error = false;
    double alpha_scale = 0.5;

    RefineBudget budget;

    bool scripted = false;  // a [refine] section is present: adapt runs the scripted policy
    MarkPolicy policy = MarkPolicy::CornerChasing;
    int rounds = 10;
    double fraction = 0.1;

    int besov_scales = 4;
    int ladder = 0;
    double besov_alpha_scale = 0.5;

    std::uint64_t seed = 1;
    int threads = 0;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    // Re-checks every constraint of the operations the config feeds; throws std::invalid_argument.
    void validate() const;

    Partition initial_partition() const;
    TestFunction test_function() const;
    AdaptOptions adapt_options(const TestFunction& f) const;
    PolicyOptions policy_options() const;
};

double parse_exponent(const std::string& text);

}  // namespace aniso
