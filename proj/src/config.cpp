#include "aniso/config.hpp"

#include "aniso/mesh_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aniso {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"domain", {"d", "T", "time_cells", "cells", "lower", "upper", "mesh"}},
    {"params", {"s1", "s2"}},
    {"orders", {"r1", "r2"}},
    {"norms", {"p", "q", "rho"}},
    {"mark", {"mode", "degree", "scales"}},
    {"adapt", {"delta", "factor", "count", "uniform_levels", "besov_error", "alpha_scale"}},
    {"budget", {"max_rounds", "max_leaves", "max_level"}},
    {"refine", {"policy", "rounds", "fraction"}},
    {"besov", {"scales", "ladder", "alpha_scale"}},
    {"run", {"seed", "threads"}},
};

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
    try {
        return tree.get<T>(pt::ptree::path_type(key, '/'), fallback);
    } catch (const pt::ptree_bad_data&) {
        throw std::invalid_argument(fmt::format("config key '{}' has a malformed value", key));
    }
}

}  // namespace

double parse_exponent(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw std::invalid_argument(fmt::format("'{}' is not an exponent", text));
    return v;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    for (const auto& [section, body] : tree) {
        if (section == "function") continue;
        const auto known = kKnownKeys.find(section);
        if (known == kKnownKeys.end()) throw std::invalid_argument(fmt::format("unknown config section [{}]", section));
        if (!body.data().empty()) throw std::invalid_argument(fmt::format("key '{}' outside a section", section));
        for (const auto& [key, value] : body)
            if (!known->second.count(key))
                throw std::invalid_argument(fmt::format("unknown config key '{}' in [{}]", key, section));
    }

    ExperimentConfig c;
    c.d = get(tree, "domain/d", c.d);
    c.T = get(tree, "domain/T", c.T);
    c.time_cells = get(tree, "domain/time_cells", c.time_cells);
    c.cells = get(tree, "domain/cells", c.cells);
    c.lower = get(tree, "domain/lower", c.lower);
    c.upper = get(tree, "domain/upper", c.upper);
    c.mesh_file = get<std::string>(tree, "domain/mesh", "");

    c.params = AnisotropyParams{get(tree, "params/s1", 1.0), get(tree, "params/s2", 1.0), c.d};
    c.orders = PolyOrders{get(tree, "orders/r1", 2), get(tree, "orders/r2", 2)};
    c.norms.p = parse_exponent(get<std::string>(tree, "norms/p", "2"));
    c.norms.q = parse_exponent(get<std::string>(tree, "norms/q", "2"));
    const std::string rho = get<std::string>(tree, "norms/rho", "");
    c.norms.rho = rho.empty() ? std::min({c.norms.p, c.norms.q, 2.0}) : parse_exponent(rho);

    if (const auto fn = tree.get_child_optional("function")) {
        for (const auto& [key, value] : *fn) {
            if (key == "name")
                c.function = value.data();
            else
                c.function_params[key] = parse_exponent(value.data());
        }
    }

    c.mode = parse_mark_mode(get<std::string>(tree, "mark/mode", "whitney"));
    c.degree = get(tree, "mark/degree", c.degree);
    c.mark_scales = get(tree, "mark/scales", c.mark_scales);

    c.delta = get(tree, "adapt/delta", c.delta);
    c.factor = get(tree, "adapt/factor", c.factor);
    c.count = get(tree, "adapt/count", c.count);
    c.uniform_levels = get(tree, "adapt/uniform_levels", c.uniform_levels);
    c.besov_error = get(tree, "adapt/besov_error", c.besov_error);
    c.alpha_scale = get(tree, "adapt/alpha_scale", c.alpha_scale);

    c.budget.max_rounds = get(tree, "budget/max_rounds", c.budget.max_rounds);
    c.budget.max_leaves = get(tree, "budget/max_leaves", c.budget.max_leaves);
    c.budget.max_level = get(tree, "budget/max_level", c.budget.max_level);

    c.scripted = tree.get_child_optional("refine").has_value();
    c.policy = parse_mark_policy(get<std::string>(tree, "refine/policy", "corner"));
    c.rounds = get(tree, "refine/rounds", c.rounds);
    c.fraction = get(tree, "refine/fraction", c.fraction);

    c.besov_scales = get(tree, "besov/scales", c.besov_scales);
    c.ladder = get(tree, "besov/ladder", c.ladder);
    c.besov_alpha_scale = get(tree, "besov/alpha_scale", c.besov_alpha_scale);

    c.seed = get<std::uint64_t>(tree, "run/seed", c.seed);
    c.threads = get(tree, "run/threads", c.threads);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse(read_text_file(path)); }

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(d == 1 || d == 2, "domain/d must be 1 or 2");
    require(T > 0.0, "domain/T must be positive");
    require(time_cells >= 1 && cells >= 1, "domain/time_cells and domain/cells must be at least 1");
    require(lower < upper, "domain/lower must be below domain/upper");
    require(params.s1 > 0.0 && params.s2 > 0.0, "params/s1 and params/s2 must be positive");
    require(orders.r1 >= 1 && orders.r2 >= 1, "orders/r1 and orders/r2 must be at least 1");
    norms.check();
    require(degree >= -1, "mark/degree must be -1 (default) or non-negative");
    require(mark_scales >= 0, "mark/scales must be non-negative");
    require(delta > 0.0, "adapt/delta must be positive");
    require(factor > 0.0 && factor < 1.0, "adapt/factor must lie in (0, 1)");
    require(count == 1 || count >= 6, "adapt/count is 1 (single run) or at least 6 (rate study)");
    require(uniform_levels >= 0, "adapt/uniform_levels must be non-negative");
    require(alpha_scale >= 0.0 && besov_alpha_scale >= 0.0, "alpha_scale must be non-negative");
    require(budget.max_rounds >= 1 && budget.max_leaves >= 1 && budget.max_level >= 1, "budget values must be positive");
    require(rounds >= 1, "refine/rounds must be at least 1");
    require(fraction > 0.0 && fraction <= 1.0, "refine/fraction must lie in (0, 1]");
    require(besov_scales >= 0 && ladder >= 0, "besov/scales and besov/ladder must be non-negative");
    require(threads >= 0, "run/threads must be non-negative");
    if (mode == MarkMode::Oracle)
        require(static_cast<bool>(test_function().oracle), fmt::format("function '{}' has no oracle seminorm", function));
    else
        test_function();
}

Partition ExperimentConfig::initial_partition() const {
    if (!mesh_file.empty()) {
        Partition p = Partition::from_text(read_text_file(mesh_file));
        if (p.dim() != d) throw std::invalid_argument("mesh file dimension differs from domain/d");
        return p;
    }
    std::vector<double> times;
    for (int i = 0; i <= time_cells; ++i) times.push_back(T * i / time_cells);
    const SpatialMesh mesh =
        kuhn_box_mesh(d, Point{lower, lower, lower}, Point{upper, upper, upper}, {cells, cells, cells});
    return Partition::tensor_initial(times, mesh, params);
}

TestFunction ExperimentConfig::test_function() const {
    return make_function(function, function_params, SeminormContext{d, params.s1, params.s2, norms.q, orders});
}

AdaptOptions ExperimentConfig::adapt_options(const TestFunction& f) const {
    AdaptOptions o;
    o.mark.mode = mode;
    o.mark.norms = norms;
    o.mark.orders = orders;
    o.mark.degree = degree;
    o.mark.scales = mark_scales;
    o.mark.oracle = f.oracle;
    o.budget = budget;
    o.besov_error = besov_error;
    o.alpha_scale = alpha_scale;
    return o;
}

PolicyOptions ExperimentConfig::policy_options() const { return PolicyOptions{policy, fraction, seed}; }

}  // namespace aniso
