#include "aniso/functions.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aniso {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_keys(const std::string& name, const std::map<std::string, double>& params,
                const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : params)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument(fmt::format("function '{}' has no parameter '{}'", name, key));
}

// |gamma (gamma - 1) ... (gamma - r + 1)|
double falling_factorial(double gamma, int r) {
    double c = 1.0;
    for (int k = 0; k < r; ++k) c *= std::abs(gamma - k);
    return c;
}

// ||t^gamma||_{L_q([a, b])}, 0 < a < b.
double power_norm(double gamma, double a, double b, double q) {
    if (std::isinf(q)) return std::max(std::pow(a, gamma), std::pow(b, gamma));
    const double e = gamma * q + 1.0;
    const double integral = std::abs(e) < 1e-12 ? std::log(b / a) : (std::pow(b, e) - std::pow(a, e)) / e;
    return std::pow(integral, 1.0 / q);
}

double root(double measure, double q) { return std::isinf(q) ? 1.0 : std::pow(measure, 1.0 / q); }

double point_segment_distance(const Point& x, const Point& a, const Point& b, int d) {
    double ab2 = 0.0, dot = 0.0;
    for (int k = 0; k < d; ++k) {
        ab2 += (b[k] - a[k]) * (b[k] - a[k]);
        dot += (x[k] - a[k]) * (b[k] - a[k]);
    }
    const double s = ab2 > 0.0 ? std::clamp(dot / ab2, 0.0, 1.0) : 0.0;
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) r2 += std::pow(x[k] - a[k] - s * (b[k] - a[k]), 2);
    return std::sqrt(r2);
}

// Distance from x to the union of the simplices and the diameter of the union.
std::pair<double, double> distance_and_diameter(const Cylinder& c, const Point& x) {
    double dist = kInf, diam = 0.0;
    std::vector<Point> verts;
    for (const auto& s : c.simplices) {
        if (simplex_contains_point(s, x)) dist = 0.0;
        for (int i = 0; i <= c.dim; ++i) {
            verts.push_back(s.vertices[i]);
            for (int j = i + 1; j <= c.dim; ++j)
                dist = std::min(dist, point_segment_distance(x, s.vertices[i], s.vertices[j], c.dim));
        }
    }
    for (const Point& a : verts)
        for (const Point& b : verts) diam = std::max(diam, point_segment_distance(a, b, b, c.dim));
    return {dist, diam};
}

TestFunction smooth_sine(const std::map<std::string, double>& params) {
    check_keys("smooth-sine", params, {"freq"});
    const double w = param(params, "freq", 2.0);
    return {"smooth-sine",
            [w](double t, const Point& x) { return std::sin(w * t + 0.3) * std::sin(w * x[0] + 0.5 * w * x[1] + 0.2); },
            {}};
}

// t^beta: only the temporal modulus is non-zero. Near t = 0 the seminorm scales like
// b^{beta - s1 + 1/q}; away from it the Taylor bound |J|^{r1 - s1} ||f^{(r1)}||_{L_q(J)} is sharper.
TestFunction tsingular(const std::map<std::string, double>& params, const SeminormContext& ctx) {
    check_keys("tsingular", params, {"beta"});
    const double beta = param(params, "beta", 0.75);
    if (beta <= 0.0) throw std::invalid_argument("tsingular needs beta > 0");
    const int r1 = ctx.orders.r1;
    const double c = falling_factorial(beta, r1);
    const double s1 = ctx.s1, q = ctx.q;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    OracleSeminorm oracle = [=](const Cylinder& cyl) {
        if (c == 0.0) return 0.0;  // beta is an integer below r1
        const double a = std::max(cyl.lo, 0.0), b = cyl.hi;
        double value = c * std::pow(b, beta - s1 + inv_q);
        if (a > 1e-14 * b) value = std::min(value, std::pow(b - a, r1 - s1) * c * power_norm(beta - r1, a, b, q));
        return value * root(cyl.space_measure(), q);
    };
    return {"tsingular", [beta](double t, const Point&) { return std::pow(std::max(t, 0.0), beta); }, oracle};
}

// |x - c|^alpha: the spatial analogue of tsingular with diam(R) in place of |J|.
TestFunction xcorner(const std::map<std::string, double>& params, const SeminormContext& ctx) {
    check_keys("xcorner", params, {"alpha", "cx", "cy"});
    const double alpha = param(params, "alpha", 0.6);
    if (alpha <= 0.0) throw std::invalid_argument("xcorner needs alpha > 0");
    const Point corner{param(params, "cx", 0.0), param(params, "cy", 0.0), 0.0};
    const int d = ctx.d, r2 = ctx.orders.r2;
    const double s2 = ctx.s2, q = ctx.q;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    double c = 1.0;
    for (int k = 0; k < r2; ++k) c *= std::max(std::abs(alpha - k), 1.0);
    OracleSeminorm oracle = [=](const Cylinder& cyl) {
        const auto [dist, diam] = distance_and_diameter(cyl, corner);
        double value = c * std::pow(diam, alpha - s2 + d * inv_q);
        if (dist > 1e-14 * diam)
            value = std::min(value, std::pow(diam, r2 - s2) * c * std::pow(dist, alpha - r2) * root(cyl.space_measure(), q));
        return value * root(cyl.hi - cyl.lo, q);
    };
    const auto f = [alpha, corner, d](double, const Point& x) {
        double r2sum = 0.0;
        for (int k = 0; k < d; ++k) r2sum += (x[k] - corner[k]) * (x[k] - corner[k]);
        return std::pow(r2sum, 0.5 * alpha);
    };
    return {"xcorner", f, oracle};
}

TestFunction tkink(const std::map<std::string, double>& params) {
    check_keys("tkink", params, {"c"});
    const double c = param(params, "c", 0.5);
    return {"tkink", [c](double t, const Point&) { return std::abs(t - c); }, {}};
}

// In Pi^{2,2}: the oracle seminorm vanishes.
TestFunction poly(const std::map<std::string, double>& params) {
    check_keys("poly", params, {});
    return {"poly", [](double t, const Point& x) { return 1.0 + 2.0 * t - x[0] + 0.5 * x[1] - 3.0 * t * x[0]; },
            [](const Cylinder&) { return 0.0; }};
}

}  // namespace

TestFunction make_function(const std::string& name, const std::map<std::string, double>& params,
                           const SeminormContext& ctx) {
    if (name == "smooth-sine") return smooth_sine(params);
    if (name == "tsingular") return tsingular(params, ctx);
    if (name == "xcorner") return xcorner(params, ctx);
    if (name == "tkink") return tkink(params);
    if (name == "poly") return poly(params);
    throw std::invalid_argument(fmt::format("unknown function '{}'", name));
}

std::vector<std::string> function_names() { return {"smooth-sine", "tsingular", "xcorner", "tkink", "poly"}; }

}  // namespace aniso
