#include "aniso/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aniso {

namespace {

constexpr double kCeilSlack = 1e-9;

int ceil_with_slack(double x) { return static_cast<int>(std::ceil(x - kCeilSlack)); }

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Eigen::MatrixXd edge_matrix(const TaggedSimplex& s, int skip) {
    // columns are x_i - x_base over all vertices except `skip` and the base vertex
    const int d = s.dim;
    const int base = skip == 0 ? 1 : 0;
    Eigen::MatrixXd e(d, d - (skip >= 0 ? 1 : 0));
    int col = 0;
    for (int i = 0; i <= d; ++i) {
        if (i == base || i == skip) continue;
        for (int k = 0; k < d; ++k) e(k, col) = s.vertices[i][k] - s.vertices[base][k];
        ++col;
    }
    return e;
}

}  // namespace

void AnisotropyParams::check() const {
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("anisotropy parameters must be positive");
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("spatial dimension out of range");
}

double AnisotropyParams::rate_exponent() const { return 1.0 / (1.0 / s1 + d / s2); }

double AnisotropyParams::level_ratio() const { return s2 / (s1 * d); }

int AnisotropyParams::interval_level(int level) const {
    return level <= 0 ? 0 : ceil_with_slack(level * level_ratio());
}

int AnisotropyParams::temporal_splits(int n) const { return interval_level(n) - interval_level(n - 1); }

std::pair<TimeInterval, TimeInterval> bisect_interval(const TimeInterval& ivl) {
    const double mid = 0.5 * (ivl.lo + ivl.hi);
    if (!(ivl.lo < mid && mid < ivl.hi)) throw std::invalid_argument("interval too short to bisect");
    TimeInterval left{ivl.lo, mid, false, ivl.level + 1, kNoId, ivl.id};
    TimeInterval right{mid, ivl.hi, ivl.right_closed, ivl.level + 1, kNoId, ivl.id};
    if (ivl.id == kNoId) left.parent = right.parent = std::nullopt;
    return {left, right};
}

TaggedSimplex make_simplex(int dim, const std::vector<Point>& vertices, int tag) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("simplex dimension out of range");
    if (static_cast<int>(vertices.size()) != dim + 1) throw std::invalid_argument("simplex needs d+1 vertices");
    if (tag < 1 || tag > dim) throw std::invalid_argument("simplex tag out of range");
    TaggedSimplex s;
    s.dim = dim;
    s.tag = tag;
    for (int i = 0; i <= dim; ++i) {
        s.vertices[i] = vertices[i];
        for (int k = dim; k < kMaxDim; ++k) s.vertices[i][k] = 0.0;
    }
    if (!(simplex_measure(s) > 0.0)) throw std::invalid_argument("degenerate simplex");
    return s;
}

Point midpoint(const Point& a, const Point& b) {
    Point m{};
    for (int k = 0; k < kMaxDim; ++k) m[k] = 0.5 * (a[k] + b[k]);
    return m;
}

double distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (int k = 0; k < kMaxDim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

std::pair<TaggedSimplex, TaggedSimplex> bisect_simplex(const TaggedSimplex& s) {
    if (!(simplex_measure(s) > 0.0)) throw std::invalid_argument("degenerate simplex");
    const int d = s.dim;
    const int k = s.tag;
    const Point z = midpoint(s.vertices[0], s.vertices[k]);
    const int child_tag = k > 1 ? k - 1 : d;

    TaggedSimplex a = s;
    TaggedSimplex b = s;
    // a = (x0..x_{k-1}, z, x_{k+1}..x_d), b = (x1..x_k, z, x_{k+1}..x_d)
    a.vertices[k] = z;
    for (int i = 0; i < k; ++i) b.vertices[i] = s.vertices[i + 1];
    b.vertices[k] = z;
    for (TaggedSimplex* c : {&a, &b}) {
        c->tag = child_tag;
        c->level = s.level + 1;
        c->id = kNoId;
        c->parent = s.id == kNoId ? std::nullopt : std::optional<Id>(s.id);
    }
    return {a, b};
}

double simplex_measure(const TaggedSimplex& s) {
    const Eigen::MatrixXd e = edge_matrix(s, -1);
    return std::abs(e.determinant()) / factorial(s.dim);
}

double simplex_diameter(const TaggedSimplex& s) {
    double best = 0.0;
    for (int i = 0; i <= s.dim; ++i)
        for (int j = i + 1; j <= s.dim; ++j) best = std::max(best, distance(s.vertices[i], s.vertices[j]));
    return best;
}

double facet_measure(const TaggedSimplex& s, int i) {
    if (s.dim == 1) return 1.0;
    const Eigen::MatrixXd e = edge_matrix(s, i);
    const double gram = (e.transpose() * e).determinant();
    return std::sqrt(std::max(gram, 0.0)) / factorial(s.dim - 1);
}

double simplex_inradius(const TaggedSimplex& s) {
    const double vol = simplex_measure(s);
    if (!(vol > 0.0)) throw std::invalid_argument("degenerate simplex");
    double facets = 0.0;
    for (int i = 0; i <= s.dim; ++i) facets += facet_measure(s, i);
    return s.dim * vol / facets;
}

double simplex_shape(const TaggedSimplex& s) { return simplex_diameter(s) / simplex_inradius(s); }

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double prism_measure(const TimeInterval& ivl, const TaggedSimplex& s) { return ivl.length() * simplex_measure(s); }

double prism_diameter(const TimeInterval& ivl, const TaggedSimplex& s) {
    const double a = ivl.length();
    const double b = simplex_diameter(s);
    return std::sqrt(a * a + b * b);
}

double upper_diameter_constant(const RootSizes& roots, int d) {
    const double spatial = roots.kappa * std::pow(roots.mu3 / unit_ball_volume(d), 1.0 / d);
    return std::sqrt(roots.mu1 * roots.mu1 + spatial * spatial);
}

SizeBracket level_size_bounds(const TimeInterval& ivl, const TaggedSimplex& s, int level,
                              const RootSizes& roots, const AnisotropyParams& params) {
    const int d = params.d;
    const double ratio = params.s2 / params.s1;
    // regular simplex of unit edge maximises volume at fixed diameter
    const double regular = std::sqrt(d + 1.0) / (factorial(d) * std::pow(2.0, 0.5 * d));
    const double c = std::max(0.5 * roots.mu2, std::pow(roots.mu4 / regular, 1.0 / d));
    const double big_c = upper_diameter_constant(roots, d);

    SizeBracket out;
    out.lower = c * std::exp2(-std::max(ratio, 1.0) * level / d);
    out.upper = big_c * std::exp2(-std::min(ratio, 1.0) * level / d);
    out.diameter = prism_diameter(ivl, s);
    const double slack = 1e-12 * out.diameter;
    if (out.diameter < out.lower - slack || out.diameter > out.upper + slack)
        throw std::logic_error("prism diameter outside the level bracket at level " + std::to_string(level));
    return out;
}

int orient2d(const Point& a, const Point& b, const Point& c) {
    const double v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return (v > 0.0) - (v < 0.0);
}

}  // namespace aniso
