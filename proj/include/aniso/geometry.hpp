#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace aniso {

using Id = std::int64_t;
inline constexpr Id kNoId = -1;
inline constexpr int kMaxDim = 3;

// Coordinates beyond the spatial dimension are kept at zero so points compare exactly.
using Point = std::array<double, kMaxDim>;

struct AnisotropyParams {
    double s1 = 1.0;
    double s2 = 1.0;
    int d = 1;

    void check() const;
    // 1 / (1/s1 + d/s2)
    double rate_exponent() const;
    // s2 / (s1 d)
    double level_ratio() const;
    // ceil(level * s2/(s1 d)), the interval level reached after `level` atomic splits
    int interval_level(int level) const;
    // temporal bisections performed when a simplex of level n-1 is split
    int temporal_splits(int n) const;
};

// Half-open [lo, hi) unless right_closed, in which case [lo, hi].
struct TimeInterval {
    double lo = 0.0;
    double hi = 1.0;
    bool right_closed = true;
    int level = 0;
    Id id = kNoId;
    std::optional<Id> parent;

    double length() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && (t < hi || (right_closed && t == hi)); }
    bool closure_contains(double t) const { return t >= lo && t <= hi; }
};

std::pair<TimeInterval, TimeInterval> bisect_interval(const TimeInterval& ivl);

// Vertices x0..xd; the refinement edge is x0 x_tag.
struct TaggedSimplex {
    int dim = 1;
    std::array<Point, kMaxDim + 1> vertices{};
    int tag = 1;
    int level = 0;
    Id id = kNoId;
    std::optional<Id> parent;

    int vertex_count() const { return dim + 1; }
    std::pair<int, int> refinement_edge() const { return {0, tag}; }
};

// Throws std::invalid_argument for a degenerate simplex or an out-of-range tag.
TaggedSimplex make_simplex(int dim, const std::vector<Point>& vertices, int tag);

std::pair<TaggedSimplex, TaggedSimplex> bisect_simplex(const TaggedSimplex& s);

Point midpoint(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

double simplex_measure(const TaggedSimplex& s);
double simplex_diameter(const TaggedSimplex& s);
double simplex_inradius(const TaggedSimplex& s);
// kappa_S = diam(S) / inradius(S)
double simplex_shape(const TaggedSimplex& s);
// Lebesgue measure of the (dim-1)-face opposite to vertex i; 1 for dim = 1.
double facet_measure(const TaggedSimplex& s, int i);
// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

struct Prism {
    Id id = kNoId;
    Id interval = kNoId;
    Id simplex = kNoId;
    int level = 0;
};

double prism_measure(const TimeInterval& ivl, const TaggedSimplex& s);
double prism_diameter(const TimeInterval& ivl, const TaggedSimplex& s);

// Extremal root sizes and the shape bound of the simplex forest.
struct RootSizes {
    double mu1 = 0.0;  // max root interval length
    double mu2 = 0.0;  // min root interval length
    double mu3 = 0.0;  // max root simplex measure
    double mu4 = 0.0;  // min root simplex measure
    double kappa = 0.0;
};

struct SizeBracket {
    double lower = 0.0;
    double upper = 0.0;
    double diameter = 0.0;
};

// c 2^{-max(s2/s1,1) l/d} <= diam(I x S) <= C 2^{-min(s2/s1,1) l/d} for a prism of level l
// generated from the roots by atomic splits. Throws std::logic_error if diam falls outside.
SizeBracket level_size_bounds(const TimeInterval& ivl, const TaggedSimplex& s, int level,
                              const RootSizes& roots, const AnisotropyParams& params);

// Constant C of the upper bracket above.
double upper_diameter_constant(const RootSizes& roots, int d);

// Exact orientation sign of (b-a, c-a) in the plane, valid when the products are exact.
int orient2d(const Point& a, const Point& b, const Point& c);

}  // namespace aniso
