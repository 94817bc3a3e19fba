#pragma once

#include "aniso/geometry.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace aniso {

// Initial spatial triangulation. Simplex vertex lists are given in Maubach order.
struct SpatialMesh {
    int dim = 1;
    std::vector<Point> vertices;
    std::vector<std::vector<int>> simplices;
    std::vector<int> tags;  // empty: every tag = dim
};

// Kuhn triangulation of a box with `cells[k]` cells along axis k; refinement edges are cube diagonals.
SpatialMesh kuhn_box_mesh(int dim, const Point& lower, const Point& upper, const std::array<int, kMaxDim>& cells);

struct IntervalNode {
    TimeInterval ivl;
    std::array<Id, 2> children{kNoId, kNoId};
};

struct SimplexNode {
    TaggedSimplex spx;
    std::array<Id, kMaxDim + 1> verts{};
    std::array<Id, 2> children{kNoId, kNoId};
    Id root = kNoId;
};

struct MeshStats {
    double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
    double kappa0 = 0.0;
    double a0 = 0.0;
    double kappa = 0.0;
    double a = 0.0;
};

// The space-time partition: interval and simplex refinement forests plus the set of leaf prisms.
// Spatial dimension is restricted to 1 or 2.
class Partition {
public:
    static Partition tensor_initial(const std::vector<double>& time_points, const SpatialMesh& mesh,
                                    const AnisotropyParams& params);

    int dim() const { return params_.d; }
    const AnisotropyParams& params() const { return params_; }
    double t_begin() const { return t0_; }
    double t_end() const { return t1_; }
    double domain_measure() const { return domain_measure_; }

    std::size_t leaf_count() const { return leaf_count_; }
    std::vector<Id> leaves() const;
    bool is_leaf(Id prism) const { return prism >= 0 && prism < static_cast<Id>(leaf_.size()) && leaf_[prism]; }
    std::size_t prism_capacity() const { return prisms_.size(); }
    const Prism& prism(Id id) const { return prisms_.at(id); }
    const std::vector<Id>& prism_children(Id id) const { return prism_children_.at(id); }

    std::size_t interval_count() const { return intervals_.size(); }
    std::size_t simplex_count() const { return simplices_.size(); }
    std::size_t vertex_count() const { return vertices_.size(); }
    const IntervalNode& interval_node(Id id) const { return intervals_.at(id); }
    const SimplexNode& simplex_node(Id id) const { return simplices_.at(id); }
    const TimeInterval& interval(Id id) const { return intervals_.at(id).ivl; }
    const TaggedSimplex& simplex(Id id) const { return simplices_.at(id).spx; }
    const TimeInterval& interval_of(Id prism) const { return interval(prisms_.at(prism).interval); }
    const TaggedSimplex& simplex_of(Id prism) const { return simplex(prisms_.at(prism).simplex); }
    const Point& vertex(Id id) const { return vertices_.at(id); }
    Id find_vertex(const Point& p) const;
    const std::vector<Id>& root_intervals() const { return root_intervals_; }
    const std::vector<Id>& root_simplices() const { return root_simplices_; }
    // vertex ids of the boundary facets of the root triangulation
    const std::vector<std::vector<Id>>& boundary_facets() const { return boundary_facets_; }

    // Leaves whose simplex is `simplex`.
    const std::vector<Id>& leaves_on_simplex(Id simplex) const { return leaves_on_simplex_.at(simplex); }
    // Simplices carrying at least one leaf and having `vertex` as a vertex.
    const std::vector<Id>& simplices_at_vertex(Id vertex) const { return used_at_vertex_.at(vertex); }
    // True if a is b or an ancestor of b in the simplex forest.
    bool simplex_contains(Id a, Id b) const;
    bool simplices_nested(Id a, Id b) const { return simplex_contains(a, b) || simplex_contains(b, a); }

    // Children are created on first request and cached, so repeated splits reuse ids.
    std::pair<Id, Id> split_interval(Id interval);
    std::pair<Id, Id> split_simplex(Id simplex);
    // Replaces a leaf by the given (interval, simplex) products; returns the new prism ids.
    std::vector<Id> replace_leaf(Id prism, const std::vector<std::pair<Id, Id>>& children);

    // Leaf containing (t, x); throws std::out_of_range if the point is outside the domain.
    Id locate(double t, const Point& x) const;
    std::vector<Id> active_triangulation(double t) const;

    std::vector<Id> neighbors_time(Id prism) const;
    std::vector<Id> neighbors_space(Id prism) const;
    // N_t united with N_x, ascending.
    std::vector<Id> necessary_neighbors(Id prism) const;

    MeshStats stats() const;
    RootSizes root_sizes() const;
    double anisotropy(Id prism) const;
    double leaf_measure_sum() const;
    int max_level() const;

    std::string to_text() const;
    static Partition from_text(const std::string& text);

private:
    Id add_vertex(const Point& p);
    Id add_interval(const TimeInterval& ivl);
    Id add_simplex(const TaggedSimplex& s, const std::array<Id, kMaxDim + 1>& verts, Id root);
    Id add_prism(Id interval, Id simplex);
    void attach_leaf(Id prism);
    void detach_leaf(Id prism);
    void finish_roots();
    void require_leaf(Id prism) const;

    AnisotropyParams params_;
    double t0_ = 0.0;
    double t1_ = 1.0;
    double domain_measure_ = 0.0;

    std::vector<IntervalNode> intervals_;
    std::vector<SimplexNode> simplices_;
    std::vector<Point> vertices_;
    std::map<Point, Id> vertex_ids_;
    std::vector<Prism> prisms_;
    std::vector<std::vector<Id>> prism_children_;
    std::vector<char> leaf_;
    std::size_t leaf_count_ = 0;

    std::vector<std::vector<Id>> leaves_on_simplex_;
    std::vector<std::vector<Id>> used_at_vertex_;

    std::vector<Id> root_intervals_;
    std::vector<Id> root_simplices_;
    std::vector<std::vector<Id>> boundary_facets_;
};

// Point-in-closed-simplex test; exact for d <= 2 on dyadic coordinates.
bool simplex_contains_point(const TaggedSimplex& s, const Point& x);
// Closed simplices intersect; exact for d <= 2 on dyadic coordinates.
bool closed_simplices_intersect(const TaggedSimplex& a, const TaggedSimplex& b);
// Vertices of the closed intersection polygon (or segment) of two simplices, deduplicated.
std::vector<Point> simplex_intersection(const TaggedSimplex& a, const TaggedSimplex& b);
// Affine dimension of a point set (-1 for empty).
int affine_dimension(const std::vector<Point>& pts, int d);
// Euclidean distance between two closed simplices (d <= 2).
double simplex_distance(const TaggedSimplex& a, const TaggedSimplex& b);

// Snapshot index answering "which leaves have closures meeting this closed region".
class TouchIndex {
public:
    explicit TouchIndex(const Partition& p);

    // Leaves whose closure meets the closure of the leaf (including the leaf itself), ascending.
    std::vector<Id> touching(Id prism) const;
    // Leaves whose closure meets [lo, hi] x S.
    std::vector<Id> touching_region(double lo, double hi, const TaggedSimplex& s) const;
    const Partition& partition() const { return *p_; }

private:
    const Partition* p_;
    std::vector<double> hull_lo_;
    std::vector<double> hull_hi_;
};

struct Neighborhood {
    Id center = kNoId;
    int degree = 0;
    std::vector<Id> members;        // ascending
    std::vector<std::pair<double, double>> time_hull;  // union of member interval closures, merged
    std::vector<Id> spatial_hull;   // member simplex ids, ascending, deduplicated
};

// omega^j: breadth-first closure-touch search of depth j.
Neighborhood neighborhood(const Partition& p, const TouchIndex& index, Id prism, int degree);
// All leaves inside (union of member intervals) x (union of member simplices).
Neighborhood cylindric_closure(const Partition& p, const TouchIndex& index, const Neighborhood& nb);

struct ValidityReport {
    bool ok = true;
    std::vector<std::string> violations;
    std::size_t max_omega1 = 0;
    std::size_t slabs_checked = 0;
    double measure_error = 0.0;

    void fail(std::string message);
};

ValidityReport validate(const Partition& p);

}  // namespace aniso
