#pragma once

#include "aniso/mesh.hpp"
#include "aniso/refine.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace aniso::testing {

inline Partition unit_partition(int d, double s1, double s2, int time_cells = 1, int space_cells = 1) {
    std::vector<double> times;
    for (int i = 0; i <= time_cells; ++i) times.push_back(static_cast<double>(i) / time_cells);
    const SpatialMesh mesh = kuhn_box_mesh(d, Point{0, 0, 0}, Point{1, 1, 1}, {space_cells, space_cells, space_cells});
    return Partition::tensor_initial(times, mesh, AnisotropyParams{s1, s2, d});
}

inline Id random_leaf(const Partition& p, std::mt19937_64& rng) {
    const std::vector<Id> leaves = p.leaves();
    return leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng)];
}

// Applies `calls` patch refinements to uniformly drawn leaves.
inline void random_refine(Partition& p, int calls, std::mt19937_64& rng, std::size_t max_leaves = 2000) {
    for (int i = 0; i < calls && p.leaf_count() < max_leaves; ++i) patch_refine(p, random_leaf(p, rng));
}

inline bool time_overlap(const TimeInterval& a, const TimeInterval& b) {
    return std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
}

// N_t by a geometric scan over all leaves.
inline std::vector<Id> brute_neighbors_time(const Partition& p, Id prism) {
    std::vector<Id> out;
    const auto& ia = p.interval_of(prism);
    const auto& sa = p.simplex_of(prism);
    for (Id q : p.leaves()) {
        if (q == prism) continue;
        const auto& ib = p.interval_of(q);
        const bool one_point = ia.hi == ib.lo || ib.hi == ia.lo;
        if (!one_point) continue;
        if (affine_dimension(simplex_intersection(sa, p.simplex_of(q)), p.dim()) != p.dim()) continue;
        if (p.prism(q).level == p.prism(prism).level - 1) out.push_back(q);
    }
    return out;
}

// N_x by a geometric scan over all leaves.
inline std::vector<Id> brute_neighbors_space(const Partition& p, Id prism) {
    std::vector<Id> out;
    const auto& ia = p.interval_of(prism);
    const auto& sa = p.simplex_of(prism);
    for (Id q : p.leaves()) {
        if (q == prism || !time_overlap(ia, p.interval_of(q))) continue;
        const auto& sb = p.simplex_of(q);
        if (p.dim() == 1) {
            const std::vector<Point> cut = simplex_intersection(sa, sb);
            if (cut.size() == 1 && p.prism(q).level == p.prism(prism).level - 1) out.push_back(q);
        } else if (simplex_contains_point(sb, sa.vertices[0]) && simplex_contains_point(sb, sa.vertices[sa.tag])) {
            out.push_back(q);
        }
    }
    return out;
}

// One all-mark round; every leaf of a level-uniform partition is split exactly once.
inline void uniform_refine(Partition& p) {
    for (Id e : p.leaves())
        if (p.is_leaf(e)) patch_refine(p, e);
}

// Uniformly distributed point of a leaf prism.
inline std::pair<double, Point> random_point(const Partition& p, Id leaf, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& ivl = p.interval_of(leaf);
    const auto& s = p.simplex_of(leaf);
    const double t = ivl.lo + u(rng) * ivl.length();
    double a = u(rng), b = p.dim() == 2 ? u(rng) : 0.0;
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    Point x{};
    for (int k = 0; k < p.dim(); ++k)
        x[k] = s.vertices[0][k] + a * (s.vertices[1][k] - s.vertices[0][k]) +
               (p.dim() == 2 ? b * (s.vertices[2][k] - s.vertices[0][k]) : 0.0);
    return {t, x};
}

}  // namespace aniso::testing
