#include "aniso/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace aniso {

namespace {

double cross(const Point& a, const Point& b, const Point& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Orientation of the triangle, +1 for counter-clockwise.
int winding(const TaggedSimplex& s) { return orient2d(s.vertices[0], s.vertices[1], s.vertices[2]); }

bool separated_by_edges_of(const TaggedSimplex& a, const TaggedSimplex& b) {
    for (int i = 0; i < 3; ++i) {
        const Point& p = a.vertices[i];
        const Point& q = a.vertices[(i + 1) % 3];
        const int inside = orient2d(p, q, a.vertices[(i + 2) % 3]);
        bool all_out = true;
        for (int j = 0; j < 3 && all_out; ++j) all_out = orient2d(p, q, b.vertices[j]) == -inside;
        if (all_out) return true;
    }
    return false;
}

void dedup(std::vector<Point>& pts, double scale) {
    const double tol = 1e-13 * scale;
    std::vector<Point> out;
    for (const auto& p : pts) {
        bool seen = false;
        for (const auto& q : out) seen = seen || distance(p, q) <= tol;
        if (!seen) out.push_back(p);
    }
    pts = std::move(out);
}

}  // namespace

bool closed_simplices_intersect(const TaggedSimplex& a, const TaggedSimplex& b) {
    if (a.dim == 1) {
        const double alo = std::min(a.vertices[0][0], a.vertices[1][0]);
        const double ahi = std::max(a.vertices[0][0], a.vertices[1][0]);
        const double blo = std::min(b.vertices[0][0], b.vertices[1][0]);
        const double bhi = std::max(b.vertices[0][0], b.vertices[1][0]);
        return std::max(alo, blo) <= std::min(ahi, bhi);
    }
    if (a.dim == 2) return !separated_by_edges_of(a, b) && !separated_by_edges_of(b, a);
    throw std::invalid_argument("simplex intersection supports d <= 2");
}

std::vector<Point> simplex_intersection(const TaggedSimplex& a, const TaggedSimplex& b) {
    std::vector<Point> out;
    if (a.dim == 1) {
        const double lo = std::max(std::min(a.vertices[0][0], a.vertices[1][0]), std::min(b.vertices[0][0], b.vertices[1][0]));
        const double hi = std::min(std::max(a.vertices[0][0], a.vertices[1][0]), std::max(b.vertices[0][0], b.vertices[1][0]));
        if (lo > hi) return out;
        out.push_back(Point{lo, 0.0, 0.0});
        if (hi > lo) out.push_back(Point{hi, 0.0, 0.0});
        return out;
    }
    if (a.dim != 2) throw std::invalid_argument("simplex intersection supports d <= 2");
    // Sutherland-Hodgman: clip a by the closed half-planes of b; inclusion decided by exact signs
    std::vector<Point> poly(a.vertices.begin(), a.vertices.begin() + 3);
    const int w = winding(b);
    for (int e = 0; e < 3 && !poly.empty(); ++e) {
        const Point& p = b.vertices[e];
        const Point& q = b.vertices[(e + 1) % 3];
        std::vector<Point> next;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& u = poly[i];
            const Point& v = poly[(i + 1) % n];
            const int su = orient2d(p, q, u) * w;
            const int sv = orient2d(p, q, v) * w;
            if (su >= 0) next.push_back(u);
            if ((su > 0 && sv < 0) || (su < 0 && sv > 0)) {
                const double cu = cross(p, q, u);
                const double cv = cross(p, q, v);
                const double t = cu / (cu - cv);
                Point x{};
                for (int k = 0; k < 2; ++k) x[k] = u[k] + t * (v[k] - u[k]);
                next.push_back(x);
            }
        }
        poly = std::move(next);
    }
    dedup(poly, simplex_diameter(a) + simplex_diameter(b));
    return poly;
}

int affine_dimension(const std::vector<Point>& pts, int d) {
    if (pts.empty()) return -1;
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, distance(p, pts[0]));
    if (scale == 0.0) return 0;
    if (d == 1) return 1;
    std::size_t far = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (distance(pts[i], pts[0]) == scale) far = i;
    for (const auto& p : pts)
        if (std::abs(cross(pts[0], pts[far], p)) > 1e-12 * scale * scale) return 2;
    return 1;
}

namespace {

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
    double len2 = 0.0, dot = 0.0;
    for (int k = 0; k < 2; ++k) {
        len2 += (b[k] - a[k]) * (b[k] - a[k]);
        dot += (x[k] - a[k]) * (b[k] - a[k]);
    }
    const double t = len2 > 0.0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
    Point p{};
    for (int k = 0; k < 2; ++k) p[k] = a[k] + t * (b[k] - a[k]);
    return distance(x, p);
}

}  // namespace

double simplex_distance(const TaggedSimplex& a, const TaggedSimplex& b) {
    if (closed_simplices_intersect(a, b)) return 0.0;
    if (a.dim == 1) {
        const double alo = std::min(a.vertices[0][0], a.vertices[1][0]);
        const double ahi = std::max(a.vertices[0][0], a.vertices[1][0]);
        const double blo = std::min(b.vertices[0][0], b.vertices[1][0]);
        const double bhi = std::max(b.vertices[0][0], b.vertices[1][0]);
        return std::max(blo - ahi, alo - bhi);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            best = std::min(best, point_segment_distance(a.vertices[i], b.vertices[j], b.vertices[(j + 1) % 3]));
            best = std::min(best, point_segment_distance(b.vertices[i], a.vertices[j], a.vertices[(j + 1) % 3]));
        }
    return best;
}

TouchIndex::TouchIndex(const Partition& p) : p_(&p) {
    const std::size_t n = p.simplex_count();
    hull_lo_.assign(n, std::numeric_limits<double>::infinity());
    hull_hi_.assign(n, -std::numeric_limits<double>::infinity());
    // children always carry larger ids than their parent
    for (Id s = static_cast<Id>(n) - 1; s >= 0; --s) {
        for (Id leaf : p.leaves_on_simplex(s)) {
            const auto& ivl = p.interval_of(leaf);
            hull_lo_[s] = std::min(hull_lo_[s], ivl.lo);
            hull_hi_[s] = std::max(hull_hi_[s], ivl.hi);
        }
        const auto& parent = p.simplex(s).parent;
        if (parent) {
            hull_lo_[*parent] = std::min(hull_lo_[*parent], hull_lo_[s]);
            hull_hi_[*parent] = std::max(hull_hi_[*parent], hull_hi_[s]);
        }
    }
}

std::vector<Id> TouchIndex::touching_region(double lo, double hi, const TaggedSimplex& s) const {
    std::vector<Id> out;
    std::vector<Id> stack(p_->root_simplices().rbegin(), p_->root_simplices().rend());
    while (!stack.empty()) {
        const Id t = stack.back();
        stack.pop_back();
        if (hull_lo_[t] > hi || hull_hi_[t] < lo) continue;
        if (!closed_simplices_intersect(p_->simplex(t), s)) continue;
        for (Id leaf : p_->leaves_on_simplex(t)) {
            const auto& ivl = p_->interval_of(leaf);
            if (ivl.lo <= hi && lo <= ivl.hi) out.push_back(leaf);
        }
        const auto& ch = p_->simplex_node(t).children;
        if (ch[0] != kNoId) {
            stack.push_back(ch[1]);
            stack.push_back(ch[0]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Id> TouchIndex::touching(Id prism) const {
    if (!p_->is_leaf(prism)) throw std::invalid_argument("touching() needs a leaf");
    const auto& ivl = p_->interval_of(prism);
    return touching_region(ivl.lo, ivl.hi, p_->simplex_of(prism));
}

namespace {

void fill_hulls(const Partition& p, Neighborhood& nb) {
    std::vector<std::pair<double, double>> ivls;
    nb.spatial_hull.clear();
    for (Id m : nb.members) {
        const auto& ivl = p.interval_of(m);
        ivls.emplace_back(ivl.lo, ivl.hi);
        nb.spatial_hull.push_back(p.prism(m).simplex);
    }
    std::sort(nb.spatial_hull.begin(), nb.spatial_hull.end());
    nb.spatial_hull.erase(std::unique(nb.spatial_hull.begin(), nb.spatial_hull.end()), nb.spatial_hull.end());
    std::sort(ivls.begin(), ivls.end());
    nb.time_hull.clear();
    for (const auto& iv : ivls) {
        if (!nb.time_hull.empty() && iv.first <= nb.time_hull.back().second)
            nb.time_hull.back().second = std::max(nb.time_hull.back().second, iv.second);
        else
            nb.time_hull.push_back(iv);
    }
}

}  // namespace

Neighborhood neighborhood(const Partition& p, const TouchIndex& index, Id prism, int degree) {
    if (degree < 1) throw std::invalid_argument("neighborhood degree must be at least 1");
    Neighborhood nb;
    nb.center = prism;
    nb.degree = degree;
    std::unordered_set<Id> seen{prism};
    std::vector<Id> frontier{prism};
    for (int j = 0; j < degree && !frontier.empty(); ++j) {
        std::vector<Id> next;
        for (Id f : frontier)
            for (Id t : index.touching(f))
                if (seen.insert(t).second) next.push_back(t);
        frontier = std::move(next);
    }
    nb.members.assign(seen.begin(), seen.end());
    std::sort(nb.members.begin(), nb.members.end());
    fill_hulls(p, nb);
    return nb;
}

Neighborhood cylindric_closure(const Partition& p, const TouchIndex& index, const Neighborhood& nb) {
    Neighborhood out;
    out.center = nb.center;
    out.degree = nb.degree;
    auto inside_time = [&](const TimeInterval& ivl) {
        for (const auto& [a, b] : nb.time_hull)
            if (a <= ivl.lo && ivl.hi <= b) return true;
        return false;
    };
    auto inside_space = [&](Id s) {
        std::vector<Id> below;
        for (Id m : nb.spatial_hull) {
            if (p.simplex_contains(m, s)) return true;
            if (p.simplex_contains(s, m)) below.push_back(m);
        }
        double covered = 0.0;
        for (Id m : below) {
            bool maximal = true;
            for (Id o : below) maximal = maximal && (o == m || !p.simplex_contains(o, m));
            if (maximal) covered += simplex_measure(p.simplex(m));
        }
        const double full = simplex_measure(p.simplex(s));
        return std::abs(covered - full) <= 1e-12 * full;
    };
    std::unordered_set<Id> seen;
    for (const auto& [a, b] : nb.time_hull)
        for (Id m : nb.spatial_hull)
            for (Id cand : index.touching_region(a, b, p.simplex(m))) {
                if (seen.count(cand)) continue;
                if (inside_time(p.interval_of(cand)) && inside_space(p.prism(cand).simplex)) seen.insert(cand);
            }
    out.members.assign(seen.begin(), seen.end());
    std::sort(out.members.begin(), out.members.end());
    fill_hulls(p, out);
    return out;
}

}  // namespace aniso
