#include "aniso/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace aniso {

void ValidityReport::fail(std::string message) {
    ok = false;
    if (violations.size() < 64) violations.push_back(std::move(message));
}

namespace {

std::uint64_t facet_code(Id a, Id b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

class BoundaryTest {
public:
    explicit BoundaryTest(const Partition& p) : p_(p) {}

    bool on_boundary(const std::vector<Id>& facet) {
        const std::uint64_t code = facet.size() == 1 ? facet_code(facet[0], facet[0]) : facet_code(facet[0], facet[1]);
        auto it = cache_.find(code);
        if (it != cache_.end()) return it->second;
        bool result = false;
        for (const auto& b : p_.boundary_facets()) {
            bool all = true;
            for (Id v : facet) {
                const Point& x = p_.vertex(v);
                if (p_.dim() == 1) {
                    all = all && x[0] == p_.vertex(b[0])[0];
                } else {
                    const Point& u = p_.vertex(b[0]);
                    const Point& w = p_.vertex(b[1]);
                    all = all && orient2d(u, w, x) == 0 && std::min(u[0], w[0]) <= x[0] &&
                          x[0] <= std::max(u[0], w[0]) && std::min(u[1], w[1]) <= x[1] && x[1] <= std::max(u[1], w[1]);
                }
            }
            if (all) {
                result = true;
                break;
            }
        }
        cache_.emplace(code, result);
        return result;
    }

private:
    const Partition& p_;
    std::unordered_map<std::uint64_t, bool> cache_;
};

// Per-slab facet bookkeeping for T(t, P).
class SlabState {
public:
    SlabState(const Partition& p, BoundaryTest& boundary) : p_(p), boundary_(boundary) {}

    void add(Id leaf, int sign) {
        const auto& node = p_.simplex_node(p_.prism(leaf).simplex);
        measure_ += sign * simplex_measure(node.spx);
        const int d = node.spx.dim;
        for (int i = 0; i <= d; ++i) {
            std::vector<Id> facet;
            for (int j = 0; j <= d; ++j)
                if (j != i) facet.push_back(node.verts[j]);
            const std::uint64_t code = facet.size() == 1 ? facet_code(facet[0], facet[0]) : facet_code(facet[0], facet[1]);
            auto& entry = counts_[code];
            if (entry.count == 0) entry.boundary = boundary_.on_boundary(facet);
            bad_ -= is_bad(entry);
            entry.count += sign;
            bad_ += is_bad(entry);
            if (entry.count == 0) counts_.erase(code);
        }
    }

    long bad() const { return bad_; }
    double measure() const { return measure_; }

private:
    struct Entry {
        int count = 0;
        bool boundary = false;
    };
    static long is_bad(const Entry& e) { return e.count > 2 || (e.count == 1 && !e.boundary) ? 1 : 0; }

    const Partition& p_;
    BoundaryTest& boundary_;
    std::unordered_map<std::uint64_t, Entry> counts_;
    long bad_ = 0;
    double measure_ = 0.0;
};

bool time_face_of(const TimeInterval& a, double lo, double hi) {
    if (lo == a.lo && hi == a.hi) return true;
    return lo == hi && (lo == a.lo || lo == a.hi);
}

bool space_face_of(const TaggedSimplex& s, const std::vector<Point>& cut) {
    const double tol = 1e-12 * simplex_diameter(s);
    for (const auto& x : cut) {
        bool vertex = false;
        for (int i = 0; i <= s.dim && !vertex; ++i) vertex = distance(x, s.vertices[i]) <= tol;
        if (!vertex) return false;
    }
    return true;
}

}  // namespace

ValidityReport validate(const Partition& p) {
    ValidityReport rep;
    const std::vector<Id> leaves = p.leaves();
    const double total = (p.t_end() - p.t_begin()) * p.domain_measure();
    rep.measure_error = std::abs(p.leaf_measure_sum() - total) / total;
    if (rep.measure_error > 1e-12) rep.fail(fmt::format("leaf measures sum off by relative {:.3g}", rep.measure_error));

    for (Id leaf : leaves) {
        const Prism& pr = p.prism(leaf);
        if (pr.level != p.simplex(pr.simplex).level) rep.fail(fmt::format("prism {} level differs from its simplex", leaf));
        if (p.interval(pr.interval).level != p.params().interval_level(pr.level))
            rep.fail(fmt::format("prism {} interval level {} does not match level {}", leaf, p.interval(pr.interval).level,
                                 pr.level));
    }

    // sweep over breakpoints: conformity per slab and 1-irregularity across each breakpoint
    std::vector<std::pair<double, Id>> starts, ends;
    for (Id leaf : leaves) {
        const auto& ivl = p.interval_of(leaf);
        starts.emplace_back(ivl.lo, leaf);
        ends.emplace_back(ivl.hi, leaf);
    }
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    BoundaryTest boundary(p);
    SlabState slab(p, boundary);
    std::size_t si = 0, ei = 0;
    while (si < starts.size()) {
        const double t = std::min(starts[si].first, ei < ends.size() ? ends[ei].first : starts[si].first);
        std::vector<Id> ending, beginning;
        while (ei < ends.size() && ends[ei].first == t) ending.push_back(ends[ei++].second);
        while (si < starts.size() && starts[si].first == t) beginning.push_back(starts[si++].second);
        for (Id e : ending) slab.add(e, -1);
        for (Id b : beginning) slab.add(b, +1);
        if (!ending.empty() && !beginning.empty()) {
            std::unordered_map<Id, std::vector<Id>> below;  // ancestor simplex -> ending leaves under it
            std::unordered_map<Id, std::vector<Id>> exact;
            for (Id e : ending) {
                Id s = p.prism(e).simplex;
                exact[s].push_back(e);
                for (auto par = p.simplex(s).parent; par; par = p.simplex(*par).parent) below[*par].push_back(e);
            }
            for (Id b : beginning) {
                const Id s = p.prism(b).simplex;
                std::vector<Id> partners;
                if (auto it = below.find(s); it != below.end()) partners = it->second;
                for (Id a = s;; a = *p.simplex(a).parent) {
                    if (auto it = exact.find(a); it != exact.end())
                        partners.insert(partners.end(), it->second.begin(), it->second.end());
                    if (!p.simplex(a).parent) break;
                }
                for (Id e : partners)
                    if (std::abs(p.prism(e).level - p.prism(b).level) > 1)
                        rep.fail(fmt::format("time 1-irregularity between prisms {} and {} at t={}", e, b, t));
            }
        }
        if (t < p.t_end()) {
            ++rep.slabs_checked;
            if (slab.bad() != 0) rep.fail(fmt::format("active triangulation at t={} is not conforming", t));
            if (std::abs(slab.measure() - p.domain_measure()) > 1e-9 * p.domain_measure())
                rep.fail(fmt::format("active triangulation at t={} does not tile the domain", t));
        }
    }

    if (p.dim() == 1) {
        for (Id leaf : leaves) {
            const auto& node = p.simplex_node(p.prism(leaf).simplex);
            const auto& ivl = p.interval_of(leaf);
            for (int i = 0; i < 2; ++i)
                for (Id t : p.simplices_at_vertex(node.verts[i])) {
                    if (p.simplices_nested(t, node.spx.id)) continue;
                    for (Id other : p.leaves_on_simplex(t)) {
                        const auto& oi = p.interval_of(other);
                        if (std::max(oi.lo, ivl.lo) < std::min(oi.hi, ivl.hi) &&
                            std::abs(p.prism(other).level - p.prism(leaf).level) > 1)
                            rep.fail(fmt::format("space 1-irregularity between prisms {} and {}", leaf, other));
                    }
                }
        }
    }

    TouchIndex index(p);
    for (Id a : leaves) {
        const std::vector<Id> touch = index.touching(a);
        rep.max_omega1 = std::max(rep.max_omega1, touch.size());
        const auto& ia = p.interval_of(a);
        const auto& sa = p.simplex_of(a);
        for (Id b : touch) {
            if (b <= a) continue;
            const auto& ib = p.interval_of(b);
            const auto& sb = p.simplex_of(b);
            const double lo = std::max(ia.lo, ib.lo);
            const double hi = std::min(ia.hi, ib.hi);
            const std::vector<Point> cut = simplex_intersection(sa, sb);
            const bool face_a = time_face_of(ia, lo, hi) && space_face_of(sa, cut);
            const bool face_b = time_face_of(ib, lo, hi) && space_face_of(sb, cut);
            if (!face_a && !face_b)
                rep.fail(fmt::format("closures of prisms {} and {} meet outside a face of either", a, b));
        }
    }
    return rep;
}

}  // namespace aniso
