#include "aniso/nodes.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace aniso {

const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Free: return "free";
        case NodeStatus::HangingInTime: return "hanging-time";
        case NodeStatus::HangingInSpace: return "hanging-space";
    }
    return "?";
}

std::vector<std::pair<double, Point>> local_nodes(const TimeInterval& ivl, const TaggedSimplex& s,
                                                  const ReferenceElement& ref) {
    const PrismFrame f = PrismFrame::of(ivl, s);
    std::vector<std::pair<double, Point>> out;
    out.reserve(ref.size());
    for (int i = 0; i < ref.time_size(); ++i) {
        // endpoints are copied, not recomputed, so shared faces agree bit for bit
        const double t = i == 0 ? ivl.lo : (i == ref.time_size() - 1 ? ivl.hi : f.time(ref.time_node(i)));
        for (int a = 0; a < ref.space_size(); ++a) out.emplace_back(t, f.space(ref.space_node(a)));
    }
    return out;
}

namespace {

// Nodes are identified on a 2^-44 grid of the normalised bounding box; lattice points of any
// admissible mesh are far apart on that grid while rounding noise stays far below one cell.
constexpr double kGrid = 17592186044416.0;

struct Key {
    long long t = 0, x = 0, y = 0;
    bool operator==(const Key& o) const { return t == o.t && x == o.x && y == o.y; }
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = std::hash<long long>()(k.t);
        h ^= std::hash<long long>()(k.x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<long long>()(k.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

class Keyer {
public:
    explicit Keyer(const Partition& p) : d_(p.dim()), t0_(p.t_begin()), tw_(p.t_end() - p.t_begin()) {
        Point lo, hi;
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (Id v = 0; v < static_cast<Id>(p.vertex_count()); ++v)
            for (int k = 0; k < d_; ++k) {
                lo[k] = std::min(lo[k], p.vertex(v)[k]);
                hi[k] = std::max(hi[k], p.vertex(v)[k]);
            }
        xw_ = 0.0;
        for (int k = 0; k < d_; ++k) xw_ = std::max(xw_, hi[k] - lo[k]);
        x0_ = lo;
    }
    long long tkey(double t) const { return std::llround((t - t0_) / tw_ * kGrid); }
    Key key(double t, const Point& x) const {
        Key k;
        k.t = tkey(t);
        k.x = std::llround((x[0] - x0_[0]) / xw_ * kGrid);
        if (d_ > 1) k.y = std::llround((x[1] - x0_[1]) / xw_ * kGrid);
        return k;
    }

private:
    int d_;
    double t0_, tw_;
    Point x0_{};
    double xw_ = 1.0;
};

bool in_closed_simplex(const PrismFrame& f, const Point& x) {
    const Point xh = f.xhat(x);
    double rest = 1.0;
    for (int k = 0; k < f.dim; ++k) {
        if (xh[k] < -1e-10) return false;
        rest -= xh[k];
    }
    return rest >= -1e-10;
}

}  // namespace

NodeLattice NodeLattice::classify(const Partition& p, PolyOrders orders) {
    NodeLattice lat;
    lat.p_ = &p;
    lat.ref_ = ReferenceElement(p.dim(), orders);
    const Keyer keyer(p);
    const std::vector<Id> leaves = p.leaves();
    lat.local_.assign(p.prism_capacity(), {});

    std::unordered_map<Key, Id, KeyHash> ids;
    for (Id leaf : leaves) {
        auto& loc = lat.local_[leaf];
        for (const auto& [t, x] : local_nodes(p.interval_of(leaf), p.simplex_of(leaf), lat.ref_)) {
            auto [it, inserted] = ids.emplace(keyer.key(t, x), static_cast<Id>(lat.nodes_.size()));
            if (inserted) {
                LagrangeNode n;
                n.id = it->second;
                n.t = t;
                n.x = x;
                lat.nodes_.push_back(n);
            }
            lat.nodes_[it->second].owners.push_back(leaf);
            loc.push_back(it->second);
        }
    }

    // every node in the closure of a leaf belongs to some leaf touching it
    const TouchIndex index(p);
    for (Id leaf : leaves) {
        const auto& ivl = p.interval_of(leaf);
        const PrismFrame f = PrismFrame::of(ivl, p.simplex_of(leaf));
        const long long klo = keyer.tkey(ivl.lo), khi = keyer.tkey(ivl.hi);
        std::unordered_set<Id> seen(lat.local_[leaf].begin(), lat.local_[leaf].end());
        for (Id q : index.touching(leaf)) {
            if (q == leaf) continue;
            for (Id nu : lat.local_[q]) {
                if (!seen.insert(nu).second) continue;
                const LagrangeNode& n = lat.nodes_[nu];
                const long long kt = keyer.tkey(n.t);
                if (kt < klo || kt > khi || !in_closed_simplex(f, n.x)) continue;
                lat.nodes_[nu].hangers.push_back(leaf);
            }
        }
    }

    for (auto& n : lat.nodes_) {
        std::sort(n.hangers.begin(), n.hangers.end());
        if (n.hangers.empty()) continue;
        const long long kt = keyer.tkey(n.t);
        bool space = false, time = false;
        for (Id h : n.hangers) {
            const auto& ivl = p.interval_of(h);
            if (kt == keyer.tkey(ivl.lo) || kt == keyer.tkey(ivl.hi))
                space = true;
            else
                time = true;
        }
        if (space && time)
            throw std::logic_error(fmt::format("node {} hangs in time and in space at once", n.id));
        n.status = space ? NodeStatus::HangingInSpace : NodeStatus::HangingInTime;

        auto better = [&](Id a, Id b) {
            if (b == kNoId) return true;
            const int la = p.prism(a).level, lb = p.prism(b).level;
            return la < lb || (la == lb && a < b);
        };
        Id master = kNoId;
        if (space) {
            // a hanger whose simplex was bisected into an owner's simplex
            for (Id h : n.hangers) {
                const Id sh = p.prism(h).simplex;
                bool above = false;
                for (Id o : n.owners) above = above || (sh != p.prism(o).simplex && p.simplex_contains(sh, p.prism(o).simplex));
                if (above && better(h, master)) master = h;
            }
        }
        if (master == kNoId)
            for (Id h : n.hangers)
                if (better(h, master)) master = h;
        for (Id o : n.owners)
            if (p.prism(master).level >= p.prism(o).level)
                throw std::logic_error(
                    fmt::format("master {} of node {} is not coarser than owner {}", master, n.id, o));
        n.master = master;
    }

    lat.dof_.assign(lat.nodes_.size(), kNoId);
    for (const auto& n : lat.nodes_) {
        if (n.status == NodeStatus::Free) {
            lat.dof_[n.id] = static_cast<Id>(lat.free_.size());
            lat.free_.push_back(n.id);
        } else {
            lat.hanging_.push_back(n.id);
        }
    }

    // masters are strictly coarser than the owners, so the recursion below is well founded
    lat.weights_.assign(lat.nodes_.size(), {});
    std::vector<char> done(lat.nodes_.size(), 0);
    auto resolve = [&](auto&& self, Id nu) -> void {
        if (done[nu]) return;
        const LagrangeNode& n = lat.nodes_[nu];
        if (n.status == NodeStatus::Free) {
            lat.weights_[nu] = {NodeWeight{lat.dof_[nu], 1.0}};
            done[nu] = 1;
            return;
        }
        const PrismFrame f = lat.frame(n.master);
        std::vector<double> b(lat.ref_.size());
        lat.ref_.eval(f.tau(n.t), f.xhat(n.x), b.data());
        std::map<Id, double> acc;
        const auto& mloc = lat.local_[n.master];
        for (std::size_t j = 0; j < mloc.size(); ++j) {
            if (std::abs(b[j]) < 1e-13) continue;
            self(self, mloc[j]);
            for (const auto& w : lat.weights_[mloc[j]]) acc[w.dof] += b[j] * w.w;
        }
        auto& out = lat.weights_[nu];
        for (const auto& [dof, w] : acc)
            if (std::abs(w) > 1e-13) out.push_back(NodeWeight{dof, w});
        done[nu] = 1;
    };
    for (Id nu = 0; nu < static_cast<Id>(lat.nodes_.size()); ++nu) resolve(resolve, nu);
    return lat;
}

PrismFrame NodeLattice::frame(Id prism) const { return PrismFrame::of(p_->interval_of(prism), p_->simplex_of(prism)); }

std::vector<double> NodeLattice::local_values(Id prism, const std::vector<double>& coeffs) const {
    if (coeffs.size() != free_.size()) throw std::invalid_argument("coefficient vector size differs from #free nodes");
    const auto& loc = local_.at(prism);
    std::vector<double> out(loc.size(), 0.0);
    for (std::size_t j = 0; j < loc.size(); ++j)
        for (const auto& w : weights_[loc[j]]) out[j] += w.w * coeffs[w.dof];
    return out;
}

std::vector<std::vector<Id>> NodeLattice::all_supports() const {
    std::vector<std::vector<Id>> out(free_.size());
    for (const auto& n : nodes_)
        for (const auto& w : weights_[n.id]) out[w.dof].insert(out[w.dof].end(), n.owners.begin(), n.owners.end());
    for (auto& s : out) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return out;
}

std::vector<Id> NodeLattice::basis_support(Id free_node) const {
    const Id k = dof(free_node);
    if (k == kNoId) throw std::invalid_argument(fmt::format("node {} is hanging and has no basis function", free_node));
    std::vector<Id> out;
    for (const auto& n : nodes_)
        for (const auto& w : weights_[n.id])
            if (w.dof == k) out.insert(out.end(), n.owners.begin(), n.owners.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string NodeLattice::dump() const {
    std::string out;
    for (const auto& n : nodes_) {
        out += fmt::format("NODE {} {:.17g}", n.id, n.t);
        for (int k = 0; k < p_->dim(); ++k) out += fmt::format(" {:.17g}", n.x[k]);
        out += fmt::format(" {} {}\n", to_string(n.status), n.master);
    }
    return out;
}

}  // namespace aniso
