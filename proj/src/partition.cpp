#include "aniso/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aniso {

namespace {

// x = num * 2^exp with num odd (or zero).
std::pair<long long, int> encode_dyadic(double x) {
    if (x == 0.0) return {0, 0};
    int e = 0;
    const double m = std::frexp(x, &e);
    long long num = static_cast<long long>(std::ldexp(m, 53));
    int exp = e - 53;
    while (num % 2 == 0) {
        num /= 2;
        ++exp;
    }
    return {num, exp};
}

double decode_dyadic(long long num, int exp) { return std::ldexp(static_cast<double>(num), exp); }

void permutations_into(std::vector<int>& perm, std::vector<std::vector<int>>& out) {
    std::sort(perm.begin(), perm.end());
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

using Facet = std::vector<Id>;

Facet facet_key(const std::array<Id, kMaxDim + 1>& verts, int dim, int skip) {
    Facet f;
    for (int i = 0; i <= dim; ++i)
        if (i != skip) f.push_back(verts[i]);
    std::sort(f.begin(), f.end());
    return f;
}

}  // namespace

SpatialMesh kuhn_box_mesh(int dim, const Point& lower, const Point& upper, const std::array<int, kMaxDim>& cells) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("kuhn mesh dimension out of range");
    SpatialMesh mesh;
    mesh.dim = dim;
    std::array<int, kMaxDim> stride{};
    int count = 1;
    for (int k = 0; k < dim; ++k) {
        if (cells[k] < 1) throw std::invalid_argument("kuhn mesh needs at least one cell per axis");
        if (!(upper[k] > lower[k])) throw std::invalid_argument("kuhn mesh box is empty");
        stride[k] = count;
        count *= cells[k] + 1;
    }
    mesh.vertices.resize(count);
    for (int v = 0; v < count; ++v) {
        Point p{};
        int rest = v;
        for (int k = dim - 1; k >= 0; --k) {
            const int idx = rest / stride[k];
            rest %= stride[k];
            // dyadic box widths keep vertices exact
            p[k] = lower[k] + (upper[k] - lower[k]) * idx / cells[k];
        }
        mesh.vertices[v] = p;
    }
    std::vector<int> axes(dim);
    std::iota(axes.begin(), axes.end(), 0);
    std::vector<std::vector<int>> perms;
    permutations_into(axes, perms);

    std::array<int, kMaxDim> cell{};
    const int total_cells = [&] {
        int c = 1;
        for (int k = 0; k < dim; ++k) c *= cells[k];
        return c;
    }();
    for (int c = 0; c < total_cells; ++c) {
        int rest = c;
        for (int k = 0; k < dim; ++k) {
            cell[k] = rest % cells[k];
            rest /= cells[k];
        }
        int base = 0;
        for (int k = 0; k < dim; ++k) base += cell[k] * stride[k];
        for (const auto& perm : perms) {
            std::vector<int> s{base};
            int cur = base;
            for (int axis : perm) {
                cur += stride[axis];
                s.push_back(cur);
            }
            mesh.simplices.push_back(s);
        }
    }
    return mesh;
}

Id Partition::add_vertex(const Point& p) {
    auto it = vertex_ids_.find(p);
    if (it != vertex_ids_.end()) return it->second;
    const Id id = static_cast<Id>(vertices_.size());
    vertices_.push_back(p);
    vertex_ids_.emplace(p, id);
    used_at_vertex_.emplace_back();
    return id;
}

Id Partition::find_vertex(const Point& p) const {
    auto it = vertex_ids_.find(p);
    return it == vertex_ids_.end() ? kNoId : it->second;
}

Id Partition::add_interval(const TimeInterval& ivl) {
    const Id id = static_cast<Id>(intervals_.size());
    IntervalNode node;
    node.ivl = ivl;
    node.ivl.id = id;
    intervals_.push_back(node);
    return id;
}

Id Partition::add_simplex(const TaggedSimplex& s, const std::array<Id, kMaxDim + 1>& verts, Id root) {
    const Id id = static_cast<Id>(simplices_.size());
    SimplexNode node;
    node.spx = s;
    node.spx.id = id;
    node.verts = verts;
    node.root = root == kNoId ? id : root;
    simplices_.push_back(node);
    leaves_on_simplex_.emplace_back();
    return id;
}

Id Partition::add_prism(Id interval, Id simplex) {
    const Id id = static_cast<Id>(prisms_.size());
    prisms_.push_back(Prism{id, interval, simplex, simplices_[simplex].spx.level});
    prism_children_.emplace_back();
    leaf_.push_back(0);
    return id;
}

void Partition::attach_leaf(Id prism) {
    leaf_[prism] = 1;
    ++leaf_count_;
    const Id s = prisms_[prism].simplex;
    auto& on = leaves_on_simplex_[s];
    if (on.empty()) {
        const auto& node = simplices_[s];
        for (int i = 0; i <= node.spx.dim; ++i) used_at_vertex_[node.verts[i]].push_back(s);
    }
    on.push_back(prism);
}

void Partition::detach_leaf(Id prism) {
    leaf_[prism] = 0;
    --leaf_count_;
    const Id s = prisms_[prism].simplex;
    auto& on = leaves_on_simplex_[s];
    on.erase(std::find(on.begin(), on.end(), prism));
    if (on.empty()) {
        const auto& node = simplices_[s];
        for (int i = 0; i <= node.spx.dim; ++i) {
            auto& used = used_at_vertex_[node.verts[i]];
            used.erase(std::find(used.begin(), used.end(), s));
        }
    }
}

void Partition::require_leaf(Id prism) const {
    if (!is_leaf(prism)) throw std::invalid_argument(fmt::format("prism {} is not a leaf", prism));
}

void Partition::finish_roots() {
    root_intervals_.clear();
    root_simplices_.clear();
    for (const auto& n : intervals_)
        if (!n.ivl.parent) root_intervals_.push_back(n.ivl.id);
    for (const auto& n : simplices_)
        if (!n.spx.parent) root_simplices_.push_back(n.spx.id);
    if (root_intervals_.empty() || root_simplices_.empty()) throw std::invalid_argument("partition has no roots");

    t0_ = intervals_[root_intervals_.front()].ivl.lo;
    t1_ = intervals_[root_intervals_.front()].ivl.hi;
    for (Id i : root_intervals_) {
        t0_ = std::min(t0_, intervals_[i].ivl.lo);
        t1_ = std::max(t1_, intervals_[i].ivl.hi);
    }
    domain_measure_ = 0.0;
    std::map<Facet, int> facet_count;
    for (Id s : root_simplices_) {
        const auto& node = simplices_[s];
        domain_measure_ += simplex_measure(node.spx);
        for (int i = 0; i <= node.spx.dim; ++i) ++facet_count[facet_key(node.verts, node.spx.dim, i)];
    }
    boundary_facets_.clear();
    for (const auto& [facet, count] : facet_count) {
        if (count > 2) throw std::invalid_argument("spatial mesh is not conforming: facet shared by more than two simplices");
        if (count == 1) boundary_facets_.push_back(facet);
    }
}

namespace {

// Facets of count one must lie inside a boundary facet of the unrefined mesh.
bool facet_on_boundary(const std::vector<Point>& facet, const std::vector<std::vector<Point>>& boundary, int dim) {
    for (const auto& b : boundary) {
        bool all = true;
        for (const auto& p : facet) {
            if (dim == 1) {
                all = all && p[0] == b[0][0];
            } else {
                const bool on_line = orient2d(b[0], b[1], p) == 0;
                const bool inside = std::min(b[0][0], b[1][0]) <= p[0] && p[0] <= std::max(b[0][0], b[1][0]) &&
                                    std::min(b[0][1], b[1][1]) <= p[1] && p[1] <= std::max(b[0][1], b[1][1]);
                all = all && on_line && inside;
            }
            if (!all) break;
        }
        if (all) return true;
    }
    return false;
}

// Checks that uniform bisection of the mesh to `depth` generations stays face-matching.
void check_uniform_conformity(const Partition& roots_only, int depth) {
    const int dim = roots_only.dim();
    std::vector<std::vector<Point>> boundary;
    for (const auto& f : roots_only.boundary_facets()) {
        std::vector<Point> pts;
        for (Id v : f) pts.push_back(roots_only.vertex(v));
        boundary.push_back(pts);
    }
    std::vector<TaggedSimplex> level;
    for (Id s : roots_only.root_simplices()) level.push_back(roots_only.simplex(s));
    for (int g = 0; g <= depth; ++g) {
        std::map<std::vector<Point>, int> count;
        for (const auto& s : level) {
            for (int i = 0; i <= dim; ++i) {
                std::vector<Point> f;
                for (int j = 0; j <= dim; ++j)
                    if (j != i) f.push_back(s.vertices[j]);
                std::sort(f.begin(), f.end());
                ++count[f];
            }
        }
        for (const auto& [facet, c] : count) {
            if (c > 2 || (c == 1 && !facet_on_boundary(facet, boundary, dim)))
                throw std::invalid_argument(fmt::format(
                    "spatial mesh loses conformity after {} uniform bisection generations", g));
        }
        if (g == depth) break;
        std::vector<TaggedSimplex> next;
        for (const auto& s : level) {
            auto [a, b] = bisect_simplex(s);
            next.push_back(a);
            next.push_back(b);
        }
        level = std::move(next);
    }
}

}  // namespace

Partition Partition::tensor_initial(const std::vector<double>& time_points, const SpatialMesh& mesh,
                                    const AnisotropyParams& params) {
    params.check();
    if (params.d != mesh.dim) throw std::invalid_argument("anisotropy dimension differs from the spatial mesh");
    if (mesh.dim < 1 || mesh.dim > 2) throw std::invalid_argument("partitions support spatial dimension 1 or 2");
    if (time_points.size() < 2) throw std::invalid_argument("need at least two time points");
    for (std::size_t i = 1; i < time_points.size(); ++i)
        if (!(time_points[i] > time_points[i - 1])) throw std::invalid_argument("time points must increase strictly");
    if (mesh.simplices.empty()) throw std::invalid_argument("empty spatial mesh");

    Partition p;
    p.params_ = params;
    for (std::size_t i = 0; i + 1 < time_points.size(); ++i) {
        const bool last = i + 2 == time_points.size();
        p.add_interval(TimeInterval{time_points[i], time_points[i + 1], last, 0, kNoId, std::nullopt});
    }
    for (std::size_t k = 0; k < mesh.simplices.size(); ++k) {
        const auto& idx = mesh.simplices[k];
        std::vector<Point> pts;
        std::array<Id, kMaxDim + 1> verts{};
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= static_cast<int>(mesh.vertices.size()))
                throw std::invalid_argument("simplex references a missing vertex");
            Point v = mesh.vertices[idx[i]];
            for (int c = mesh.dim; c < kMaxDim; ++c) v[c] = 0.0;
            pts.push_back(v);
        }
        const int tag = mesh.tags.empty() ? mesh.dim : mesh.tags.at(k);
        TaggedSimplex s = make_simplex(mesh.dim, pts, tag);
        for (int i = 0; i <= mesh.dim; ++i) verts[i] = p.add_vertex(s.vertices[i]);
        p.add_simplex(s, verts, kNoId);
    }
    p.finish_roots();
    // hanging vertices in T0 show up as unmatched facets after uniform bisection
    check_uniform_conformity(p, mesh.dim);

    for (Id i : p.root_intervals_)
        for (Id s : p.root_simplices_) p.attach_leaf(p.add_prism(i, s));
    return p;
}

std::vector<Id> Partition::leaves() const {
    std::vector<Id> out;
    out.reserve(leaf_count_);
    for (Id i = 0; i < static_cast<Id>(leaf_.size()); ++i)
        if (leaf_[i]) out.push_back(i);
    return out;
}

bool Partition::simplex_contains(Id a, Id b) const {
    const int la = simplices_[a].spx.level;
    while (b != kNoId && simplices_[b].spx.level > la) {
        const auto& par = simplices_[b].spx.parent;
        b = par ? *par : kNoId;
    }
    return b == a;
}

std::pair<Id, Id> Partition::split_interval(Id interval) {
    auto& node = intervals_.at(interval);
    if (node.children[0] != kNoId) return {node.children[0], node.children[1]};
    auto [a, b] = bisect_interval(node.ivl);
    const Id ia = add_interval(a);
    const Id ib = add_interval(b);
    intervals_[interval].children = {ia, ib};
    return {ia, ib};
}

std::pair<Id, Id> Partition::split_simplex(Id simplex) {
    if (simplices_.at(simplex).children[0] != kNoId)
        return {simplices_[simplex].children[0], simplices_[simplex].children[1]};
    const SimplexNode node = simplices_[simplex];
    auto [a, b] = bisect_simplex(node.spx);
    const int k = node.spx.tag;
    const Id z = add_vertex(a.vertices[k]);
    std::array<Id, kMaxDim + 1> va = node.verts;
    std::array<Id, kMaxDim + 1> vb = node.verts;
    va[k] = z;
    for (int i = 0; i < k; ++i) vb[i] = node.verts[i + 1];
    vb[k] = z;
    const Id ia = add_simplex(a, va, node.root);
    const Id ib = add_simplex(b, vb, node.root);
    simplices_[simplex].children = {ia, ib};
    return {ia, ib};
}

std::vector<Id> Partition::replace_leaf(Id prism, const std::vector<std::pair<Id, Id>>& children) {
    require_leaf(prism);
    detach_leaf(prism);
    std::vector<Id> ids;
    ids.reserve(children.size());
    for (const auto& [i, s] : children) {
        const Id c = add_prism(i, s);
        attach_leaf(c);
        ids.push_back(c);
    }
    prism_children_[prism] = ids;
    return ids;
}

bool simplex_contains_point(const TaggedSimplex& s, const Point& x) {
    if (s.dim == 1) {
        const double a = std::min(s.vertices[0][0], s.vertices[1][0]);
        const double b = std::max(s.vertices[0][0], s.vertices[1][0]);
        return a <= x[0] && x[0] <= b;
    }
    if (s.dim == 2) {
        const int o = orient2d(s.vertices[0], s.vertices[1], s.vertices[2]);
        for (int i = 0; i < 3; ++i) {
            const int e = orient2d(s.vertices[i], s.vertices[(i + 1) % 3], x);
            if (e != 0 && e != o) return false;
        }
        return true;
    }
    throw std::invalid_argument("point location supports d <= 2");
}

Id Partition::locate(double t, const Point& x) const {
    if (t < t0_ || t > t1_) throw std::out_of_range("time outside the partition");
    for (Id root : root_simplices_) {
        Id cur = root;
        if (!simplex_contains_point(simplices_[cur].spx, x)) continue;
        while (cur != kNoId) {
            for (Id leaf : leaves_on_simplex_[cur])
                if (intervals_[prisms_[leaf].interval].ivl.contains(t)) return leaf;
            const auto& ch = simplices_[cur].children;
            if (ch[0] == kNoId) break;
            cur = simplex_contains_point(simplices_[ch[0]].spx, x) ? ch[0] : ch[1];
        }
    }
    throw std::out_of_range("point outside the partition");
}

std::vector<Id> Partition::active_triangulation(double t) const {
    if (t < t0_ || t > t1_) throw std::out_of_range("time outside the partition");
    std::vector<Id> out;
    for (Id i = 0; i < static_cast<Id>(leaf_.size()); ++i)
        if (leaf_[i] && intervals_[prisms_[i].interval].ivl.contains(t)) out.push_back(prisms_[i].simplex);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Id> Partition::neighbors_time(Id prism) const {
    require_leaf(prism);
    std::vector<Id> out;
    const auto& spx = simplices_[prisms_[prism].simplex].spx;
    if (!spx.parent) return out;
    const auto& ivl = intervals_[prisms_[prism].interval].ivl;
    for (Id other : leaves_on_simplex_[*spx.parent]) {
        const auto& oi = intervals_[prisms_[other].interval].ivl;
        if (oi.hi == ivl.lo || ivl.hi == oi.lo) out.push_back(other);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Id> Partition::neighbors_space(Id prism) const {
    require_leaf(prism);
    std::vector<Id> out;
    const Id s = prisms_[prism].simplex;
    const auto& node = simplices_[s];
    const auto& ivl = intervals_[prisms_[prism].interval].ivl;
    auto overlaps = [&](Id other) {
        const auto& oi = intervals_[prisms_[other].interval].ivl;
        return std::max(oi.lo, ivl.lo) < std::min(oi.hi, ivl.hi);
    };
    if (dim() == 1) {
        for (int i = 0; i < 2; ++i) {
            for (Id t : used_at_vertex_[node.verts[i]]) {
                if (simplices_[t].spx.level != node.spx.level - 1 || simplices_nested(s, t)) continue;
                for (Id other : leaves_on_simplex_[t])
                    if (overlaps(other)) out.push_back(other);
            }
        }
    } else {
        const Id a = node.verts[0];
        const Id b = node.verts[node.spx.tag];
        for (Id t : used_at_vertex_[a]) {
            const auto& tn = simplices_[t];
            bool has_b = false;
            for (int i = 0; i <= tn.spx.dim; ++i) has_b = has_b || tn.verts[i] == b;
            if (!has_b || simplices_nested(s, t)) continue;
            for (Id other : leaves_on_simplex_[t])
                if (overlaps(other)) out.push_back(other);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Id> Partition::necessary_neighbors(Id prism) const {
    std::vector<Id> a = neighbors_time(prism);
    std::vector<Id> b = neighbors_space(prism);
    std::vector<Id> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

double Partition::anisotropy(Id prism) const {
    const double ratio = params_.level_ratio();
    const double i = interval_of(prism).length();
    const double s = std::pow(simplex_measure(simplex_of(prism)), ratio);
    return std::max(i / s, s / i);
}

MeshStats Partition::stats() const {
    MeshStats st;
    const RootSizes r = root_sizes();
    st.mu1 = r.mu1;
    st.mu2 = r.mu2;
    st.mu3 = r.mu3;
    st.mu4 = r.mu4;
    const double ratio = params_.level_ratio();
    for (Id s : root_simplices_) st.kappa0 = std::max(st.kappa0, simplex_shape(simplices_[s].spx));
    for (Id i : root_intervals_)
        for (Id s : root_simplices_) {
            const double a = intervals_[i].ivl.length();
            const double b = std::pow(simplex_measure(simplices_[s].spx), ratio);
            st.a0 = std::max(st.a0, std::max(a / b, b / a));
        }
    for (Id p = 0; p < static_cast<Id>(leaf_.size()); ++p) {
        if (!leaf_[p]) continue;
        st.kappa = std::max(st.kappa, simplex_shape(simplex_of(p)));
        st.a = std::max(st.a, anisotropy(p));
    }
    return st;
}

RootSizes Partition::root_sizes() const {
    RootSizes r;
    r.mu2 = r.mu4 = std::numeric_limits<double>::infinity();
    for (Id i : root_intervals_) {
        r.mu1 = std::max(r.mu1, intervals_[i].ivl.length());
        r.mu2 = std::min(r.mu2, intervals_[i].ivl.length());
    }
    for (Id s : root_simplices_) {
        const double m = simplex_measure(simplices_[s].spx);
        r.mu3 = std::max(r.mu3, m);
        r.mu4 = std::min(r.mu4, m);
    }
    for (const auto& n : simplices_) r.kappa = std::max(r.kappa, simplex_shape(n.spx));
    return r;
}

double Partition::leaf_measure_sum() const {
    double sum = 0.0;
    for (Id p = 0; p < static_cast<Id>(leaf_.size()); ++p)
        if (leaf_[p]) sum += prism_measure(interval_of(p), simplex_of(p));
    return sum;
}

int Partition::max_level() const {
    int m = 0;
    for (Id p = 0; p < static_cast<Id>(leaf_.size()); ++p)
        if (leaf_[p]) m = std::max(m, prisms_[p].level);
    return m;
}

std::string Partition::to_text() const {
    std::string out = fmt::format("ANISO {} {:.17g} {:.17g}\n", params_.d, params_.s1, params_.s2);
    for (Id v = 0; v < static_cast<Id>(vertices_.size()); ++v) {
        out += fmt::format("VTX {}", v);
        for (int k = 0; k < params_.d; ++k) out += fmt::format(" {:.17g}", vertices_[v][k]);
        out += '\n';
    }
    for (const auto& n : intervals_) {
        const auto [ln, le] = encode_dyadic(n.ivl.lo);
        const auto [hn, he] = encode_dyadic(n.ivl.hi);
        out += fmt::format("IVL {} {} {} {} {} {} {} {}\n", n.ivl.id, ln, le, hn, he, n.ivl.right_closed ? 1 : 0,
                           n.ivl.level, n.ivl.parent ? *n.ivl.parent : kNoId);
    }
    for (const auto& n : simplices_) {
        out += fmt::format("SPX {} {} {} {}", n.spx.id, n.spx.level, n.spx.tag, n.spx.parent ? *n.spx.parent : kNoId);
        for (int i = 0; i <= n.spx.dim; ++i) out += fmt::format(" {}", n.verts[i]);
        out += '\n';
    }
    for (Id p = 0; p < static_cast<Id>(leaf_.size()); ++p)
        if (leaf_[p])
            out += fmt::format("PRISM {} {} {} {}\n", p, prisms_[p].level, prisms_[p].interval, prisms_[p].simplex);
    return out;
}

Partition Partition::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Partition p;
    bool header = false;
    std::vector<Prism> leaves;
    auto bad = [](const std::string& l) { return std::invalid_argument("malformed mesh record: " + l); };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "ANISO") {
            ls >> p.params_.d >> p.params_.s1 >> p.params_.s2;
            if (!ls) throw bad(line);
            p.params_.check();
            header = true;
        } else if (!header) {
            throw std::invalid_argument("mesh file must start with an ANISO header");
        } else if (kind == "VTX") {
            Id id;
            Point x{};
            ls >> id;
            for (int k = 0; k < p.params_.d; ++k) ls >> x[k];
            if (!ls || id != static_cast<Id>(p.vertices_.size())) throw bad(line);
            if (p.add_vertex(x) != id) throw bad(line);
        } else if (kind == "IVL") {
            Id id, parent;
            long long ln, hn;
            int le, he, closed, level;
            ls >> id >> ln >> le >> hn >> he >> closed >> level >> parent;
            if (!ls || id != static_cast<Id>(p.intervals_.size())) throw bad(line);
            TimeInterval ivl{decode_dyadic(ln, le), decode_dyadic(hn, he), closed != 0, level, kNoId,
                             parent == kNoId ? std::nullopt : std::optional<Id>(parent)};
            p.add_interval(ivl);
            if (parent != kNoId) {
                auto& ch = p.intervals_.at(parent).children;
                ch[ch[0] == kNoId ? 0 : 1] = id;
            }
        } else if (kind == "SPX") {
            Id id, parent;
            int level, tag;
            ls >> id >> level >> tag >> parent;
            std::array<Id, kMaxDim + 1> verts{};
            std::vector<Point> pts;
            for (int i = 0; i <= p.params_.d; ++i) {
                ls >> verts[i];
                if (!ls || verts[i] < 0 || verts[i] >= static_cast<Id>(p.vertices_.size())) throw bad(line);
                pts.push_back(p.vertices_[verts[i]]);
            }
            if (!ls || id != static_cast<Id>(p.simplices_.size())) throw bad(line);
            TaggedSimplex s = make_simplex(p.params_.d, pts, tag);
            s.level = level;
            s.parent = parent == kNoId ? std::nullopt : std::optional<Id>(parent);
            const Id root = parent == kNoId ? kNoId : p.simplices_.at(parent).root;
            p.add_simplex(s, verts, root);
            if (parent != kNoId) {
                auto& ch = p.simplices_.at(parent).children;
                ch[ch[0] == kNoId ? 0 : 1] = id;
            }
        } else if (kind == "PRISM") {
            Prism pr;
            ls >> pr.id >> pr.level >> pr.interval >> pr.simplex;
            if (!ls) throw bad(line);
            leaves.push_back(pr);
        } else {
            throw bad(line);
        }
    }
    if (!header) throw std::invalid_argument("mesh file must start with an ANISO header");
    if (p.params_.d > 2) throw std::invalid_argument("partitions support spatial dimension 1 or 2");
    p.finish_roots();
    for (const auto& pr : leaves) {
        if (pr.interval < 0 || pr.interval >= static_cast<Id>(p.intervals_.size()) || pr.simplex < 0 ||
            pr.simplex >= static_cast<Id>(p.simplices_.size()) || pr.id < static_cast<Id>(p.prisms_.size()))
            throw std::invalid_argument(fmt::format("invalid PRISM record {}", pr.id));
        while (static_cast<Id>(p.prisms_.size()) < pr.id) {
            p.prisms_.push_back(Prism{});
            p.prism_children_.emplace_back();
            p.leaf_.push_back(0);
        }
        if (p.add_prism(pr.interval, pr.simplex) != pr.id || p.prisms_[pr.id].level != pr.level)
            throw std::invalid_argument(fmt::format("inconsistent PRISM record {}", pr.id));
        p.attach_leaf(pr.id);
    }
    return p;
}

}  // namespace aniso
