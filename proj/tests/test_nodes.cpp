#include <doctest.h>

#include "aniso/nodes.hpp"
#include "node_oracle.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <map>
#include <set>

using namespace aniso;
using namespace aniso::testing;

namespace {

double eval_on_leaf(const NodeLattice& lat, Id leaf, const std::vector<double>& values, double t, const Point& x) {
    const PrismFrame f = lat.frame(leaf);
    std::vector<double> b(lat.reference().size());
    lat.reference().eval(f.tau(t), f.xhat(x), b.data());
    double v = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) v += b[j] * values[j];
    return v;
}

void check_against_definition(const Partition& p, const NodeLattice& lat) {
    const std::string mismatch = definition_mismatch(p, lat);
    CHECK_MESSAGE(mismatch.empty(), mismatch);
}

std::vector<double> unit(std::size_t n, std::size_t k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    return e;
}

}  // namespace

TEST_CASE("local lattice sizes") {
    const Partition p2 = unit_partition(2, 1, 1);
    const Partition p1 = unit_partition(1, 1, 1);
    const Id l2 = p2.leaves().front(), l1 = p1.leaves().front();
    CHECK(local_nodes(p2.interval_of(l2), p2.simplex_of(l2), ReferenceElement(2, {2, 2})).size() == 6);
    CHECK(local_nodes(p1.interval_of(l1), p1.simplex_of(l1), ReferenceElement(1, {3, 2})).size() == 6);
    CHECK(local_nodes(p2.interval_of(l2), p2.simplex_of(l2), ReferenceElement(2, {2, 3})).size() == 12);
    CHECK(simplex_lattice_size(2, 2) == 6);
    CHECK(simplex_multi_indices(2, 2).size() == 6);
    // canonical order: time-major, lexicographic multi-index
    const auto nodes = local_nodes(p1.interval_of(l1), p1.simplex_of(l1), ReferenceElement(1, {3, 2}));
    CHECK(nodes[0].first == 0.0);
    CHECK(nodes[2].first == 0.5);
    CHECK(nodes[5].first == 1.0);
    CHECK_THROWS(PolyOrders{1, 2}.check());
}

TEST_CASE("reference basis is a Lagrange basis") {
    for (int d = 1; d <= 2; ++d)
        for (int r1 = 2; r1 <= 4; ++r1)
            for (int r2 = 2; r2 <= 4; ++r2) {
                const ReferenceElement ref(d, {r1, r2});
                std::vector<double> b(ref.size());
                for (int i = 0; i < ref.time_size(); ++i)
                    for (int a = 0; a < ref.space_size(); ++a) {
                        ref.eval(ref.time_node(i), ref.space_node(a), b.data());
                        for (int j = 0; j < ref.size(); ++j)
                            CHECK(b[j] == doctest::Approx(j == ref.index(i, a) ? 1.0 : 0.0).epsilon(1e-13));
                    }
                // partition of unity at an arbitrary point
                ref.eval(0.3, Point{0.2, d == 2 ? 0.1 : 0.0, 0}, b.data());
                double sum = 0.0;
                for (double v : b) sum += v;
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
            }
}

TEST_CASE("single prism and uniform meshes have no hanging nodes") {
    for (int d = 1; d <= 2; ++d) {
        SpatialMesh one{d, {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}}, {{0, 1, 2}}, {}};
        if (d == 1) one = SpatialMesh{1, {Point{0, 0, 0}, Point{1, 0, 0}}, {{0, 1}}, {}};
        Partition p = Partition::tensor_initial({0.0, 1.0}, one, AnisotropyParams{1.0, d == 1 ? 1.0 : 2.0, d});
        NodeLattice single = NodeLattice::classify(p, {2, 3});
        CHECK(single.hanging_nodes().empty());
        for (Id nu : single.free_nodes()) CHECK(single.basis_support(nu) == p.leaves());
        for (int n = 1; n <= 4; ++n) {
            for (Id l : p.leaves())
                if (p.is_leaf(l)) patch_refine(p, l);
            const NodeLattice lat = NodeLattice::classify(p, {2, 2});
            CHECK(lat.hanging_nodes().empty());
        }
    }
}

TEST_CASE("3k+1 mesh hangs exactly on the level interface") {
    Partition p = unit_partition(1, 1.0, 1.0);
    patch_refine(p, p.locate(1.0, Point{1.0, 0, 0}));
    patch_refine(p, p.locate(1.0, Point{1.0, 0, 0}));
    REQUIRE(p.leaf_count() == 7);
    const NodeLattice lat = NodeLattice::classify(p, {2, 2});
    check_against_definition(p, lat);
    REQUIRE_FALSE(lat.hanging_nodes().empty());
    for (Id nu : lat.hanging_nodes()) {
        const LagrangeNode& n = lat.node(nu);
        // one level-2 owner side, one level-1 hanger side
        for (Id o : n.owners) CHECK(p.prism(o).level == 2);
        for (Id h : n.hangers) CHECK(p.prism(h).level == 1);
        CHECK((n.t == 0.5 || n.x[0] == 0.5));
    }
}

TEST_CASE("classification matches the definition on random meshes") {
    std::mt19937_64 rng(101);
    for (int d = 1; d <= 2; ++d)
        for (double ratio : {0.5, 1.0, 2.0, 4.0})
            for (PolyOrders o : {PolyOrders{2, 2}, PolyOrders{3, 2}, PolyOrders{2, 3}}) {
                Partition p = unit_partition(d, 1.0, ratio, 1, 2);
                random_refine(p, 12, rng, 400);
                const NodeLattice lat = NodeLattice::classify(p, o);
                check_against_definition(p, lat);
                for (Id nu : lat.hanging_nodes()) {
                    const LagrangeNode& n = lat.node(nu);
                    for (Id own : n.owners) CHECK(p.prism(n.master).level < p.prism(own).level);
                }
            }
}

TEST_CASE("master faces carry free interior nodes") {
    std::mt19937_64 rng(103);
    for (int d = 1; d <= 2; ++d)
        for (int trial = 0; trial < 8; ++trial) {
            Partition p = unit_partition(d, 1.0, trial % 2 ? 1.0 : 2.0, 1, 2);
            random_refine(p, 20, rng, 500);
            const NodeLattice lat = NodeLattice::classify(p, {3, 3});
            for (Id nu : lat.hanging_nodes()) {
                const LagrangeNode& n = lat.node(nu);
                const auto& ivl = p.interval_of(n.master);
                const PrismFrame f = lat.frame(n.master);
                for (Id mu : lat.local(n.master)) {
                    const LagrangeNode& m = lat.node(mu);
                    if (n.status == NodeStatus::HangingInSpace) {
                        // interior of the facet {t} x S''
                        if (m.t != n.t) continue;
                        const Point xh = f.xhat(m.x);
                        double rest = 1.0;
                        bool interior = true;
                        for (int k = 0; k < d; ++k) {
                            interior = interior && xh[k] > 1e-12;
                            rest -= xh[k];
                        }
                        if (interior && rest > 1e-12) CHECK(m.status == NodeStatus::Free);
                    } else {
                        // segment I'' x {x}: interior always, endpoints as well for d = 1
                        if (distance(m.x, n.x) > 1e-12) continue;
                        const bool endpoint = m.t == ivl.lo || m.t == ivl.hi;
                        if (!endpoint || d == 1) CHECK(m.status == NodeStatus::Free);
                    }
                }
            }
        }
}

TEST_CASE("basis functions: delta property, partition of unity, continuity") {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int d = 1; d <= 2; ++d)
        for (PolyOrders o : {PolyOrders{2, 2}, PolyOrders{3, 3}}) {
            Partition p = unit_partition(d, 1.0, 2.0, 1, 2);
            random_refine(p, 25, rng, 600);
            const NodeLattice lat = NodeLattice::classify(p, o);
            const std::size_t nf = lat.dof_count();

            const std::vector<double> ones(nf, 1.0);
            for (Id l : p.leaves())
                for (double v : lat.local_values(l, ones)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

            for (std::size_t k = 0; k < nf; k += 7) {
                const auto e = unit(nf, k);
                for (Id nu2 : lat.free_nodes()) {
                    const LagrangeNode& n2 = lat.node(nu2);
                    const Id l = n2.owners.front();
                    const auto vals = lat.local_values(l, e);
                    const double v = eval_on_leaf(lat, l, vals, n2.t, n2.x);
                    CHECK(v == doctest::Approx(lat.dof(nu2) == static_cast<Id>(k) ? 1.0 : 0.0).epsilon(1e-12));
                }
            }

            // jumps of a random FE function across 200 interface points
            std::vector<double> c(nf);
            for (double& v : c) v = unif(rng) - 0.5;
            const TouchIndex index(p);
            const auto leaves = p.leaves();
            int sampled = 0;
            double worst = 0.0;
            while (sampled < 200) {
                const Id a = leaves[rng() % leaves.size()];
                const auto touch = index.touching(a);
                const Id b = touch[rng() % touch.size()];
                if (a == b) continue;
                const auto& ia = p.interval_of(a);
                const auto& ib = p.interval_of(b);
                const double lo = std::max(ia.lo, ib.lo), hi = std::min(ia.hi, ib.hi);
                const auto cut = simplex_intersection(p.simplex_of(a), p.simplex_of(b));
                if (cut.empty()) continue;
                // random convex combination of the intersection vertices
                std::vector<double> w(cut.size());
                double ws = 0.0;
                for (double& x : w) ws += (x = unif(rng));
                Point x{};
                for (std::size_t i = 0; i < cut.size(); ++i)
                    for (int k = 0; k < d; ++k) x[k] += w[i] / ws * cut[i][k];
                const double t = lo + unif(rng) * (hi - lo);
                const double va = eval_on_leaf(lat, a, lat.local_values(a, c), t, x);
                const double vb = eval_on_leaf(lat, b, lat.local_values(b, c), t, x);
                worst = std::max(worst, std::abs(va - vb));
                ++sampled;
            }
            CHECK(worst <= 1e-10);
        }
}

TEST_CASE("free nodes count the dimension of the continuous space") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int d = 1; d <= 2; ++d)
        for (PolyOrders o : {PolyOrders{2, 2}, PolyOrders{3, 2}, PolyOrders{2, 3}}) {
            Partition p = unit_partition(d, 1.0, d == 1 ? 1.0 : 2.0, 1, 1);
            random_refine(p, 6, rng, 60);
            const NodeLattice lat = NodeLattice::classify(p, o);
            const std::vector<Id> leaves = p.leaves();
            const int nl = lat.reference().size();
            std::vector<int> offset(p.prism_capacity(), -1);
            int cols = 0;
            for (Id l : leaves) {
                offset[l] = cols;
                cols += nl;
            }
            // continuity constraints of the discontinuous space, sampled on every closure intersection
            std::vector<std::vector<double>> rows;
            std::vector<double> ba(nl), bb(nl);
            for (std::size_t ia = 0; ia < leaves.size(); ++ia)
                for (std::size_t ib = ia + 1; ib < leaves.size(); ++ib) {
                    const Id a = leaves[ia], b = leaves[ib];
                    const auto& ta = p.interval_of(a);
                    const auto& tb = p.interval_of(b);
                    const double lo = std::max(ta.lo, tb.lo), hi = std::min(ta.hi, tb.hi);
                    if (lo > hi) continue;
                    const auto cut = simplex_intersection(p.simplex_of(a), p.simplex_of(b));
                    if (cut.empty()) continue;
                    std::vector<Point> xs;
                    const int q = o.r2 + 1;
                    if (cut.size() == 1) {
                        xs.push_back(cut[0]);
                    } else {
                        for (std::size_t f = 1; f + 1 < std::max<std::size_t>(cut.size(), 3); ++f)
                            for (int i = 0; i <= q; ++i)
                                for (int j = 0; j <= q - i; ++j) {
                                    const Point& p0 = cut[0];
                                    const Point& p1 = cut[f];
                                    const Point& p2 = cut.size() > 2 ? cut[f + 1] : cut[f];
                                    Point x{};
                                    for (int k = 0; k < d; ++k)
                                        x[k] = p0[k] + (p1[k] - p0[k]) * i / q + (p2[k] - p0[k]) * j / q;
                                    xs.push_back(x);
                                }
                    }
                    std::vector<double> ts{lo};
                    if (hi > lo)
                        for (int i = 1; i <= o.r1; ++i) ts.push_back(lo + (hi - lo) * i / o.r1);
                    const PrismFrame fa = lat.frame(a), fb = lat.frame(b);
                    for (double t : ts)
                        for (const auto& x : xs) {
                            lat.reference().eval(fa.tau(t), fa.xhat(x), ba.data());
                            lat.reference().eval(fb.tau(t), fb.xhat(x), bb.data());
                            std::vector<double> row(cols, 0.0);
                            for (int j = 0; j < nl; ++j) {
                                row[offset[a] + j] += ba[j];
                                row[offset[b] + j] -= bb[j];
                            }
                            rows.push_back(std::move(row));
                        }
                }
            Eigen::MatrixXd c(rows.size(), cols);
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (int j = 0; j < cols; ++j) c(r, j) = rows[r][j];
            Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
            lu.setThreshold(1e-9);
            const long nullity = cols - lu.rank();
            CHECK(nullity == static_cast<long>(lat.dof_count()));

            // the free basis evaluated on an interior lattice of every leaf has full row rank
            const std::size_t nf = lat.dof_count();
            std::vector<std::pair<Id, std::pair<double, Point>>> pts;
            const ReferenceElement fine(d, {o.r1 + 1, o.r2 + 1});
            for (Id l : leaves) {
                const PrismFrame f = lat.frame(l);
                for (int i = 0; i < fine.time_size(); ++i)
                    for (int a = 0; a < fine.space_size(); ++a) {
                        // pull the lattice towards the barycentre so every point is interior
                        const double tau = 0.1 + 0.8 * fine.time_node(i);
                        Point xh = fine.space_node(a);
                        for (int k = 0; k < d; ++k) xh[k] = 0.8 * xh[k] + 0.2 / (d + 1);
                        pts.push_back({l, {f.time(tau), f.space(xh)}});
                    }
            }
            Eigen::MatrixXd e(nf, pts.size());
            for (std::size_t k = 0; k < nf; ++k) {
                const auto ek = unit(nf, k);
                for (std::size_t s = 0; s < pts.size(); ++s) {
                    const Id l = pts[s].first;
                    e(k, s) = eval_on_leaf(lat, l, lat.local_values(l, ek), pts[s].second.first, pts[s].second.second);
                }
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu2(e);
            lu2.setThreshold(1e-9);
            CHECK(lu2.rank() == static_cast<long>(nf));
        }
}

TEST_CASE("basis supports lie in the j(d)-neighbourhood of every owner") {
    std::mt19937_64 rng(113);
    for (int d = 1; d <= 2; ++d) {
        const int j = d == 1 ? 2 : 3;
        for (int trial = 0; trial < 4; ++trial) {
            Partition p = unit_partition(d, 1.0, trial % 2 ? 1.0 : 4.0, 1, 2);
            random_refine(p, 30, rng, 800);
            const NodeLattice lat = NodeLattice::classify(p, {2, 2});
            const TouchIndex index(p);
            const auto supports = lat.all_supports();
            std::map<Id, std::vector<Id>> omega;
            double worst_ratio = 1.0;
            for (std::size_t k = 0; k < supports.size(); ++k) {
                const LagrangeNode& n = lat.node(lat.free_nodes()[k]);
                CHECK(supports[k] == lat.basis_support(n.id));
                for (Id o : n.owners) {
                    auto it = omega.find(o);
                    if (it == omega.end()) it = omega.emplace(o, neighborhood(p, index, o, j).members).first;
                    CHECK(std::includes(it->second.begin(), it->second.end(), supports[k].begin(), supports[k].end()));
                }
                double lo = 1e300, hi = 0.0;
                for (Id l : supports[k]) {
                    const double m = prism_measure(p.interval_of(l), p.simplex_of(l));
                    lo = std::min(lo, m);
                    hi = std::max(hi, m);
                }
                worst_ratio = std::max(worst_ratio, hi / lo);
            }
            CHECK(worst_ratio <= std::pow(2.0, 12));
        }
    }
    Partition p = unit_partition(1, 1.0, 1.0);
    patch_refine(p, p.leaves().front());
    patch_refine(p, p.locate(1.0, Point{1.0, 0, 0}));
    const NodeLattice lat = NodeLattice::classify(p, {2, 2});
    REQUIRE_FALSE(lat.hanging_nodes().empty());
    CHECK_THROWS_AS(lat.basis_support(lat.hanging_nodes().front()), std::invalid_argument);
    CHECK(lat.dump().rfind("NODE 0 ", 0) == 0);
}
