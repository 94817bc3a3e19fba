// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "aniso/adapt.hpp"
#include "aniso/functions.hpp"
#include "aniso/quadrature.hpp"
#include "node_oracle.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>

using namespace aniso;
using namespace aniso::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& run, double limit_seconds) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = since(t0);
    if (limit_seconds > 0 && secs > limit_seconds) {
        o.pass = false;
        o.detail += fmt::format("; runtime {:.1f} s over the {:.0f} s limit", secs, limit_seconds);
    }
    if (!o.pass) ++failures;
    fmt::print("criterion {:>2} {}: {} ({}; {:.1f} s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail, secs);
    std::fflush(stdout);
}

// 1 and 4: randomized patch_refine with validate() after every call.
Outcome mesh_invariants(bool level_cap_only, std::size_t* level_violations_out) {
    std::mt19937_64 rng(20240601);
    std::size_t calls = 0, invalid = 0, level_violations = 0;
    std::string first;
    for (int d = 1; d <= 2; ++d)
        for (double ratio : {0.5, 1.0, 2.0, 4.0}) {
            // s2/s1 = ratio
            Partition p = unit_partition(d, 1.0, ratio, 1, 2);
            const Partition roots = p;
            for (int k = 0; k < 625; ++k, ++calls) {
                if (p.leaf_count() > 1200) p = roots;
                const Id m = random_leaf(p, rng);
                const int level = p.prism(m).level;
                const PatchReport rep = patch_refine(p, m);
                if (rep.max_created_level > level + 1) ++level_violations;
                if (level_cap_only) continue;
                const ValidityReport v = validate(p);
                if (!v.ok) {
                    if (first.empty()) first = v.violations.front();
                    ++invalid;
                }
            }
        }
    if (level_violations_out) *level_violations_out = level_violations;
    if (level_cap_only)
        return {level_violations == 0, fmt::format("{} calls, {} with a created level above marked + 1", calls, level_violations)};
    return {invalid == 0, fmt::format("{} calls, {} invalid meshes{}", calls, invalid, first.empty() ? "" : ": " + first)};
}

Outcome three_k_plus_one() {
    Partition p = unit_partition(1, 1.0, 1.0);
    for (int k = 1; k <= 50; ++k) {
        patch_refine(p, p.locate(1.0, Point{1.0, 0, 0}));
        if (p.leaf_count() != static_cast<std::size_t>(3 * k + 1))
            return {false, fmt::format("#P_{} = {}, expected {}", k, p.leaf_count(), 3 * k + 1)};
    }
    return {true, "#P_k = 3k+1 for k = 1..50"};
}

Outcome complexity() {
    // 18 roots: random marking on fewer roots marks single prisms for the first rounds
    const Partition roots = unit_partition(2, 1.0, 2.0, 1, 3);
    const std::vector<PolicyOptions> policies = {
        {MarkPolicy::RandomFraction, 0.1, 11}, {MarkPolicy::RandomFraction, 0.1, 12}, {MarkPolicy::CornerChasing},
        {MarkPolicy::SingularLine},            {MarkPolicy::TemporalFront},
    };
    bool ok = true;
    std::string detail;
    for (const PolicyOptions& po : policies) {
        const ComplexityStudy s = complexity_study(roots, po, 12);
        const bool good = std::isfinite(s.slope) && s.slope > 0 && s.spread <= 0.25 && s.rows.size() == 13;
        ok = ok && good;
        detail += fmt::format("{}{}{}: slope {:.3g} spread {:.1f}%", detail.empty() ? "" : ", ", to_string(po.policy),
                              po.policy == MarkPolicy::RandomFraction ? fmt::format("(seed {})", po.seed) : "", s.slope,
                              100 * s.spread);
    }
    return {ok, detail};
}

Outcome node_classification() {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> calls(5, 80);
    std::size_t meshes = 0, largest = 0, hanging = 0;
    const double ratios[] = {0.5, 1.0, 2.0, 4.0};
    const PolyOrders orders[] = {{2, 2}, {3, 2}, {2, 3}};
    for (int k = 0; k < 200; ++k, ++meshes) {
        const int d = 1 + k % 2;
        Partition p = unit_partition(d, 1.0, ratios[(k / 2) % 4], 1, 2);
        random_refine(p, calls(rng), rng, 2000);
        largest = std::max(largest, p.leaf_count());
        const PolyOrders o = orders[(k / 8) % 3];
        const NodeLattice lat = NodeLattice::classify(p, o);
        hanging += lat.hanging_nodes().size();
        const std::string mismatch = definition_mismatch(p, lat);
        if (!mismatch.empty()) return {false, fmt::format("mesh {}: {}", k, mismatch)};
        const TouchIndex index(p);
        const int j = d == 1 ? 2 : 3;
        std::map<Id, std::vector<Id>> omega;
        const auto supports = lat.all_supports();
        for (std::size_t f = 0; f < supports.size(); ++f)
            for (Id own : lat.node(lat.free_nodes()[f]).owners) {
                auto it = omega.find(own);
                if (it == omega.end()) it = omega.emplace(own, neighborhood(p, index, own, j).members).first;
                if (!std::includes(it->second.begin(), it->second.end(), supports[f].begin(), supports[f].end()))
                    return {false, fmt::format("mesh {}: support of free node {} leaves omega^{}", k, lat.free_nodes()[f], j)};
            }
    }
    return {true, fmt::format("{} meshes up to {} leaves, {} hanging nodes all time-xor-space", meshes, largest, hanging)};
}

Partition random_mesh(int d, double ratio, int calls, std::uint64_t seed, std::size_t cap) {
    Partition p = unit_partition(d, 1.0, ratio * d);
    std::mt19937_64 rng(seed);
    random_refine(p, calls, rng, cap);
    return p;
}

Outcome operator_algebra() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double bio = 0.0, proj = 0.0, lin = 0.0, repro = 0.0;
    for (int d = 1; d <= 2; ++d)
        for (PolyOrders o : {PolyOrders{2, 2}, PolyOrders{3, 2}, PolyOrders{2, 3}}) {
            const Partition p = random_mesh(d, 1.0, 30, 50 + d + o.r1 * 10 + o.r2, 400);
            const NodeLattice lat = NodeLattice::classify(p, o);
            for (Id e : p.leaves()) bio = std::max(bio, biorthogonality_residual(p, e, o));
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<double> c(lat.dof_count());
                for (auto& v : c) v = u(rng);
                const FeFunction g(lat, c);
                const FeFunction qg = q_operator(lat, to_dc(g));
                for (std::size_t k = 0; k < c.size(); ++k) proj = std::max(proj, std::abs(qg.coefficients()[k] - c[k]));
            }
            const double a = u(rng), b = u(rng);
            const auto g1 = [](Id leaf, double t, const Point& x) { return std::sin(3 * t + x[0]) + 0.1 * (leaf % 7); };
            const auto g2 = [](Id leaf, double t, const Point& x) { return std::exp(t * x[1]) - (leaf % 3); };
            const FeFunction q1 = q_operator(lat, g1), q2 = q_operator(lat, g2);
            const FeFunction q12 =
                q_operator(lat, [&](Id leaf, double t, const Point& x) { return a * g1(leaf, t, x) + b * g2(leaf, t, x); });
            for (std::size_t k = 0; k < lat.dof_count(); ++k)
                lin = std::max(lin, std::abs(q12.coefficients()[k] - a * q1.coefficients()[k] - b * q2.coefficients()[k]));
            // a polynomial of degree (r1 - 1, r2 - 1)
            const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
            const int pt = o.r1 - 1, px = o.r2 - 1;
            const SpaceTimeFn f = [=](double t, const Point& x) {
                return c0 + c1 * std::pow(t, pt) + c2 * std::pow(x[0], px) * std::pow(t, pt) + c3 * std::pow(x[d - 1], px);
            };
            for (double rho : {2.0, 1.0}) {
                const QuasiInterpolant pi = quasi_interpolate(lat, f, NormParams{kInf, rho, 2.0});
                repro = std::max(repro, global_error(f, pi.F, kInf));
            }
        }
    const bool ok = bio <= 1e-12 && proj <= 1e-10 && lin <= 1e-10 && repro <= 1e-10;
    return {ok, fmt::format("biorthogonality {:.2e}, Q projection {:.2e}, linearity {:.2e}, pi(poly) - poly {:.2e}", bio,
                            proj, lin, repro)};
}

// Dense least squares onto V_P at fine quadrature points, independent of the sparse normal equations.
std::pair<double, double> quasi_best_ratio(const Partition& p, const SpaceTimeFn& f) {
    const PolyOrders o{2, 2};
    const NodeLattice lat = NodeLattice::classify(p, o);
    const QuadratureRule rule = QuadratureRule::prism(p.dim(), 2 * o.r1 + 2, 2 * o.r2 + 2);
    const std::vector<Id> leaves = p.leaves();
    std::vector<std::size_t> offset(p.prism_capacity(), 0);
    std::size_t rows = 0;
    std::vector<SamplePoints> pts(p.prism_capacity());
    for (Id e : leaves) {
        pts[e] = region_points(p, {e}, rule);
        offset[e] = rows;
        rows += pts[e].w.size();
    }
    const std::size_t n = lat.dof_count();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs(rows), sw(rows);
    for (Id e : leaves)
        for (std::size_t q = 0; q < pts[e].w.size(); ++q) {
            sw[offset[e] + q] = std::sqrt(pts[e].w[q]);
            rhs[offset[e] + q] = sw[offset[e] + q] * f(pts[e].t[q], pts[e].x[q]);
        }
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> unit(n, 0.0);
        unit[k] = 1.0;
        const FeFunction phi(lat, unit);
        for (Id e : lat.basis_support(lat.free_nodes()[k]))
            for (std::size_t q = 0; q < pts[e].w.size(); ++q)
                A(offset[e] + q, k) = sw[offset[e] + q] * phi.eval_on(e, pts[e].t[q], pts[e].x[q]);
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
    const double best = (A * c - rhs).norm();

    const FeFunction pi = quasi_interpolate(lat, f, NormParams{}).F;
    double err = 0.0;
    for (Id e : leaves)
        for (std::size_t q = 0; q < pts[e].w.size(); ++q)
            err += pts[e].w[q] * std::pow(pi.eval_on(e, pts[e].t[q], pts[e].x[q]) - f(pts[e].t[q], pts[e].x[q]), 2);
    return {std::sqrt(err), best};
}

Outcome quasi_best() {
    const std::vector<std::pair<std::string, SpaceTimeFn>> fs = {
        {"sine", [](double t, const Point& x) { return std::sin(3 * t + 1) * std::cos(2 * x[0] - x[1]); }},
        {"t^0.75", [](double t, const Point&) { return std::pow(t, 0.75); }},
        {"|x|^0.6", [](double, const Point& x) { return std::pow(x[0] * x[0] + x[1] * x[1], 0.3); }},
        {"|t-0.3|", [](double t, const Point& x) { return std::abs(t - 0.3) + x[0]; }},
        {"bump", [](double t, const Point& x) { return std::exp(-20 * ((t - 0.6) * (t - 0.6) + (x[0] - 0.4) * (x[0] - 0.4))); }},
    };
    double lo = kInf, hi = 0.0;
    std::size_t largest = 0;
    std::string detail;
    for (int d = 1; d <= 2; ++d) {
        const Partition p = random_mesh(d, 1.0, d == 1 ? 30 : 12, 7000 + d, 300);
        largest = std::max(largest, p.leaf_count());
        for (const auto& [name, f] : fs) {
            const auto [err, best] = quasi_best_ratio(p, f);
            const double ratio = err / best;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            detail += fmt::format("{}d={} {}: {:.3f}", detail.empty() ? "" : ", ", d, name, ratio);
        }
    }
    return {hi <= 10.0 && hi / lo <= 2.0 && largest <= 300,
            fmt::format("C in [{:.3f}, {:.3f}] on meshes <= {} leaves; {}", lo, hi, largest, detail)};
}

Outcome rate_smooth() {
    const Partition roots = unit_partition(2, 1.0, 2.0);
    const TestFunction f = make_function("smooth-sine", {}, SeminormContext{2, 1.0, 2.0, 2.0, PolyOrders{2, 2}});
    AdaptOptions o;
    o.mark.mode = MarkMode::Whitney;
    o.mark.degree = 0;
    o.budget.max_leaves = 100000;
    const RateStudy s = rate_study(roots, f.f, geometric_schedule(1e-2, 0.5, 12), o, 0);
    std::size_t largest = 0;
    for (const RatePoint& pt : s.points)
        if (pt.status == RefineStatus::Converged) largest = std::max(largest, pt.leaves);
    const bool ok = s.valid && std::abs(s.adaptive.slope - s.target_slope) <= 0.15 * std::abs(s.target_slope);
    return {ok, fmt::format("adaptive slope {:.4f} (target {:.2f}, R2 {:.4f}) over {} runs up to {} leaves", s.adaptive.slope,
                            s.target_slope, s.adaptive.r2, s.adaptive.points, largest)};
}

Outcome rate_singular() {
    const Partition roots = unit_partition(1, 1.0, 1.0);
    const TestFunction f =
        make_function("tsingular", {{"beta", 0.75}}, SeminormContext{1, 1.0, 1.0, 2.0, PolyOrders{2, 2}});
    AdaptOptions o;
    o.mark.mode = MarkMode::Oracle;
    o.mark.oracle = f.oracle;
    o.mark.degree = 0;
    const RateStudy s = rate_study(roots, f.f, geometric_schedule(1e-3, 0.5, 10), o, 8);
    const bool ok = s.valid && s.adaptive.slope <= s.uniform.slope - 0.1;
    return {ok, fmt::format("adaptive slope {:.4f} (R2 {:.3f}), uniform slope {:.4f}, gap {:.3f}", s.adaptive.slope,
                            s.adaptive.r2, s.uniform.slope, s.uniform.slope - s.adaptive.slope)};
}

Outcome besov_sanity() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int d = 1; d <= 2; ++d) {
        Cylinder D;
        D.dim = d;
        std::vector<Point> v = {Point{0, 0, 0}, Point{1, 0, 0}};
        if (d == 2) v.push_back(Point{0, 1, 0});
        D.simplices.push_back(make_simplex(d, v, d));
        for (int r = 1; r <= 4; ++r) {
            std::vector<double> c(3 * r);
            for (auto& x : c) x = u(rng);
            // degree r - 1 in t times degree <= r - 1 in x
            const SpaceTimeFn f = [&, r](double t, const Point& x) {
                double s = 0.0;
                for (int i = 0; i < r; ++i)
                    s += c[i] * std::pow(t, i) + c[r + i] * std::pow(x[0], i) + c[2 * r + i] * std::pow(x[d - 1], r - 1 - i) * std::pow(x[0], i);
                return s;
            };
            for (Direction dir : {Direction::Time, Direction::Space})
                for (double delta : {0.1, 0.3})
                    for (double n : shift_norms(f, D, dir, r, delta, kInf)) worst = std::max(worst, n);
        }
    }
    const auto kink = [](double t, const Point&) { return std::abs(t - 0.5); };
    Cylinder D;
    D.simplices.push_back(make_simplex(1, {Point{0, 0, 0}, Point{1, 0, 0}}, 1));
    std::vector<double> x, y;
    for (int k = 2; k <= 8; ++k) {
        x.push_back(std::ldexp(1.0, -k));
        y.push_back(modulus(kink, D, Direction::Time, 2, x.back(), kInf));
    }
    const double slope = fit_loglog(x, y).slope;
    return {worst <= 1e-10 && std::abs(slope - 1.0) <= 0.1,
            fmt::format("max difference of polynomials {:.2e}; sup-modulus slope of |t-1/2| {:.4f}", worst, slope)};
}

Outcome ladder() {
    std::size_t hanging = 0, largest = 0;
    // s2/(s1 d) = 1/2 keeps P_8 at a few thousand leaves
    for (int d = 1; d <= 2; ++d) {
        Partition p = unit_partition(d, 2.0, 1.0 * d);
        for (int n = 0; n <= 8; ++n) {
            if (n > 0) uniform_round(p, n);
            hanging += NodeLattice::classify(p, {2, 2}).hanging_nodes().size();
            largest = std::max(largest, p.leaf_count());
        }
    }
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int d = 1; d <= 2; ++d) {
        const Partition roots = unit_partition(d, 2.0, 1.0 * d);
        const int m = d == 1 ? 3 : 2, N = d == 1 ? 7 : 5;
        const MultiscaleLadder base = multiscale_norms([](double, const Point&) { return 0.0; }, roots, 2.0, 1.0 * d,
                                                       NormParams{}, {2, 2}, m);
        const NodeLattice lat = NodeLattice::classify(*base.partitions[m], {2, 2});
        std::vector<double> c(lat.dof_count());
        for (auto& v : c) v = u(rng);
        const FeFunction F(lat, c);
        const MultiscaleLadder l =
            multiscale_norms([&](double t, const Point& x) { return F(t, x); }, roots, 2.0, 1.0 * d, NormParams{}, {2, 2}, N);
        for (int n = m + 1; n <= N; ++n) worst = std::max(worst, l.levels[n].delta_norm);
    }
    return {hanging == 0 && worst <= 1e-10,
            fmt::format("{} hanging nodes on P_0..P_8 (up to {} leaves); max ||Delta_n F|| past the resolution {:.2e}",
                        hanging, largest, worst)};
}

}  // namespace

int main() {
    report(1, "mesh invariants", [] { return mesh_invariants(false, nullptr); }, 300);
    report(2, "3k+1 family", three_k_plus_one, 1);
    report(3, "complexity bound", complexity, 180);
    report(4, "level cap", [] { return mesh_invariants(true, nullptr); }, 0);
    report(5, "node classification", node_classification, 240);
    report(6, "operator algebra", operator_algebra, 0);
    report(7, "quasi-best approximation", quasi_best, 0);
    report(8, "rate, smooth d=2", rate_smooth, 0);
    report(8, "rate, temporal singularity", rate_singular, 0);
    report(9, "Besov estimator sanity", besov_sanity, 0);
    report(10, "multiscale ladder", ladder, 0);
    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
