#include "aniso/polyapprox.hpp"

#include "aniso/parallel.hpp"

#include <Eigen/Sparse>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace aniso {

void NormParams::check() const {
    if (!(p > 0.0) || !(rho > 0.0) || !(q > 0.0)) throw std::invalid_argument("norm exponents must be positive");
    if (rho > p) throw std::invalid_argument(fmt::format("rho = {} exceeds p = {}", rho, p));
}

LocalPoly::LocalPoly(int d, PolyOrders orders, double tc, double ht, const Point& xc, double hx)
    : d_(d), orders_(orders), tc_(tc), ht_(ht), hx_(hx), xc_(xc) {
    orders.check();
    alpha_ = simplex_multi_indices(d, orders.r2 - 1);
    coeffs.assign(size(), 0.0);
}

LocalPoly LocalPoly::for_region(const Partition& p, const std::vector<Id>& region, PolyOrders orders) {
    if (region.empty()) throw std::invalid_argument("empty region");
    const int d = p.dim();
    double tlo = kInf, thi = -kInf;
    Point lo, hi;
    lo.fill(kInf);
    hi.fill(-kInf);
    for (Id e : region) {
        const auto& ivl = p.interval_of(e);
        tlo = std::min(tlo, ivl.lo);
        thi = std::max(thi, ivl.hi);
        const auto& s = p.simplex_of(e);
        for (int v = 0; v <= d; ++v)
            for (int k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], s.vertices[v][k]);
                hi[k] = std::max(hi[k], s.vertices[v][k]);
            }
    }
    Point xc{};
    double hx = 0.0;
    for (int k = 0; k < d; ++k) {
        xc[k] = 0.5 * (lo[k] + hi[k]);
        hx = std::max(hx, 0.5 * (hi[k] - lo[k]));
    }
    return LocalPoly(d, orders, 0.5 * (tlo + thi), 0.5 * (thi - tlo), xc, hx);
}

void LocalPoly::basis(double t, const Point& x, double* out) const {
    const int m = orders_.r2 - 1;
    double pt[16];
    double px[kMaxDim][16];
    const double s = (t - tc_) / ht_;
    pt[0] = 1.0;
    for (int i = 1; i < orders_.r1; ++i) pt[i] = pt[i - 1] * s;
    for (int k = 0; k < d_; ++k) {
        const double u = (x[k] - xc_[k]) / hx_;
        px[k][0] = 1.0;
        for (int j = 1; j <= m; ++j) px[k][j] = px[k][j - 1] * u;
    }
    const int ns = static_cast<int>(alpha_.size());
    for (int i = 0; i < orders_.r1; ++i)
        for (int a = 0; a < ns; ++a) {
            double v = pt[i];
            for (int k = 0; k < d_; ++k) v *= px[k][alpha_[a][k]];
            out[i * ns + a] = v;
        }
}

double LocalPoly::operator()(double t, const Point& x) const {
    double b[512];
    basis(t, x, b);
    double v = 0.0;
    for (int j = 0; j < size(); ++j) v += coeffs[j] * b[j];
    return v;
}

SamplePoints region_points(const Partition& p, const std::vector<Id>& region, const QuadratureRule& rule) {
    SamplePoints out;
    const std::size_t n = region.size() * rule.points.size();
    out.t.reserve(n);
    out.x.reserve(n);
    out.w.reserve(n);
    const double ref = rule.reference_measure();
    for (Id e : region) {
        const PrismFrame f = PrismFrame::of(p.interval_of(e), p.simplex_of(e));
        const double jac = f.measure / ref;
        for (const auto& q : rule.points) {
            out.t.push_back(f.time(q.tau));
            out.x.push_back(f.space(q.xhat));
            out.w.push_back(q.w * jac);
        }
    }
    return out;
}

SamplePoints fit_points(const Partition& p, const std::vector<Id>& region, PolyOrders orders, double pexp) {
    const ReferenceDuals& rd = ReferenceDuals::get(p.dim(), orders);
    return region_points(p, region, std::isinf(pexp) ? rd.lattice() : rd.fine_rule());
}

namespace {

Eigen::VectorXd weighted_lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& omega) {
    const Eigen::VectorXd s = omega.cwiseSqrt();
    return (s.asDiagonal() * a).colPivHouseholderQr().solve(s.cwiseProduct(y));
}

double lp_value(const Eigen::VectorXd& r, const Eigen::VectorXd& w, double pexp) {
    if (std::isinf(pexp)) return r.cwiseAbs().maxCoeff();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += w[i] * std::pow(std::abs(r[i]), pexp);
    return std::pow(acc, 1.0 / pexp);
}

// IRLS for sum w |r|^p, damped by 1/(p-1) above p = 2 so the iteration contracts.
Eigen::VectorXd irls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double pexp,
                     Eigen::VectorXd c, double floor, int& iterations) {
    const double theta = pexp > 2.0 ? 1.0 / (pexp - 1.0) : 1.0;
    Eigen::VectorXd best = c;
    double best_obj = lp_value(y - a * c, w, pexp);
    double prev = best_obj;
    for (int it = 0; it < 200; ++it) {
        ++iterations;
        const Eigen::VectorXd r = y - a * c;
        Eigen::VectorXd omega(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) omega[i] = w[i] * std::pow(std::max(std::abs(r[i]), floor), pexp - 2.0);
        const Eigen::VectorXd next = weighted_lsq(a, y, omega);
        c += theta * (next - c);
        const double obj = lp_value(y - a * c, w, pexp);
        if (obj < best_obj) {
            best_obj = obj;
            best = c;
        }
        if (std::abs(prev - obj) <= 1e-8 * std::max(prev, 1e-300)) break;
        prev = obj;
    }
    return best;
}

// Lawson's reweighting for the minimax fit.
Eigen::VectorXd lawson(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, Eigen::VectorXd c, double floor,
                       int& iterations) {
    const Eigen::Index n = y.size();
    Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
    Eigen::VectorXd best = c;
    double best_err = (y - a * c).cwiseAbs().maxCoeff();
    for (int it = 0; it < 400 && best_err > floor; ++it) {
        ++iterations;
        c = weighted_lsq(a, y, u);
        const Eigen::VectorXd r = (y - a * c).cwiseAbs();
        const double err = r.maxCoeff();
        if (err < best_err) {
            const bool stalled = best_err - err <= 1e-10 * best_err;
            best_err = err;
            best = c;
            if (stalled) break;
        }
        u = u.cwiseProduct(r);
        const double total = u.sum();
        if (!(total > 0.0)) break;
        u /= total;
    }
    return best;
}

}  // namespace

BestApprox best_approx_samples(const std::vector<double>& values, const SamplePoints& pts, LocalPoly shape,
                               double pexp) {
    if (!(pexp > 0.0)) throw std::invalid_argument("best approximation exponent must be positive");
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    const int m = shape.size();
    if (n < m) throw std::invalid_argument("fewer sample points than polynomial coefficients");
    Eigen::MatrixXd a(n, m);
    std::vector<double> row(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        shape.basis(pts.t[i], pts.x[i], row.data());
        for (int j = 0; j < m; ++j) a(i, j) = row[j];
    }
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), n);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(pts.w.data(), n);
    const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    const double floor = 1e-12 * scale;

    BestApprox out;
    Eigen::VectorXd c = weighted_lsq(a, y, w);
    if (std::isinf(pexp)) {
        c = lawson(a, y, c, floor, out.iterations);
    } else if (pexp != 2.0) {
        if (pexp < 1.0) {
            c = irls(a, y, w, 1.0, c, floor, out.iterations);
            out.heuristic = true;
        }
        c = irls(a, y, w, pexp, c, floor, out.iterations);
    }
    out.error = lp_value(y - a * c, w, pexp);
    shape.coeffs.assign(c.data(), c.data() + m);
    out.poly = std::move(shape);
    return out;
}

BestApprox best_approx_local(const SpaceTimeFn& f, const Partition& p, const std::vector<Id>& region, double pexp,
                             PolyOrders orders) {
    const SamplePoints pts = fit_points(p, region, orders, pexp);
    std::vector<double> values(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) values[i] = f(pts.t[i], pts.x[i]);
    return best_approx_samples(values, pts, LocalPoly::for_region(p, region, orders), pexp);
}

namespace {

Eigen::MatrixXd basis_table(const ReferenceElement& ref, const QuadratureRule& rule) {
    Eigen::MatrixXd b(rule.points.size(), ref.size());
    std::vector<double> row(ref.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        ref.eval(rule.points[q].tau, rule.points[q].xhat, row.data());
        for (int j = 0; j < ref.size(); ++j) b(q, j) = row[j];
    }
    return b;
}

}  // namespace

ReferenceDuals::ReferenceDuals(int d, PolyOrders orders) : ref_(d, orders) {
    rule_ = QuadratureRule::prism(d, 2 * orders.r1, 2 * orders.r2);
    fine_ = QuadratureRule::prism(d, 2 * orders.r1 + 2, 2 * orders.r2 + 2);
    lattice_ = sample_lattice(d, 4 * orders.r1, 4 * orders.r2);
    b_ = basis_table(ref_, rule_);
    bf_ = basis_table(ref_, fine_);
    bl_ = basis_table(ref_, lattice_);
    Eigen::VectorXd w(rule_.points.size());
    for (std::size_t q = 0; q < rule_.points.size(); ++q) w[q] = rule_.points[q].w;
    mass_ = b_.transpose() * w.asDiagonal() * b_;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mass_);
    if (!lu.isInvertible()) throw std::runtime_error("reference mass matrix is singular");
    inv_ = lu.inverse();
    z_ = w.asDiagonal() * b_ * inv_;
}

const ReferenceDuals& ReferenceDuals::get(int d, PolyOrders orders) {
    static std::mutex mutex;
    static std::map<std::array<int, 3>, std::unique_ptr<ReferenceDuals>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{d, orders.r1, orders.r2}];
    if (!slot) slot = std::make_unique<ReferenceDuals>(d, orders);
    return *slot;
}

double DualFunctions::eval(int j, double t, const Point& x) const {
    const ReferenceElement& e = ref->element();
    double b[512];
    e.eval(frame.tau(t), frame.xhat(x), b);
    double v = 0.0;
    for (int mu = 0; mu < e.size(); ++mu) v += ref->inverse_mass()(j, mu) * b[mu];
    return scale * v;
}

DualFunctions dual_functions(const Partition& p, Id prism, PolyOrders orders) {
    DualFunctions z;
    z.frame = PrismFrame::of(p.interval_of(prism), p.simplex_of(prism));
    z.ref = &ReferenceDuals::get(p.dim(), orders);
    z.scale = reference_simplex_measure(p.dim()) / z.frame.measure;
    return z;
}

double biorthogonality_residual(const Partition& p, Id prism, PolyOrders orders) {
    const DualFunctions z = dual_functions(p, prism, orders);
    const ReferenceElement& e = z.ref->element();
    const SamplePoints pts = region_points(p, {prism}, z.ref->rule());
    const int n = e.size();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> b(n), zeta(n);
    for (std::size_t q = 0; q < pts.size(); ++q) {
        e.eval(z.frame.tau(pts.t[q]), z.frame.xhat(pts.x[q]), b.data());
        for (int j = 0; j < n; ++j) zeta[j] = z.eval(j, pts.t[q], pts.x[q]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) += pts.w[q] * b[i] * zeta[j];
    }
    return (g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

FeFunction::FeFunction(const NodeLattice& lat, std::vector<double> coeffs) : lat_(&lat), coeffs_(std::move(coeffs)) {
    const Partition& p = lat.partition();
    local_.assign(p.prism_capacity(), {});
    const std::vector<Id> leaves = p.leaves();
    parallel_for(leaves.size(), [&](std::size_t i) { local_[leaves[i]] = lat.local_values(leaves[i], coeffs_); });
}

double FeFunction::eval_on(Id leaf, double t, const Point& x) const {
    const ReferenceElement& e = lat_->reference();
    const PrismFrame f = lat_->frame(leaf);
    double b[512];
    e.eval(f.tau(t), f.xhat(x), b);
    const auto& v = local_.at(leaf);
    double out = 0.0;
    for (int j = 0; j < e.size(); ++j) out += v[j] * b[j];
    return out;
}

double FeFunction::operator()(double t, const Point& x) const { return eval_on(lat_->partition().locate(t, x), t, x); }

DcFunction to_dc(const FeFunction& f) {
    DcFunction g;
    const Partition& p = f.lattice().partition();
    g.values.assign(p.prism_capacity(), {});
    for (Id e : p.leaves()) g.values[e] = f.local(e);
    return g;
}

double eval_dc(const NodeLattice& lat, const DcFunction& g, Id leaf, double t, const Point& x) {
    const ReferenceElement& e = lat.reference();
    const PrismFrame f = lat.frame(leaf);
    double b[512];
    e.eval(f.tau(t), f.xhat(x), b);
    double out = 0.0;
    for (int j = 0; j < e.size(); ++j) out += g.values.at(leaf)[j] * b[j];
    return out;
}

namespace {

// Applies `coefficient(owner, local index)` to every free node.
template <class Fn>
FeFunction gather(const NodeLattice& lat, Fn coefficient) {
    const auto& free = lat.free_nodes();
    std::vector<double> c(free.size());
    parallel_for(free.size(), [&](std::size_t k) {
        const LagrangeNode& n = lat.node(free[k]);
        const Id owner = n.owners.front();
        const auto& loc = lat.local(owner);
        const int j = static_cast<int>(std::find(loc.begin(), loc.end(), n.id) - loc.begin());
        c[k] = coefficient(owner, j);
    });
    return FeFunction(lat, std::move(c));
}

}  // namespace

FeFunction q_operator(const NodeLattice& lat, const LeafFn& g) {
    const ReferenceDuals& rd = ReferenceDuals::get(lat.partition().dim(), lat.orders());
    const Eigen::MatrixXd& z = rd.weighted_duals();
    return gather(lat, [&](Id owner, int j) {
        const PrismFrame f = lat.frame(owner);
        double acc = 0.0;
        for (std::size_t q = 0; q < rd.rule().points.size(); ++q) {
            const auto& qp = rd.rule().points[q];
            acc += z(q, j) * g(owner, f.time(qp.tau), f.space(qp.xhat));
        }
        return acc;
    });
}

FeFunction q_operator(const NodeLattice& lat, const DcFunction& g) {
    const ReferenceDuals& rd = ReferenceDuals::get(lat.partition().dim(), lat.orders());
    const Eigen::MatrixXd& z = rd.weighted_duals();
    const Eigen::MatrixXd& b = rd.basis();
    return gather(lat, [&](Id owner, int j) {
        const auto& v = g.values.at(owner);
        const Eigen::VectorXd gv = b * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        return z.col(j).dot(gv);
    });
}

QuasiInterpolant quasi_interpolate(const NodeLattice& lat, const SpaceTimeFn& f, const NormParams& params) {
    params.check();
    const Partition& p = lat.partition();
    const std::vector<Id> leaves = p.leaves();
    DcFunction local;
    local.values.assign(p.prism_capacity(), {});
    std::vector<double> err(p.prism_capacity(), std::nan(""));
    std::vector<char> heuristic(leaves.size(), 0);
    const ReferenceElement& e = lat.reference();
    parallel_for(leaves.size(), [&](std::size_t i) {
        const Id leaf = leaves[i];
        const BestApprox b = best_approx_local(f, p, {leaf}, params.rho, lat.orders());
        err[leaf] = b.error;
        heuristic[i] = b.heuristic;
        auto& v = local.values[leaf];
        for (const auto& [t, x] : local_nodes(p.interval_of(leaf), p.simplex_of(leaf), e)) v.push_back(b.poly(t, x));
    });
    QuasiInterpolant out{q_operator(lat, local), std::move(err), false};
    out.heuristic = std::any_of(heuristic.begin(), heuristic.end(), [](char h) { return h != 0; });
    return out;
}

namespace {

// Sum over leaves of int |h|^p (or max |h|) with h evaluated on the fine rule / sup lattice.
template <class Eval>
double leafwise_norm(const NodeLattice& lat, double pexp, Eval h) {
    const Partition& p = lat.partition();
    const ReferenceDuals& rd = ReferenceDuals::get(p.dim(), lat.orders());
    const bool sup = std::isinf(pexp);
    const QuadratureRule& rule = sup ? rd.lattice() : rd.fine_rule();
    const Eigen::MatrixXd& table = sup ? rd.lattice_basis() : rd.fine_basis();
    const std::vector<Id> leaves = p.leaves();
    std::vector<double> part(leaves.size(), 0.0);
    parallel_for(leaves.size(), [&](std::size_t i) {
        const Id leaf = leaves[i];
        const PrismFrame f = lat.frame(leaf);
        const double jac = f.measure / rule.reference_measure();
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& qp = rule.points[q];
            const double v = std::abs(h(leaf, f.time(qp.tau), f.space(qp.xhat), table.row(q)));
            acc = sup ? std::max(acc, v) : acc + qp.w * jac * std::pow(v, pexp);
        }
        part[i] = acc;
    });
    if (sup) return part.empty() ? 0.0 : *std::max_element(part.begin(), part.end());
    double total = 0.0;
    for (double v : part) total += v;
    return std::pow(total, 1.0 / pexp);
}

}  // namespace

double leafwise_error(const NodeLattice& lat, const SpaceTimeFn& f, const LeafFn& g, double pexp) {
    return leafwise_norm(lat, pexp, [&](Id leaf, double t, const Point& x, const auto&) { return f(t, x) - g(leaf, t, x); });
}

double lp_norm(const NodeLattice& lat, const LeafFn& g, double pexp) {
    return leafwise_norm(lat, pexp, [&](Id leaf, double t, const Point& x, const auto&) { return g(leaf, t, x); });
}

double global_error(const SpaceTimeFn& f, const FeFunction& F, double pexp) {
    return leafwise_norm(F.lattice(), pexp, [&](Id leaf, double t, const Point& x, const auto& row) {
        const auto& v = F.local(leaf);
        double fe = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) fe += v[j] * row[static_cast<Eigen::Index>(j)];
        return f(t, x) - fe;
    });
}

FeFunction l2_projection(const NodeLattice& lat, const SpaceTimeFn& f) {
    const Partition& p = lat.partition();
    const ReferenceDuals& rd = ReferenceDuals::get(p.dim(), lat.orders());
    const QuadratureRule& rule = rd.fine_rule();
    const Eigen::MatrixXd& table = rd.fine_basis();
    const Eigen::Index ndof = static_cast<Eigen::Index>(lat.dof_count());
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ndof);
    for (Id leaf : p.leaves()) {
        const PrismFrame fr = lat.frame(leaf);
        const double jac = fr.measure / rule.reference_measure();
        const Eigen::MatrixXd m = jac * rd.mass();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(table.cols());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& qp = rule.points[q];
            b += (qp.w * jac * f(fr.time(qp.tau), fr.space(qp.xhat))) * table.row(q).transpose();
        }
        const auto& loc = lat.local(leaf);
        for (std::size_t i = 0; i < loc.size(); ++i) {
            for (const auto& wi : lat.weights(loc[i])) {
                rhs[wi.dof] += wi.w * b[i];
                for (std::size_t j = 0; j < loc.size(); ++j)
                    for (const auto& wj : lat.weights(loc[j]))
                        triplets.emplace_back(wi.dof, wj.dof, wi.w * wj.w * m(i, j));
            }
        }
    }
    Eigen::SparseMatrix<double> a(ndof, ndof);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("global mass matrix factorisation failed");
    const Eigen::VectorXd c = solver.solve(rhs);
    return FeFunction(lat, std::vector<double>(c.data(), c.data() + c.size()));
}

}  // namespace aniso
