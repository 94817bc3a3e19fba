#pragma once

#include "aniso/nodes.hpp"
#include "aniso/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <vector>

namespace aniso {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using SpaceTimeFn = std::function<double(double t, const Point& x)>;
// A function given leaf by leaf; values on shared faces may disagree.
using LeafFn = std::function<double(Id leaf, double t, const Point& x)>;

// Exponents in (0, inf]; rho is the exponent of the elementwise best approximation.
struct NormParams {
    double p = 2.0;
    double rho = 2.0;
    double q = 2.0;

    void check() const;
};

// Element of Pi^{r1,r2} in monomials scaled to a bounding box of its region:
// ((t - tc)/ht)^i ((x - xc)/hx)^alpha, i < r1, |alpha| < r2.
class LocalPoly {
public:
    LocalPoly() = default;
    LocalPoly(int d, PolyOrders orders, double tc, double ht, const Point& xc, double hx);
    // Bounding box of the union of the given leaves.
    static LocalPoly for_region(const Partition& p, const std::vector<Id>& region, PolyOrders orders);

    int size() const { return static_cast<int>(alpha_.size()) * orders_.r1; }
    void basis(double t, const Point& x, double* out) const;
    double operator()(double t, const Point& x) const;

    std::vector<double> coeffs;

private:
    int d_ = 1;
    PolyOrders orders_;
    double tc_ = 0.0, ht_ = 1.0, hx_ = 1.0;
    Point xc_{};
    std::vector<std::array<int, kMaxDim>> alpha_;
};

// Physical sample points with weights (quadrature weights or 1 for sup-norm lattices).
struct SamplePoints {
    std::vector<double> t;
    std::vector<Point> x;
    std::vector<double> w;

    std::size_t size() const { return t.size(); }
};

SamplePoints region_points(const Partition& p, const std::vector<Id>& region, const QuadratureRule& rule);
// The point set used for L_p fits and errors on a region: the error rule for finite p,
// the (4 r1) x (4 r2) lattice per leaf for p = inf.
SamplePoints fit_points(const Partition& p, const std::vector<Id>& region, PolyOrders orders, double pexp);

struct BestApprox {
    LocalPoly poly;
    double error = 0.0;       // E(f, Pi, D)_p estimate on the sample set
    bool heuristic = false;   // p < 1
    int iterations = 0;
};

// Discrete l_p fit of `values` at `pts` in the span of `shape`'s basis.
BestApprox best_approx_samples(const std::vector<double>& values, const SamplePoints& pts, LocalPoly shape,
                               double pexp);
// B_{p,D} with D the union of the region's leaves (a leaf or a cylinder).
BestApprox best_approx_local(const SpaceTimeFn& f, const Partition& p, const std::vector<Id>& region, double pexp,
                             PolyOrders orders);

// Reference-prism data shared by every leaf: mass matrix, its inverse and basis tables.
class ReferenceDuals {
public:
    // Cached per (d, orders); safe to call concurrently.
    static const ReferenceDuals& get(int d, PolyOrders orders);

    const ReferenceElement& element() const { return ref_; }
    const QuadratureRule& rule() const { return rule_; }          // exactness (2 r1, 2 r2)
    const QuadratureRule& fine_rule() const { return fine_; }     // exactness (2 r1 + 2, 2 r2 + 2)
    const QuadratureRule& lattice() const { return lattice_; }    // sup-norm samples
    const Eigen::MatrixXd& basis() const { return b_; }           // rule points x local nodes
    const Eigen::MatrixXd& fine_basis() const { return bf_; }
    const Eigen::MatrixXd& lattice_basis() const { return bl_; }
    const Eigen::MatrixXd& mass() const { return mass_; }
    const Eigen::MatrixXd& inverse_mass() const { return inv_; }
    // weighted dual values w_q zeta_hat_j(q) at rule points
    const Eigen::MatrixXd& weighted_duals() const { return z_; }

    ReferenceDuals(int d, PolyOrders orders);

private:
    ReferenceElement ref_;
    QuadratureRule rule_, fine_, lattice_;
    Eigen::MatrixXd b_, bf_, bl_, mass_, inv_, z_;
};

// zeta_nu on one prism: zeta = (|ref| / |I x S|) zeta_hat o Phi^{-1}.
struct DualFunctions {
    PrismFrame frame;
    const ReferenceDuals* ref = nullptr;
    double scale = 1.0;

    int size() const { return ref->element().size(); }
    double eval(int j, double t, const Point& x) const;
};

DualFunctions dual_functions(const Partition& p, Id prism, PolyOrders orders);

// max_ij |int b_i zeta_j - delta_ij| on a leaf, integrated on the physical prism.
double biorthogonality_residual(const Partition& p, Id prism, PolyOrders orders);

// Continuous piecewise polynomial given by free-node coefficients.
class FeFunction {
public:
    FeFunction(const NodeLattice& lat, std::vector<double> coeffs);

    const NodeLattice& lattice() const { return *lat_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    // local node values on a leaf
    const std::vector<double>& local(Id leaf) const { return local_.at(leaf); }
    double eval_on(Id leaf, double t, const Point& x) const;
    double operator()(double t, const Point& x) const;

private:
    const NodeLattice* lat_;
    std::vector<double> coeffs_;
    std::vector<std::vector<double>> local_;
};

// Element of V_DC: local node values per leaf, indexed by prism id.
struct DcFunction {
    std::vector<std::vector<double>> values;
};

DcFunction to_dc(const FeFunction& f);
double eval_dc(const NodeLattice& lat, const DcFunction& g, Id leaf, double t, const Point& x);

// Q_P: coefficient of free nu = int g zeta_nu over its lowest-id owner.
FeFunction q_operator(const NodeLattice& lat, const LeafFn& g);
FeFunction q_operator(const NodeLattice& lat, const DcFunction& g);

struct QuasiInterpolant {
    FeFunction F;
    std::vector<double> leaf_error;  // E(f, Pi, leaf)_rho by prism id, NaN off the leaves
    bool heuristic = false;
};

// pi_{rho,P} = Q_P o B_{rho,P}.
QuasiInterpolant quasi_interpolate(const NodeLattice& lat, const SpaceTimeFn& f, const NormParams& params);

// ||f - g||_{L_p} over the leaves; g given leafwise.
double leafwise_error(const NodeLattice& lat, const SpaceTimeFn& f, const LeafFn& g, double pexp);
double global_error(const SpaceTimeFn& f, const FeFunction& F, double pexp);
double lp_norm(const NodeLattice& lat, const LeafFn& g, double pexp);

// L2-orthogonal projection onto V_P (sparse normal equations).
FeFunction l2_projection(const NodeLattice& lat, const SpaceTimeFn& f);

}  // namespace aniso
