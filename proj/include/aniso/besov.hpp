#pragma once

#include "aniso/polyapprox.hpp"
#include "aniso/refine.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace aniso {

// J x R with J = [lo, hi] and R a union of simplices with disjoint interiors.
struct Cylinder {
    int dim = 1;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<TaggedSimplex> simplices;

    // Time hull of the leaves times the union of their simplices; nested simplices collapse to the coarsest.
    static Cylinder of_region(const Partition& p, const std::vector<Id>& leaves);
    static Cylinder domain(const Partition& p);
    double space_measure() const;
    double measure() const { return (hi - lo) * space_measure(); }
    bool contains_space(const Point& x) const;
};

enum class Direction { Time, Space };

// Sampling density of the modulus estimator. Time norms integrate exactly-shrunken intervals with
// composite Gauss-Legendre; space norms use composite Gauss points on each simplex refined
// `space_levels` times (2^levels pieces per axis), masked to the shrunken domain. Sup norms use a
// dyadic lattice of 2^sup_level + 1 times and the same spatial points.
struct ModulusSampling {
    int time_cells = 8;
    int time_points = 4;
    int space_levels = 2;
    int space_degree = 5;
    int sup_level = 10;
};

// Shifts tried for a given delta: time h = delta k/16, k = 1..16; space d=1 the same magnitudes,
// d=2 eight directions in [0, pi) times magnitudes delta m/4, m = 1..4.
std::vector<Point> modulus_shifts(Direction dir, int d, double delta);

// r-th forward difference of f along the shift.
double forward_difference(const SpaceTimeFn& f, double t, const Point& x, Direction dir, const Point& h, int r);

// omega_{r,dir}(f, D, delta)_p: max over the shift lattice of the L_p norm of the r-th difference
// on the shrunken domain.
double modulus(const SpaceTimeFn& f, const Cylinder& D, Direction dir, int r, double delta, double pexp,
               const ModulusSampling& sampling = {});

// L_p norms of the r-th difference on the shrunken domain, one per shift of modulus_shifts.
std::vector<double> shift_norms(const SpaceTimeFn& f, const Cylinder& D, Direction dir, int r, double delta,
                                double pexp, const ModulusSampling& sampling = {});

// Averaged modulus w_{r,dir}(f, D, delta)_p: the l_p mean of shift_norms over the shift lattice.
double averaged_modulus(const SpaceTimeFn& f, const Cylinder& D, Direction dir, int r, double delta, double pexp,
                        const ModulusSampling& sampling = {});

struct BesovScale {
    int n = 0;
    double delta_t = 0.0;  // 2^{-n s2/(s1 d)}
    double delta_x = 0.0;  // 2^{-n/d}
    double omega_t = 0.0;
    double omega_x = 0.0;
};

struct BesovEstimate {
    std::vector<BesovScale> scales;
    double seminorm = 0.0;
    double tail = 0.0;  // geometric extrapolation of the truncated terms, inf if they do not decay
    double p = 2.0, q = 2.0, s1 = 1.0, s2 = 1.0;
    int r1 = 2, r2 = 2;
    ModulusSampling sampling;

    // `scale_n,delta_t,delta_x,omega_t,omega_x` rows and a closing `summary,seminorm,tail,p,q` row.
    std::string to_csv() const;
};

// The equivalent discrete quasi-seminorm truncated after scale N.
BesovEstimate discrete_seminorm(const SpaceTimeFn& f, const Cylinder& D, double p, double q, double s1, double s2,
                                PolyOrders orders, int N, const ModulusSampling& sampling = {});

struct LadderLevel {
    int n = 0;
    std::size_t leaves = 0;
    std::size_t hanging = 0;
    double delta_norm = 0.0;  // ||Delta_n f||_p
    double pi_error = 0.0;    // ||f - pi_n f||_p
    double best_error = 0.0;  // E(f, V_{P_n})_p surrogate
};

struct MultiscaleLadder {
    std::vector<LadderLevel> levels;
    std::vector<std::unique_ptr<Partition>> partitions;  // P_0 .. P_N
    double norm_delta = 0.0;
    double norm_pi = 0.0;
    double norm_e = 0.0;
    double lp_norm = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0;
};

// P_n by all-mark rounds from `roots`; pi_n = pi_{rho,P_n}. (alpha1, alpha2) must be a multiple of
// (s1, s2) of the roots. E uses the exact L2 projection for p = 2 and pi_n otherwise.
MultiscaleLadder multiscale_norms(const SpaceTimeFn& f, const Partition& roots, double alpha1, double alpha2,
                                  const NormParams& params, PolyOrders orders, int N);

// One all-mark round: every leaf of level < target is refined. Returns the round's ledger.
RefinementLedger uniform_round(Partition& p, int target_level);

enum class MarkMode { Oracle, Whitney, Moduli };

MarkMode parse_mark_mode(const std::string& name);
const char* to_string(MarkMode mode);

// Analytic local seminorm |f|_{B^{s1,s2}_{q,q}(J x R)} supplied by the caller.
using OracleSeminorm = std::function<double(const Cylinder& region)>;

struct MarkOptions {
    MarkMode mode = MarkMode::Whitney;
    NormParams norms;
    PolyOrders orders;
    int degree = -1;        // neighbourhood degree of the region; -1 selects j(d)
    int scales = 4;         // N for the moduli mode
    ModulusSampling sampling{4, 3, 1, 4, 6};
    OracleSeminorm oracle;
};

int default_neighborhood_degree(int d);

// Region of the indicator: the cylindric closure of the degree-j neighbourhood (the prism for j = 0).
std::vector<Id> indicator_region(const Partition& p, const TouchIndex& index, Id prism, int degree);

// |I x S|^{1/(1/s1+d/s2) - 1/q + 1/p}
double indicator_scale(const Partition& p, Id prism, const NormParams& norms);

// Oracle / moduli: scaled local seminorm. Whitney: E(f, Pi, region)_p unscaled.
double mark_indicator(const Partition& p, const TouchIndex& index, const SpaceTimeFn& f, Id prism,
                      const MarkOptions& options);

// Residual seminorm |f - F|_{B^{alpha1,alpha2}_{p,p}(Omega_T)} by the discrete estimator.
double besov_error(const SpaceTimeFn& f, const FeFunction& F, double alpha1, double alpha2, double p, int N,
                   const ModulusSampling& sampling = {});

}  // namespace aniso
