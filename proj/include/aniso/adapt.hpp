#pragma once

#include "aniso/besov.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace aniso {

struct AdaptOptions {
    MarkOptions mark;  // carries the norm parameters and polynomial orders
    RefineBudget budget;
    // Optional discrete Besov error of the residual, (alpha1, alpha2) = alpha_scale (s1, s2).
    bool besov_error = false;
    double alpha_scale = 0.5;
    int besov_scales = 3;
};

struct AdaptResult {
    std::unique_ptr<Partition> partition;
    std::unique_ptr<NodeLattice> lattice;
    std::unique_ptr<FeFunction> solution;  // pi_{rho,P}(f) on the final partition
    RefinementLedger ledger;
    std::size_t initial_leaves = 0;
    double error_lp = 0.0;
    double error_besov = 0.0;  // NaN unless requested
    bool heuristic = false;    // some local best approximation used a heuristic solver
    double seconds = 0.0;
    std::size_t indicator_evaluations = 0;

    std::size_t leaves() const { return partition->leaf_count(); }
};

// MARKED_REFINE with MARK(P) = {prism : mark_indicator > delta}, then pi_{rho,P}(f) and its errors.
// With neighbourhood degree 0 the indicators depend on the prism only and are cached by id.
AdaptResult greedy_adapt(const Partition& roots, const SpaceTimeFn& f, double delta, const AdaptOptions& options);

struct RatePoint {
    std::string kind;  // "adaptive" or "uniform"
    double delta = 0.0;  // NaN for uniform points
    int level = 0;       // ladder level for uniform points, max level for adaptive ones
    std::size_t leaves = 0;
    std::size_t added = 0;  // #P - #P_0
    double error_lp = 0.0;
    double error_besov = 0.0;
    double seconds = 0.0;
    RefineStatus status = RefineStatus::Converged;
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

// Least squares of log y against log x over the pairs with x, y > 0.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct RateStudy {
    std::vector<RatePoint> points;
    LogLogFit adaptive;
    LogLogFit uniform;
    double target_slope = 0.0;  // -1/(1/s1 + d/s2)
    bool valid = false;         // at least three converged adaptive points

    // Wall times vary between runs, so they are left out unless asked for.
    std::string to_csv(bool timings = false) const;
};

// One greedy run per delta (decreasing, geometric, >= 6 entries) and a uniform ladder up to
// `uniform_levels`; slopes fit the Lp error against #P - #P_0 over points with #P > #P_0.
RateStudy rate_study(const Partition& roots, const SpaceTimeFn& f, const std::vector<double>& deltas,
                     const AdaptOptions& options, int uniform_levels);

// delta_k = delta0 * factor^k, k = 0..count-1.
std::vector<double> geometric_schedule(double delta0, double factor, int count);

enum class MarkPolicy { Uniform, RandomFraction, CornerChasing, SingularLine, TemporalFront, Empty };

MarkPolicy parse_mark_policy(const std::string& name);
const char* to_string(MarkPolicy policy);

struct PolicyOptions {
    MarkPolicy policy = MarkPolicy::RandomFraction;
    double fraction = 0.1;    // RandomFraction
    std::uint64_t seed = 1;   // RandomFraction
};

// Marks of one round. CornerChasing marks the leaf at (T, upper spatial corner); SingularLine the
// leaves touching the lower spatial corner; TemporalFront the leaves touching t = t_begin.
std::vector<Id> policy_marks(const Partition& p, const PolicyOptions& options, std::uint64_t round);

struct ComplexityRow {
    int round = 0;
    std::size_t marked = 0;      // #M_{k-1}
    std::size_t cum_marked = 0;  // sum_{i<k} #M_i
    std::size_t leaves = 0;      // #P_k
    double ratio = 0.0;          // (#P_k - #P_0) / cum_marked, NaN while cum_marked = 0
};

struct ComplexityStudy {
    MarkPolicy policy = MarkPolicy::Uniform;
    std::vector<ComplexityRow> rows;  // row 0 is P_0
    double slope = 0.0;               // least-squares slope through the origin over all rounds
    double spread = 0.0;              // max/min - 1 of the slope fitted on rounds [0, k], k in [6, rounds]
    RefineStatus status = RefineStatus::Converged;

    std::string to_csv(bool header = true) const;
};

// Scripted MARKED_REFINE: empty mark sets do not stop the run. The final partition goes to `result`.
ComplexityStudy complexity_study(const Partition& roots, const PolicyOptions& options, int rounds,
                                 const RefineBudget& budget = {}, Partition* result = nullptr);

}  // namespace aniso
