#include "aniso/adapt.hpp"

#include "aniso/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace aniso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

const char* status_name(RefineStatus s) { return s == RefineStatus::Converged ? "converged" : "budget_exhausted"; }

std::pair<Point, Point> spatial_bounds(const Partition& p) {
    Point lo{kInf, kInf, kInf}, hi{-kInf, -kInf, -kInf};
    for (Id s : p.root_simplices())
        for (int v = 0; v <= p.dim(); ++v)
            for (int k = 0; k < p.dim(); ++k) {
                lo[k] = std::min(lo[k], p.simplex(s).vertices[v][k]);
                hi[k] = std::max(hi[k], p.simplex(s).vertices[v][k]);
            }
    for (int k = p.dim(); k < kMaxDim; ++k) lo[k] = hi[k] = 0.0;
    return {lo, hi};
}

}  // namespace

AdaptResult greedy_adapt(const Partition& roots, const SpaceTimeFn& f, double delta, const AdaptOptions& options) {
    if (!(delta > 0.0)) throw std::invalid_argument("greedy_adapt needs delta > 0");
    options.mark.norms.check();
    const auto start = std::chrono::steady_clock::now();

    AdaptResult out;
    out.partition = std::make_unique<Partition>(roots);
    out.initial_leaves = roots.leaf_count();
    const int degree = options.mark.degree < 0 ? default_neighborhood_degree(roots.dim()) : options.mark.degree;
    const bool cacheable = degree == 0;

    std::vector<double> cache;
    std::size_t evaluations = 0;
    const MarkFn mark = [&](const Partition& p) {
        const TouchIndex index(p);
        const std::vector<Id> leaves = p.leaves();
        if (!cacheable) cache.assign(p.prism_capacity(), kNaN);
        cache.resize(p.prism_capacity(), kNaN);
        std::vector<Id> todo;
        for (Id e : leaves)
            if (std::isnan(cache[e])) todo.push_back(e);
        parallel_for(todo.size(), [&](std::size_t i) {
            cache[todo[i]] = mark_indicator(p, index, f, todo[i], options.mark);
        });
        evaluations += todo.size();
        std::vector<Id> marked;
        for (Id e : leaves)
            if (cache[e] > delta) marked.push_back(e);
        return marked;
    };
    out.ledger = marked_refine(*out.partition, mark, options.budget);
    out.indicator_evaluations = evaluations;

    out.lattice = std::make_unique<NodeLattice>(NodeLattice::classify(*out.partition, options.mark.orders));
    QuasiInterpolant qi = quasi_interpolate(*out.lattice, f, options.mark.norms);
    out.heuristic = qi.heuristic;
    out.solution = std::make_unique<FeFunction>(std::move(qi.F));
    out.error_lp = global_error(f, *out.solution, options.mark.norms.p);
    out.error_besov = kNaN;
    if (options.besov_error) {
        const AnisotropyParams& s = roots.params();
        out.error_besov = besov_error(f, *out.solution, options.alpha_scale * s.s1, options.alpha_scale * s.s2,
                                      options.mark.norms.p, options.besov_scales);
    }
    out.seconds = seconds_since(start);
    return out;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    LogLogFit fit;
    fit.points = lx.size();
    if (lx.size() < 2) {
        fit.slope = fit.intercept = fit.r2 = kNaN;
        return fit;
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

std::vector<double> geometric_schedule(double delta0, double factor, int count) {
    if (!(delta0 > 0.0) || !(factor > 0.0 && factor < 1.0) || count < 1)
        throw std::invalid_argument("geometric schedule needs delta0 > 0, 0 < factor < 1 and count >= 1");
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(delta0 * std::pow(factor, k));
    return out;
}

RateStudy rate_study(const Partition& roots, const SpaceTimeFn& f, const std::vector<double>& deltas,
                     const AdaptOptions& options, int uniform_levels) {
    if (deltas.size() < 6) throw std::invalid_argument("a rate study needs at least 6 schedule points");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw std::invalid_argument("the delta schedule must be decreasing");
    const AnisotropyParams& s = roots.params();

    RateStudy study;
    study.target_slope = -s.rate_exponent();
    std::vector<double> ax, ay;
    for (double delta : deltas) {
        const AdaptResult r = greedy_adapt(roots, f, delta, options);
        RatePoint pt{"adaptive", delta, r.partition->max_level(), r.leaves(), r.leaves() - r.initial_leaves,
                     r.error_lp, r.error_besov, r.seconds, r.ledger.status};
        study.points.push_back(pt);
        if (pt.status == RefineStatus::Converged) {
            ax.push_back(static_cast<double>(pt.added));
            ay.push_back(pt.error_lp);
        }
    }
    study.adaptive = fit_loglog(ax, ay);
    study.valid = study.adaptive.points >= 3;

    std::vector<double> ux, uy;
    Partition part = roots;
    for (int level = 0; level <= uniform_levels; ++level) {
        const auto start = std::chrono::steady_clock::now();
        if (level > 0) uniform_round(part, level);
        if (part.leaf_count() > options.budget.max_leaves) break;
        const NodeLattice lat = NodeLattice::classify(part, options.mark.orders);
        const FeFunction F = quasi_interpolate(lat, f, options.mark.norms).F;
        RatePoint pt{"uniform", kNaN, level, part.leaf_count(), part.leaf_count() - roots.leaf_count(),
                     global_error(f, F, options.mark.norms.p), kNaN, 0.0, RefineStatus::Converged};
        if (options.besov_error)
            pt.error_besov = besov_error(f, F, options.alpha_scale * s.s1, options.alpha_scale * s.s2,
                                         options.mark.norms.p, options.besov_scales);
        pt.seconds = seconds_since(start);
        study.points.push_back(pt);
        ux.push_back(static_cast<double>(pt.added));
        uy.push_back(pt.error_lp);
    }
    study.uniform = fit_loglog(ux, uy);
    return study;
}

std::string RateStudy::to_csv(bool timings) const {
    std::string out = timings ? "kind,delta,level,leaves,added,error_lp,error_besov,status,seconds\n"
                              : "kind,delta,level,leaves,added,error_lp,error_besov,status\n";
    for (const RatePoint& p : points) {
        out += fmt::format("{},{},{},{},{},{},{},{}", p.kind, num(p.delta), p.level, p.leaves, p.added, num(p.error_lp),
                           num(p.error_besov), status_name(p.status));
        out += timings ? fmt::format(",{}\n", num(p.seconds)) : std::string("\n");
    }
    for (const auto& [kind, fit] : {std::pair{"adaptive", adaptive}, std::pair{"uniform", uniform}})
        out += fmt::format("fit,{},{},{},{},{},{}\n", kind, num(fit.slope), num(fit.intercept), num(fit.r2), fit.points,
                           num(target_slope));
    return out;
}

MarkPolicy parse_mark_policy(const std::string& name) {
    for (MarkPolicy p : {MarkPolicy::Uniform, MarkPolicy::RandomFraction, MarkPolicy::CornerChasing,
                         MarkPolicy::SingularLine, MarkPolicy::TemporalFront, MarkPolicy::Empty})
        if (name == to_string(p)) return p;
    throw std::invalid_argument(fmt::format("unknown marking policy '{}'", name));
}

const char* to_string(MarkPolicy policy) {
    switch (policy) {
        case MarkPolicy::Uniform: return "uniform";
        case MarkPolicy::RandomFraction: return "random";
        case MarkPolicy::CornerChasing: return "corner";
        case MarkPolicy::SingularLine: return "singular-line";
        case MarkPolicy::TemporalFront: return "temporal-front";
        case MarkPolicy::Empty: return "empty";
    }
    return "?";
}

std::vector<Id> policy_marks(const Partition& p, const PolicyOptions& options, std::uint64_t round) {
    std::vector<Id> leaves = p.leaves();
    std::vector<Id> out;
    switch (options.policy) {
        case MarkPolicy::Uniform:
            return leaves;
        case MarkPolicy::Empty:
            return {};
        case MarkPolicy::RandomFraction: {
            const auto k = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(options.fraction * static_cast<double>(leaves.size()))));
            std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ULL * round);
            std::sample(leaves.begin(), leaves.end(), std::back_inserter(out), k, rng);
            return out;
        }
        case MarkPolicy::CornerChasing:
            return {p.locate(p.t_end(), spatial_bounds(p).second)};
        case MarkPolicy::SingularLine: {
            const Point corner = spatial_bounds(p).first;
            for (Id e : leaves)
                if (simplex_contains_point(p.simplex_of(e), corner)) out.push_back(e);
            return out;
        }
        case MarkPolicy::TemporalFront:
            for (Id e : leaves)
                if (p.interval_of(e).lo == p.t_begin()) out.push_back(e);
            return out;
    }
    return out;
}

ComplexityStudy complexity_study(const Partition& roots, const PolicyOptions& options, int rounds,
                                 const RefineBudget& budget, Partition* result) {
    if (rounds < 1) throw std::invalid_argument("complexity study needs at least one round");
    Partition p = roots;
    ComplexityStudy study;
    study.policy = options.policy;
    const std::size_t p0 = p.leaf_count();
    study.rows.push_back(ComplexityRow{0, 0, 0, p0, kNaN});
    std::size_t cum = 0;
    for (int k = 1; k <= rounds; ++k) {
        const std::vector<Id> marked = policy_marks(p, options, static_cast<std::uint64_t>(k));
        bool over = false;
        for (Id m : marked) {
            if (!p.is_leaf(m)) continue;
            if (p.prism(m).level + 1 > budget.max_level || p.leaf_count() > budget.max_leaves) {
                over = true;
                break;
            }
            patch_refine(p, m);
        }
        cum += marked.size();
        const double ratio = cum == 0 ? kNaN : static_cast<double>(p.leaf_count() - p0) / static_cast<double>(cum);
        study.rows.push_back(ComplexityRow{k, marked.size(), cum, p.leaf_count(), ratio});
        if (over) {
            study.status = RefineStatus::BudgetExhausted;
            break;
        }
    }
    // slope of the fit over rounds 0..k, refitted for every k; its drift over k >= 6 is the spread
    double sxy = 0.0, sxx = 0.0, lo = kInf, hi = 0.0;
    for (const ComplexityRow& r : study.rows) {
        sxy += static_cast<double>(r.cum_marked) * static_cast<double>(r.leaves - p0);
        sxx += static_cast<double>(r.cum_marked) * static_cast<double>(r.cum_marked);
        if (r.round >= 6 && sxx > 0.0) {
            lo = std::min(lo, sxy / sxx);
            hi = std::max(hi, sxy / sxx);
        }
    }
    study.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    study.spread = lo <= hi ? hi / lo - 1.0 : 0.0;
    if (result) *result = std::move(p);
    return study;
}

std::string ComplexityStudy::to_csv(bool header) const {
    std::string out = header ? "policy,round,marked,cum_marked,leaves,ratio\n" : "";
    for (const ComplexityRow& r : rows)
        out += fmt::format("{},{},{},{},{},{}\n", to_string(policy), r.round, r.marked, r.cum_marked, r.leaves,
                           num(r.ratio));
    return out;
}

}  // namespace aniso
