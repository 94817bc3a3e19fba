#include "aniso/besov.hpp"

#include "aniso/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace aniso {

Cylinder Cylinder::of_region(const Partition& p, const std::vector<Id>& leaves) {
    if (leaves.empty()) throw std::invalid_argument("empty region");
    Cylinder c;
    c.dim = p.dim();
    c.lo = kInf;
    c.hi = -kInf;
    std::set<Id> ids;
    for (Id e : leaves) {
        c.lo = std::min(c.lo, p.interval_of(e).lo);
        c.hi = std::max(c.hi, p.interval_of(e).hi);
        ids.insert(p.prism(e).simplex);
    }
    for (Id s : ids) {
        bool covered = false;
        for (Id a : ids) covered = covered || (a != s && p.simplex_contains(a, s));
        if (!covered) c.simplices.push_back(p.simplex(s));
    }
    return c;
}

Cylinder Cylinder::domain(const Partition& p) {
    Cylinder c;
    c.dim = p.dim();
    c.lo = p.t_begin();
    c.hi = p.t_end();
    for (Id s : p.root_simplices()) c.simplices.push_back(p.simplex(s));
    return c;
}

double Cylinder::space_measure() const {
    double m = 0.0;
    for (const auto& s : simplices) m += simplex_measure(s);
    return m;
}

namespace {

struct SpaceFrame {
    Point v0{};
    std::array<Point, kMaxDim> inverse{};
};

SpaceFrame space_frame(const TaggedSimplex& s) {
    const PrismFrame f = PrismFrame::of(TimeInterval{}, s);
    return SpaceFrame{f.v0, f.inverse};
}

bool inside(const SpaceFrame& f, int d, const Point& x) {
    constexpr double tol = 1e-12;
    double rest = 1.0;
    for (int r = 0; r < d; ++r) {
        double l = 0.0;
        for (int c = 0; c < d; ++c) l += f.inverse[r][c] * (x[c] - f.v0[c]);
        if (l < -tol) return false;
        rest -= l;
    }
    return rest >= -tol;
}

// Composite spatial samples of R and a membership test.
class SpaceSamples {
public:
    SpaceSamples(const Cylinder& D, const ModulusSampling& s) : d_(D.dim) {
        const int m = 1 << s.space_levels;
        const auto rule = simplex_rule(d_, s.space_degree);
        for (const auto& spx : D.simplices) {
            frames_.push_back(space_frame(spx));
            const double sub = simplex_measure(spx) / (d_ == 1 ? m : m * m) / reference_simplex_measure(d_);
            auto map = [&](const std::array<Point, 3>& c) {
                for (const auto& q : rule) {
                    // barycentric point of the sub-simplex with corners c (in reference coordinates)
                    Point xh{};
                    for (int k = 0; k < d_; ++k) {
                        xh[k] = c[0][k];
                        for (int j = 0; j < d_; ++j) xh[k] += q.xhat[j] * (c[j + 1][k] - c[0][k]);
                    }
                    Point x = spx.vertices[0];
                    for (int j = 0; j < d_; ++j)
                        for (int k = 0; k < d_; ++k) x[k] += xh[j] * (spx.vertices[j + 1][k] - spx.vertices[0][k]);
                    points_.push_back(x);
                    weights_.push_back(q.w * sub);
                }
            };
            const double h = 1.0 / m;
            if (d_ == 1) {
                for (int i = 0; i < m; ++i) map({Point{i * h, 0, 0}, Point{(i + 1) * h, 0, 0}, Point{}});
            } else {
                for (int i = 0; i < m; ++i)
                    for (int j = 0; i + j < m; ++j) {
                        map({Point{i * h, j * h, 0}, Point{(i + 1) * h, j * h, 0}, Point{i * h, (j + 1) * h, 0}});
                        if (i + j + 1 < m)
                            map({Point{(i + 1) * h, (j + 1) * h, 0}, Point{i * h, (j + 1) * h, 0},
                                 Point{(i + 1) * h, j * h, 0}});
                    }
            }
        }
    }

    bool contains(const Point& x) const {
        for (const auto& f : frames_)
            if (inside(f, d_, x)) return true;
        return false;
    }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    int d_;
    std::vector<SpaceFrame> frames_;
    std::vector<Point> points_;
    std::vector<double> weights_;
};

// Time samples of [lo, hi]: composite Gauss-Legendre, or the dyadic lattice of `grid` for sup norms.
void time_samples(double lo, double hi, double grid_lo, double grid_hi, double pexp, const ModulusSampling& s,
                  std::vector<double>& t, std::vector<double>& w) {
    t.clear();
    w.clear();
    if (!(hi > lo)) return;
    if (std::isinf(pexp)) {
        const int m = 1 << s.sup_level;
        const double step = (grid_hi - grid_lo) / m;
        for (int i = 0; i <= m; ++i) {
            const double ti = grid_lo + i * step;
            if (ti >= lo - 1e-14 * step && ti <= hi + 1e-9 * step) {
                t.push_back(std::min(std::max(ti, lo), hi));
                w.push_back(1.0);
            }
        }
        return;
    }
    const auto g = gauss_legendre(s.time_points);
    const double cell = (hi - lo) / s.time_cells;
    for (int c = 0; c < s.time_cells; ++c)
        for (const auto& [x, wx] : g) {
            t.push_back(lo + (c + x) * cell);
            w.push_back(wx * cell);
        }
}

double binomial(int n, int k) {
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v = v * (n - k + j) / j;
    return v;
}

}  // namespace

bool Cylinder::contains_space(const Point& x) const {
    for (const auto& s : simplices)
        if (inside(space_frame(s), dim, x)) return true;
    return false;
}

std::vector<Point> modulus_shifts(Direction dir, int d, double delta) {
    std::vector<Point> out;
    if (dir == Direction::Time || d == 1) {
        for (int k = 1; k <= 16; ++k) out.push_back(Point{delta * k / 16.0, 0, 0});
        return out;
    }
    for (int i = 0; i < 8; ++i) {
        const double a = std::numbers::pi * i / 8.0;
        for (int m = 1; m <= 4; ++m) out.push_back(Point{delta * m / 4.0 * std::cos(a), delta * m / 4.0 * std::sin(a), 0});
    }
    return out;
}

double forward_difference(const SpaceTimeFn& f, double t, const Point& x, Direction dir, const Point& h, int r) {
    double acc = 0.0;
    for (int j = 0; j <= r; ++j) {
        const double c = ((r - j) % 2 ? -1.0 : 1.0) * binomial(r, j);
        if (dir == Direction::Time) {
            acc += c * f(t + j * h[0], x);
        } else {
            Point y = x;
            for (int k = 0; k < kMaxDim; ++k) y[k] += j * h[k];
            acc += c * f(t, y);
        }
    }
    return acc;
}

std::vector<double> shift_norms(const SpaceTimeFn& f, const Cylinder& D, Direction dir, int r, double delta,
                                double pexp, const ModulusSampling& sampling) {
    if (delta < 0.0) throw std::invalid_argument("negative modulus scale");
    if (delta == 0.0) return {};
    const bool sup = std::isinf(pexp);
    const SpaceSamples space(D, sampling);
    const auto& xs = space.points();
    const auto& wx = space.weights();
    std::vector<double> ts, wt;
    std::vector<double> out;
    if (dir == Direction::Space) time_samples(D.lo, D.hi, D.lo, D.hi, pexp, sampling, ts, wt);
    for (const Point& h : modulus_shifts(dir, D.dim, delta)) {
        std::vector<char> mask(xs.size(), 1);
        if (dir == Direction::Time) {
            time_samples(D.lo, D.hi - r * h[0], D.lo, D.hi, pexp, sampling, ts, wt);
        } else {
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (int j = 1; j <= r && mask[i]; ++j) {
                    Point y = xs[i];
                    for (int k = 0; k < D.dim; ++k) y[k] += j * h[k];
                    mask[i] = space.contains(y);
                }
        }
        double acc = 0.0;
        for (std::size_t a = 0; a < ts.size(); ++a)
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (!mask[i]) continue;
                const double v = std::abs(forward_difference(f, ts[a], xs[i], dir, h, r));
                acc = sup ? std::max(acc, v) : acc + wt[a] * wx[i] * std::pow(v, pexp);
            }
        out.push_back(sup ? acc : std::pow(acc, 1.0 / pexp));
    }
    return out;
}

double modulus(const SpaceTimeFn& f, const Cylinder& D, Direction dir, int r, double delta, double pexp,
               const ModulusSampling& sampling) {
    const std::vector<double> norms = shift_norms(f, D, dir, r, delta, pexp, sampling);
    return norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
}

double averaged_modulus(const SpaceTimeFn& f, const Cylinder& D, Direction dir, int r, double delta, double pexp,
                        const ModulusSampling& sampling) {
    const std::vector<double> norms = shift_norms(f, D, dir, r, delta, pexp, sampling);
    if (norms.empty()) return 0.0;
    if (std::isinf(pexp)) return *std::max_element(norms.begin(), norms.end());
    double acc = 0.0;
    for (double v : norms) acc += std::pow(v, pexp);
    return std::pow(acc / norms.size(), 1.0 / pexp);
}

std::string BesovEstimate::to_csv() const {
    std::string out = "scale_n,delta_t,delta_x,omega_t,omega_x\n";
    for (const auto& s : scales)
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.n, s.delta_t, s.delta_x, s.omega_t, s.omega_x);
    out += fmt::format("summary,{:.17g},{:.17g},{:.17g},{:.17g}\n", seminorm, tail, p, q);
    return out;
}

BesovEstimate discrete_seminorm(const SpaceTimeFn& f, const Cylinder& D, double p, double q, double s1, double s2,
                                PolyOrders orders, int N, const ModulusSampling& sampling) {
    if (N < 0) throw std::invalid_argument("negative scale count");
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("smoothness parameters must be positive");
    BesovEstimate est;
    est.p = p;
    est.q = q;
    est.s1 = s1;
    est.s2 = s2;
    est.r1 = orders.r1;
    est.r2 = orders.r2;
    est.sampling = sampling;
    const int d = D.dim;
    est.scales.resize(N + 1);
    parallel_for(N + 1, [&](std::size_t i) {
        const int n = static_cast<int>(i);
        BesovScale& s = est.scales[i];
        s.n = n;
        s.delta_t = std::pow(2.0, -n * s2 / (s1 * d));
        s.delta_x = std::pow(2.0, -static_cast<double>(n) / d);
        s.omega_t = modulus(f, D, Direction::Time, orders.r1, s.delta_t, p, sampling);
        s.omega_x = modulus(f, D, Direction::Space, orders.r2, s.delta_x, p, sampling);
    });
    std::vector<double> terms;
    for (const auto& s : est.scales) {
        const double w = std::pow(2.0, s.n * s2 / d);
        terms.push_back(std::isinf(q) ? w * (s.omega_t + s.omega_x)
                                      : std::pow(w, q) * (std::pow(s.omega_t, q) + std::pow(s.omega_x, q)));
    }
    if (std::isinf(q)) {
        est.seminorm = *std::max_element(terms.begin(), terms.end());
        est.tail = N >= 1 && terms[N] >= terms[N - 1] && terms[N] > 0.0 ? kInf : 0.0;
        return est;
    }
    double sum = 0.0;
    for (double v : terms) sum += v;
    est.seminorm = std::pow(sum, 1.0 / q);
    if (N >= 1 && terms[N - 1] > 0.0) {
        const double ratio = terms[N] / terms[N - 1];
        est.tail = ratio < 1.0 ? std::pow(sum + terms[N] * ratio / (1.0 - ratio), 1.0 / q) - est.seminorm : kInf;
    }
    return est;
}

RefinementLedger uniform_round(Partition& p, int target_level) {
    RefineBudget budget;
    budget.max_rounds = 1000;
    budget.max_leaves = static_cast<std::size_t>(-1);
    budget.max_level = std::max(budget.max_level, target_level);
    return marked_refine(
        p,
        [target_level](const Partition& q) {
            std::vector<Id> out;
            for (Id e : q.leaves())
                if (q.prism(e).level < target_level) out.push_back(e);
            return out;
        },
        budget);
}

MultiscaleLadder multiscale_norms(const SpaceTimeFn& f, const Partition& roots, double alpha1, double alpha2,
                                  const NormParams& params, PolyOrders orders, int N) {
    params.check();
    if (N < 0) throw std::invalid_argument("negative ladder depth");
    const AnisotropyParams& s = roots.params();
    const double cross = alpha1 * s.s2 - alpha2 * s.s1;
    if (std::abs(cross) > 1e-12 * (std::abs(alpha1 * s.s2) + std::abs(alpha2 * s.s1)))
        throw std::invalid_argument(
            fmt::format("(alpha1, alpha2) = ({}, {}) is not collinear with (s1, s2) = ({}, {})", alpha1, alpha2, s.s1, s.s2));
    const int d = roots.dim();
    const double pexp = params.p;
    const double qexp = params.q;

    MultiscaleLadder out;
    out.alpha1 = alpha1;
    out.alpha2 = alpha2;
    std::unique_ptr<NodeLattice> prev_lat;
    std::unique_ptr<FeFunction> prev;
    for (int n = 0; n <= N; ++n) {
        auto part = std::make_unique<Partition>(n == 0 ? roots : *out.partitions.back());
        if (n > 0) uniform_round(*part, n);
        auto lat = std::make_unique<NodeLattice>(NodeLattice::classify(*part, orders));
        auto pi = std::make_unique<FeFunction>(quasi_interpolate(*lat, f, params).F);

        LadderLevel lv;
        lv.n = n;
        lv.leaves = part->leaf_count();
        lv.hanging = lat->hanging_nodes().size();
        const FeFunction* cur = pi.get();
        const FeFunction* old = prev.get();
        lv.delta_norm = lp_norm(
            *lat, [&](Id leaf, double t, const Point& x) { return cur->eval_on(leaf, t, x) - (old ? (*old)(t, x) : 0.0); },
            pexp);
        lv.pi_error = global_error(f, *pi, pexp);
        lv.best_error = pexp == 2.0 ? global_error(f, l2_projection(*lat, f), 2.0) : lv.pi_error;
        if (n == 0) out.lp_norm = lp_norm(*lat, [&](Id, double t, const Point& x) { return f(t, x); }, pexp);
        out.levels.push_back(lv);

        out.partitions.push_back(std::move(part));
        // the previous interpolant must not outlive its lattice
        prev.reset();
        prev_lat = std::move(lat);
        prev = std::move(pi);
    }

    auto combine = [&](auto value) {
        double acc = 0.0;
        for (const auto& lv : out.levels) {
            const double w = std::pow(2.0, alpha2 / d * lv.n);
            acc = std::isinf(qexp) ? std::max(acc, w * value(lv)) : acc + std::pow(w * value(lv), qexp);
        }
        return std::isinf(qexp) ? acc : std::pow(acc, 1.0 / qexp);
    };
    out.norm_delta = combine([](const LadderLevel& l) { return l.delta_norm; });
    out.norm_pi = combine([](const LadderLevel& l) { return l.pi_error; }) + out.lp_norm;
    out.norm_e = combine([](const LadderLevel& l) { return l.best_error; }) + out.lp_norm;
    return out;
}

MarkMode parse_mark_mode(const std::string& name) {
    if (name == "oracle") return MarkMode::Oracle;
    if (name == "whitney") return MarkMode::Whitney;
    if (name == "moduli") return MarkMode::Moduli;
    throw std::invalid_argument(fmt::format("unknown mark mode '{}'", name));
}

const char* to_string(MarkMode mode) {
    switch (mode) {
        case MarkMode::Oracle: return "oracle";
        case MarkMode::Whitney: return "whitney";
        case MarkMode::Moduli: return "moduli";
    }
    return "?";
}

int default_neighborhood_degree(int d) { return d == 1 ? 2 : 3; }

std::vector<Id> indicator_region(const Partition& p, const TouchIndex& index, Id prism, int degree) {
    if (degree < 0) degree = default_neighborhood_degree(p.dim());
    if (degree == 0) return {prism};
    return cylindric_closure(p, index, neighborhood(p, index, prism, degree)).members;
}

double indicator_scale(const Partition& p, Id prism, const NormParams& norms) {
    const AnisotropyParams& s = p.params();
    const double inv_q = std::isinf(norms.q) ? 0.0 : 1.0 / norms.q;
    const double inv_p = std::isinf(norms.p) ? 0.0 : 1.0 / norms.p;
    return std::pow(prism_measure(p.interval_of(prism), p.simplex_of(prism)), s.rate_exponent() - inv_q + inv_p);
}

double mark_indicator(const Partition& p, const TouchIndex& index, const SpaceTimeFn& f, Id prism,
                      const MarkOptions& options) {
    const std::vector<Id> region = indicator_region(p, index, prism, options.degree);
    switch (options.mode) {
        case MarkMode::Whitney:
            return best_approx_local(f, p, region, options.norms.p, options.orders).error;
        case MarkMode::Oracle:
            if (!options.oracle) throw std::invalid_argument("oracle mark mode needs an analytic seminorm");
            return indicator_scale(p, prism, options.norms) * options.oracle(Cylinder::of_region(p, region));
        case MarkMode::Moduli: {
            const AnisotropyParams& s = p.params();
            const BesovEstimate est = discrete_seminorm(f, Cylinder::of_region(p, region), options.norms.q, options.norms.q,
                                                        s.s1, s.s2, options.orders, options.scales, options.sampling);
            return indicator_scale(p, prism, options.norms) * est.seminorm;
        }
    }
    throw std::invalid_argument("unknown mark mode");
}

double besov_error(const SpaceTimeFn& f, const FeFunction& F, double alpha1, double alpha2, double p, int N,
                   const ModulusSampling& sampling) {
    const Partition& part = F.lattice().partition();
    const Cylinder D = Cylinder::domain(part);
    Point centre{};
    for (const auto& s : D.simplices)
        for (int v = 0; v <= D.dim; ++v)
            for (int k = 0; k < D.dim; ++k) centre[k] += s.vertices[v][k] / ((D.dim + 1) * D.simplices.size());
    const SpaceTimeFn residual = [&](double t, const Point& x) {
        try {
            return f(t, x) - F(t, x);
        } catch (const std::out_of_range&) {
            // shifted samples may sit a rounding error outside the domain
            Point y = x;
            for (int k = 0; k < D.dim; ++k) y[k] += 1e-9 * (centre[k] - x[k]);
            return f(t, x) - F(std::clamp(t, D.lo, D.hi), y);
        }
    };
    return discrete_seminorm(residual, D, p, p, alpha1, alpha2, F.lattice().orders(), N, sampling)
        .seminorm;
}

}  // namespace aniso
