#include "aniso/quadrature.hpp"

#include "aniso/reference_element.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aniso {

std::vector<std::pair<double, double>> gauss_legendre(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("Gauss-Legendre point count out of range");
    std::vector<std::pair<double, double>> out(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess; converges in a handful of steps
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
    }
    return out;
}

double reference_simplex_measure(int d) { return d == 1 ? 1.0 : (d == 2 ? 0.5 : 1.0 / 6.0); }

std::vector<SimplexPoint> simplex_rule(int d, int degree) {
    if (degree < 0) throw std::invalid_argument("negative quadrature degree");
    std::vector<SimplexPoint> out;
    if (d == 1) {
        for (const auto& [x, w] : gauss_legendre(degree / 2 + 1)) out.push_back({Point{x, 0, 0}, w});
        return out;
    }
    if (d != 2) throw std::invalid_argument("simplex rules are implemented for d <= 2");
    // x = u, y = (1-u) v; the Jacobian (1-u) raises the u-degree by one
    const auto gu = gauss_legendre((degree + 1) / 2 + 1);
    const auto gv = gauss_legendre(degree / 2 + 1);
    for (const auto& [u, wu] : gu)
        for (const auto& [v, wv] : gv) out.push_back({Point{u, (1.0 - u) * v, 0}, wu * wv * (1.0 - u)});
    return out;
}

QuadratureRule QuadratureRule::prism(int d, int time_degree, int space_degree) {
    QuadratureRule r;
    r.dim = d;
    r.time_degree = time_degree;
    r.space_degree = space_degree;
    const auto gt = gauss_legendre(time_degree / 2 + 1);
    const auto gs = simplex_rule(d, space_degree);
    r.points.reserve(gt.size() * gs.size());
    for (const auto& [tau, wt] : gt)
        for (const auto& s : gs) r.points.push_back({tau, s.xhat, wt * s.w});
    return r;
}

double QuadratureRule::reference_measure() const { return reference_simplex_measure(dim); }

QuadratureRule sample_lattice(int d, int nt, int ns) {
    QuadratureRule r;
    r.dim = d;
    const auto alpha = simplex_multi_indices(d, ns);
    for (int i = 0; i <= nt; ++i)
        for (const auto& a : alpha) {
            Point x{};
            for (int k = 0; k < d; ++k) x[k] = static_cast<double>(a[k]) / ns;
            r.points.push_back({static_cast<double>(i) / nt, x, 1.0});
        }
    return r;
}

}  // namespace aniso
