#pragma once

#include "aniso/geometry.hpp"

#include <utility>
#include <vector>

namespace aniso {

// Gauss-Legendre nodes and weights on [0,1]; exact for degree 2n-1.
std::vector<std::pair<double, double>> gauss_legendre(int n);

struct SimplexPoint {
    Point xhat{};
    double w = 0.0;
};

// Collapsed Gauss rule on the reference simplex, exact for total degree `degree`. Weights sum to 1/d!.
std::vector<SimplexPoint> simplex_rule(int d, int degree);

struct QuadraturePoint {
    double tau = 0.0;
    Point xhat{};
    double w = 0.0;
};

// Tensor rule on [0,1] x S_hat.
struct QuadratureRule {
    int dim = 1;
    int time_degree = 0;
    int space_degree = 0;
    std::vector<QuadraturePoint> points;

    static QuadratureRule prism(int d, int time_degree, int space_degree);
    // |[0,1] x S_hat| = 1/d!
    double reference_measure() const;
};

// Equispaced sample set of [0,1] x S_hat with nt+1 time layers and the order-ns simplex lattice;
// weights are 1. Used for sup-norm estimates.
QuadratureRule sample_lattice(int d, int nt, int ns);

double reference_simplex_measure(int d);

}  // namespace aniso
