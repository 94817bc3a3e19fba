#pragma once

#include "aniso/geometry.hpp"

#include <array>
#include <vector>

namespace aniso {

// Temporal order r1 and spatial order r2 (polynomial degrees r1-1 and r2-1).
struct PolyOrders {
    int r1 = 2;
    int r2 = 2;

    void check() const;
};

// Multi-indices alpha in N_0^d with |alpha| <= m, lexicographic.
std::vector<std::array<int, kMaxDim>> simplex_multi_indices(int d, int m);
std::size_t simplex_lattice_size(int d, int m);

// Lagrange basis of Pi^{r1}([0,1]) x Pi^{r2}(S_hat) on the equispaced lattice, time-major.
class ReferenceElement {
public:
    ReferenceElement() = default;
    ReferenceElement(int d, PolyOrders orders);

    int dim() const { return d_; }
    const PolyOrders& orders() const { return orders_; }
    int size() const { return nt_ * ns_; }
    int time_size() const { return nt_; }
    int space_size() const { return ns_; }
    double time_node(int i) const { return static_cast<double>(i) / (orders_.r1 - 1); }
    const std::array<int, kMaxDim>& space_index(int a) const { return alpha_[a]; }
    Point space_node(int a) const;
    // local index of (time node i, spatial node a)
    int index(int i, int a) const { return i * ns_ + a; }

    void eval_time(double tau, double* out) const;
    void eval_space(const Point& xhat, double* out) const;
    // all size() basis values at (tau, xhat)
    void eval(double tau, const Point& xhat, double* out) const;

private:
    int d_ = 1;
    PolyOrders orders_;
    int nt_ = 0;
    int ns_ = 0;
    std::vector<std::array<int, kMaxDim>> alpha_;
};

// Affine frame of a prism: (tau, xhat) in [0,1] x S_hat  <->  (t, x) in I x S.
struct PrismFrame {
    int dim = 1;
    double lo = 0.0;
    double len = 1.0;
    Point v0{};
    std::array<Point, kMaxDim> edges{};  // columns x_k - x_0
    std::array<Point, kMaxDim> inverse{};  // rows of the inverse edge matrix
    double measure = 0.0;  // |I x S|

    static PrismFrame of(const TimeInterval& ivl, const TaggedSimplex& s);
    double time(double tau) const { return lo + tau * len; }
    double tau(double t) const { return (t - lo) / len; }
    Point space(const Point& xhat) const;
    Point xhat(const Point& x) const;
};

}  // namespace aniso
