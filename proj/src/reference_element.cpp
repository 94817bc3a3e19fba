#include "aniso/reference_element.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace aniso {

void PolyOrders::check() const {
    if (r1 < 2 || r2 < 2) throw std::invalid_argument("polynomial orders must be at least 2");
    if (r1 > 8 || r2 > 8) throw std::invalid_argument("polynomial orders above 8 are not supported");
}

std::vector<std::array<int, kMaxDim>> simplex_multi_indices(int d, int m) {
    std::vector<std::array<int, kMaxDim>> out;
    std::array<int, kMaxDim> a{};
    // odometer over [0,m]^d, lexicographic with the first component most significant
    while (true) {
        int sum = 0;
        for (int k = 0; k < d; ++k) sum += a[k];
        if (sum <= m) out.push_back(a);
        int k = d - 1;
        while (k >= 0 && a[k] == m) a[k--] = 0;
        if (k < 0) break;
        ++a[k];
    }
    return out;
}

std::size_t simplex_lattice_size(int d, int m) {
    std::size_t n = 1;
    for (int k = 1; k <= d; ++k) n = n * (m + k) / k;
    return n;
}

ReferenceElement::ReferenceElement(int d, PolyOrders orders) : d_(d), orders_(orders) {
    orders.check();
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("reference element dimension out of range");
    nt_ = orders.r1;
    alpha_ = simplex_multi_indices(d, orders.r2 - 1);
    ns_ = static_cast<int>(alpha_.size());
}

Point ReferenceElement::space_node(int a) const {
    Point x{};
    for (int k = 0; k < d_; ++k) x[k] = static_cast<double>(alpha_[a][k]) / (orders_.r2 - 1);
    return x;
}

void ReferenceElement::eval_time(double tau, double* out) const {
    const int m = nt_ - 1;
    for (int i = 0; i <= m; ++i) {
        double v = 1.0;
        for (int j = 0; j <= m; ++j)
            if (j != i) v *= (m * tau - j) / (i - j);
        out[i] = v;
    }
}

void ReferenceElement::eval_space(const Point& xhat, double* out) const {
    const int m = orders_.r2 - 1;
    std::array<double, kMaxDim + 1> lambda{};
    lambda[0] = 1.0;
    for (int k = 0; k < d_; ++k) {
        lambda[k + 1] = xhat[k];
        lambda[0] -= xhat[k];
    }
    // prod_k prod_{j < beta_k} (m lambda_k - j) / (j + 1), beta = (m - |alpha|, alpha)
    for (int a = 0; a < ns_; ++a) {
        std::array<int, kMaxDim + 1> beta{};
        beta[0] = m;
        for (int k = 0; k < d_; ++k) {
            beta[k + 1] = alpha_[a][k];
            beta[0] -= alpha_[a][k];
        }
        double v = 1.0;
        for (int k = 0; k <= d_; ++k)
            for (int j = 0; j < beta[k]; ++j) v *= (m * lambda[k] - j) / (j + 1);
        out[a] = v;
    }
}

void ReferenceElement::eval(double tau, const Point& xhat, double* out) const {
    double bt[16];
    double bs[128];
    eval_time(tau, bt);
    eval_space(xhat, bs);
    for (int i = 0; i < nt_; ++i)
        for (int a = 0; a < ns_; ++a) out[i * ns_ + a] = bt[i] * bs[a];
}

PrismFrame PrismFrame::of(const TimeInterval& ivl, const TaggedSimplex& s) {
    PrismFrame f;
    f.dim = s.dim;
    f.lo = ivl.lo;
    f.len = ivl.length();
    f.v0 = s.vertices[0];
    const int d = s.dim;
    Eigen::MatrixXd b(d, d);
    for (int k = 0; k < d; ++k)
        for (int c = 0; c < d; ++c) {
            f.edges[k][c] = s.vertices[k + 1][c] - s.vertices[0][c];
            b(c, k) = f.edges[k][c];
        }
    const Eigen::MatrixXd inv = b.inverse();
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) f.inverse[r][c] = inv(r, c);
    f.measure = f.len * simplex_measure(s);
    return f;
}

Point PrismFrame::space(const Point& xhat) const {
    Point x = v0;
    for (int k = 0; k < dim; ++k)
        for (int c = 0; c < dim; ++c) x[c] += xhat[k] * edges[k][c];
    return x;
}

Point PrismFrame::xhat(const Point& x) const {
    Point out{};
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) out[r] += inverse[r][c] * (x[c] - v0[c]);
    return out;
}

}  // namespace aniso
