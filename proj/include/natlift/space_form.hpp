#pragma once

#include <Eigen/Dense>
#include <string>

#include "natlift/errors.hpp"
#include "natlift/fd_geometry.hpp"
#include "natlift/index_array.hpp"

namespace natlift {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Riemannian manifold of constant sectional curvature c, dimension n, in the
/// conformal chart g_ij = delta_ij / (1 + c|x|^2/4)^2.
struct SpaceForm {
    int n = 2;
    double c = 0.0;

    void validate() const {
        if (n < 2) throw ConfigError("space form dimension must be at least 2, got " + std::to_string(n));
    }

    /// 1 + c|x|^2/4; throws when the point leaves the chart.
    double conformal_factor(const Vector& x) const {
        if (x.size() != n) throw ChartDomainError("base point has wrong dimension");
        const double phi = 1.0 + 0.25 * c * x.squaredNorm();
        if (!(phi > 0.0)) throw ChartDomainError("base point outside the conformal chart (1 + c|x|^2/4 <= 0)");
        return phi;
    }
};

struct BaseMetric {
    Matrix g;
    Matrix g_inv;
};

inline BaseMetric metric(const SpaceForm& sf, const Vector& x) {
    const double phi = sf.conformal_factor(x);
    return {Matrix::Identity(sf.n, sf.n) / (phi * phi), Matrix::Identity(sf.n, sf.n) * (phi * phi)};
}

/// Gamma(k, i, j) = Gamma^k_ij. For g = exp(2 sigma) delta,
/// Gamma^k_ij = delta^k_i s_j + delta^k_j s_i - delta_ij s_k with s = d sigma.
inline Array3 christoffel(const SpaceForm& sf, const Vector& x) {
    const double phi = sf.conformal_factor(x);
    const Vector s = -0.5 * sf.c * x / phi;
    Array3 gamma(sf.n);
    for (int k = 0; k < sf.n; ++k)
        for (int i = 0; i < sf.n; ++i)
            for (int j = 0; j < sf.n; ++j)
                gamma(k, i, j) = (k == i ? s(j) : 0.0) + (k == j ? s(i) : 0.0) - (i == j ? s(k) : 0.0);
    return gamma;
}

/// R(h, k, i, j) = R^h_kij = c (delta^h_i g_kj - delta^h_j g_ki), the h
/// component of R(d_i, d_j) d_k.
inline Array4 curvature(const SpaceForm& sf, const Vector& x) {
    const Matrix g = metric(sf, x).g;
    Array4 r(sf.n);
    for (int h = 0; h < sf.n; ++h)
        for (int k = 0; k < sf.n; ++k)
            for (int i = 0; i < sf.n; ++i)
                for (int j = 0; j < sf.n; ++j)
                    r(h, k, i, j) = sf.c * ((h == i ? g(k, j) : 0.0) - (h == j ? g(k, i) : 0.0));
    return r;
}

/// R0(l, i, j) = p_h R^h_lij.
inline Array3 r_zero(const Array4& riemann, const Vector& p) {
    const int n = riemann.dim();
    Array3 out(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int h = 0; h < n; ++h) acc += p(h) * riemann(h, l, i, j);
                out(l, i, j) = acc;
            }
    return out;
}

/// Finite-difference self-check of the closed forms above.
inline Array3 christoffel_fd(const SpaceForm& sf, const Vector& x, double h = fd::kStep) {
    return fd::christoffel([&](const Vector& y) { return metric(sf, y).g; }, x, h);
}

inline Array4 curvature_fd(const SpaceForm& sf, const Vector& x, double h = fd::kStep) {
    return fd::riemann([&](const Vector& y) { return metric(sf, y).g; }, x, h);
}

}  // namespace natlift
