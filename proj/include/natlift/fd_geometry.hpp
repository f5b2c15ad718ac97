#pragma once

#include <Eigen/Dense>
#include <vector>

#include "natlift/index_array.hpp"

namespace natlift::fd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default central-difference step.
inline constexpr double kStep = 1e-4;

/// d/dy^mu of a field by the fourth-order central stencil
/// (f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / 12h.
template <typename Field>
auto central(Field&& field, const Vector& y, Eigen::Index mu, double h = kStep) {
    auto at = [&](double s) {
        Vector z = y;
        z(mu) += s;
        return field(z);
    };
    auto out = at(-2.0 * h);
    auto f_m1 = at(-h);
    auto f_p1 = at(h);
    auto f_p2 = at(2.0 * h);
    out = (out - 8.0 * f_m1 + 8.0 * f_p1 - f_p2) / (12.0 * h);
    return out;
}

/// Partial derivatives d/dy^mu of a matrix-valued field, one matrix per mu.
template <typename Field>
std::vector<Matrix> partials(Field&& field, const Vector& y, double h = kStep) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(y.size()));
    for (Eigen::Index mu = 0; mu < y.size(); ++mu) out.push_back(central(field, y, mu, h));
    return out;
}

/// Christoffel symbols Gamma(rho, mu, nu) = Gamma^rho_{mu nu} of a metric
/// field, from central differences of its components.
template <typename MetricField>
Array3 christoffel(MetricField&& metric, const Vector& y, double h = kStep) {
    const int dim = static_cast<int>(y.size());
    const Matrix inv = metric(y).inverse();
    const auto dg = partials(metric, y, h);
    Array3 first(dim);  // Gamma_{sigma mu nu}
    for (int s = 0; s < dim; ++s)
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n) first(s, m, n) = 0.5 * (dg[m](s, n) + dg[n](s, m) - dg[s](m, n));
    Array3 gamma(dim);
    for (int r = 0; r < dim; ++r)
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n) {
                double acc = 0.0;
                for (int s = 0; s < dim; ++s) acc += inv(r, s) * first(s, m, n);
                gamma(r, m, n) = acc;
            }
    return gamma;
}

/// Riemann tensor R(rho, sigma, mu, nu) = R^rho_{sigma mu nu}, the rho
/// component of R(d_mu, d_nu) d_sigma with
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
/// Christoffel symbols are differenced a second time (nested central
/// differences), so the result carries O(eps / h^2) rounding.
template <typename MetricField>
Array4 riemann(MetricField&& metric, const Vector& y, double h = kStep) {
    const int dim = static_cast<int>(y.size());
    const Array3 gamma = christoffel(metric, y, h);
    std::vector<Array3> dgamma;
    for (int mu = 0; mu < dim; ++mu) {
        Array3 d(dim);
        const double weights[4] = {1.0, -8.0, 8.0, -1.0};
        const double shifts[4] = {-2.0, -1.0, 1.0, 2.0};
        for (int s = 0; s < 4; ++s) {
            Vector z = y;
            z(mu) += shifts[s] * h;
            const Array3 gs = christoffel(metric, z, h);
            for (std::size_t k = 0; k < d.size(); ++k) d.data()[k] += weights[s] * gs.data()[k] / (12.0 * h);
        }
        dgamma.push_back(std::move(d));
    }
    Array4 r(dim);
    for (int rho = 0; rho < dim; ++rho)
        for (int sig = 0; sig < dim; ++sig)
            for (int mu = 0; mu < dim; ++mu)
                for (int nu = 0; nu < dim; ++nu) {
                    double acc = dgamma[mu](rho, nu, sig) - dgamma[nu](rho, mu, sig);
                    for (int l = 0; l < dim; ++l)
                        acc += gamma(rho, mu, l) * gamma(l, nu, sig) - gamma(rho, nu, l) * gamma(l, mu, sig);
                    r(rho, sig, mu, nu) = acc;
                }
    return r;
}

/// Sectional curvature of span{u, v} for a metric g and Riemann tensor in the
/// convention above.
inline double sectional_curvature(const Matrix& g, const Array4& riemann_tensor, const Vector& u, const Vector& v) {
    const int dim = riemann_tensor.dim();
    Vector ruvv = Vector::Zero(dim);  // R(u, v) v
    for (int rho = 0; rho < dim; ++rho)
        for (int s = 0; s < dim; ++s)
            for (int m = 0; m < dim; ++m)
                for (int n = 0; n < dim; ++n) ruvv(rho) += riemann_tensor(rho, s, m, n) * u(m) * v(n) * v(s);
    const double num = u.dot(g * ruvv);
    const double den = u.dot(g * u) * v.dot(g * v) - std::pow(u.dot(g * v), 2);
    return num / den;
}

}  // namespace natlift::fd
