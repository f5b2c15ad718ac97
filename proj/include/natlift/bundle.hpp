#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "natlift/coefficients.hpp"
#include "natlift/errors.hpp"
#include "natlift/fd_geometry.hpp"
#include "natlift/index_array.hpp"
#include "natlift/space_form.hpp"

namespace natlift {

/// A covector p over the base point x, with the base quantities the lifted
/// structures are built from.
struct CotangentPoint {
    Vector x;
    Vector p;
    Matrix g;
    Matrix g_inv;
    Array3 gamma;    ///< Gamma(k, i, j) = Gamma^k_ij
    Array4 riemann;  ///< R(h, k, i, j) = R^h_kij
    double t = 0.0;  ///< energy density 1/2 g^ik p_i p_k
    Vector g0;       ///< g0^i = g^ih p_h
    Matrix gamma0;   ///< gamma0(i, h) = p_k Gamma^k_ih
    Array3 r0;       ///< r0(l, i, j) = p_h R^h_lij

    int n() const { return static_cast<int>(x.size()); }

    static CotangentPoint make(const SpaceForm& sf, const Vector& x, const Vector& p) {
        if (p.size() != sf.n) throw ChartDomainError("covector has wrong dimension");
        const BaseMetric m = metric(sf, x);
        CotangentPoint pt;
        pt.x = x;
        pt.p = p;
        pt.g = m.g;
        pt.g_inv = m.g_inv;
        pt.gamma = christoffel(sf, x);
        pt.riemann = curvature(sf, x);
        pt.g0 = m.g_inv * p;
        pt.t = 0.5 * p.dot(pt.g0);
        pt.gamma0 = Matrix::Zero(sf.n, sf.n);
        for (int i = 0; i < sf.n; ++i)
            for (int h = 0; h < sf.n; ++h)
                for (int k = 0; k < sf.n; ++k) pt.gamma0(i, h) += p(k) * pt.gamma(k, i, h);
        pt.r0 = r_zero(pt.riemann, p);
        return pt;
    }
};

/// A 2n x 2n array in the adapted frame {delta_i, d^i}, kept as four n x n
/// blocks. Frame index a < n is delta_a, a >= n is d^(a-n).
struct BlockTensor {
    Matrix hh, hv, vh, vv;

    int n() const { return static_cast<int>(hh.rows()); }

    Matrix dense() const {
        const int n = this->n();
        Matrix out(2 * n, 2 * n);
        out << hh, hv, vh, vv;
        return out;
    }

    static BlockTensor from_dense(const Matrix& m) {
        const Eigen::Index n = m.rows() / 2;
        return {m.topLeftCorner(n, n), m.topRightCorner(n, n), m.bottomLeftCorner(n, n), m.bottomRightCorner(n, n)};
    }
};

/// G in the adapted frame: hh(i,j) = G(delta_i, delta_j), hv(i,j) =
/// G(delta_i, d^j), vv(i,j) = G(d^i, d^j).
inline BlockTensor assemble_G(const CotangentPoint& pt, const MetricCoefficients& m) {
    const Vector& p = pt.p;
    const Vector& g0 = pt.g0;
    const int n = pt.n();
    BlockTensor G;
    G.hh = m.c1.v0 * pt.g + m.d1.v0 * p * p.transpose();
    G.vv = m.c2.v0 * pt.g_inv + m.d2.v0 * g0 * g0.transpose();
    // G3 with first index on d^j and second on delta_k: c3 delta + d3 g0^j p_k.
    const Matrix g3 = m.c3.v0 * Matrix::Identity(n, n) + m.d3.v0 * g0 * p.transpose();
    G.hv = g3.transpose();
    G.vh = g3;
    return G;
}

/// J in the adapted frame, stored by columns: dense()(b, a) is the E_b
/// component of J E_a.
inline BlockTensor assemble_J(const CotangentPoint& pt, const StructureCoefficients& s) {
    const Vector& p = pt.p;
    const Vector& g0 = pt.g0;
    const int n = pt.n();
    const Matrix id = Matrix::Identity(n, n);
    BlockTensor J;
    J.vh = s.a1.v0 * pt.g + s.b1.v0 * p * p.transpose();
    J.hh = -s.a3.v0 * id - s.b3.v0 * g0 * p.transpose();
    J.vv = s.a3.v0 * id + s.b3.v0 * p * g0.transpose();
    J.hv = -(s.a2.v0 * pt.g_inv + s.b2.v0 * g0 * g0.transpose());
    return J;
}

/// Omega(X, Y) = G(X, JY); dense()(a, b) = Omega(E_a, E_b).
inline BlockTensor fundamental_form(const CotangentPoint& pt, const CoefficientValues& v) {
    return BlockTensor::from_dense(assemble_G(pt, v.metric).dense() * assemble_J(pt, v.structure).dense());
}

/// Coefficients of the inverse H of G:
///   H1 = e1 g^-1 + f1 g0 g0, H2 = e2 g + f2 p p, H3 = e3 delta + f3 g0 p.
struct InverseCoefficients {
    Jet3 e1, e2, e3;
    Jet3 f1, f2, f3;
};

inline InverseCoefficients inverse_coefficients(const MetricCoefficients& m, double t) {
    const Jet3 T = Jet3::variable(t);
    const Jet3 base = m.c1 * m.c2 - m.c3 * m.c3;
    const Jet3 h1 = m.c1 + 2.0 * T * m.d1;
    const Jet3 h2 = m.c2 + 2.0 * T * m.d2;
    const Jet3 h3 = m.c3 + 2.0 * T * m.d3;
    const Jet3 full = h1 * h2 - h3 * h3;
    const double scale = std::max(std::abs(m.c1.v0 * m.c2.v0) + m.c3.v0 * m.c3.v0, 1e-300);
    if (std::abs(base.v0) <= 1e-14 * scale)
        throw SingularCoefficientError("c1 c2 - c3^2 vanishes at t = " + std::to_string(t));
    if (std::abs(full.v0) <= 1e-14 * std::max(std::abs(h1.v0 * h2.v0) + h3.v0 * h3.v0, 1e-300))
        throw SingularCoefficientError("(c1+2td1)(c2+2td2) - (c3+2td3)^2 vanishes at t = " + std::to_string(t));
    if (h2.v0 == 0.0) throw SingularCoefficientError("c2 + 2 t d2 vanishes at t = " + std::to_string(t));

    InverseCoefficients r;
    const Jet3 inv_base = reciprocal(base);
    r.e1 = m.c2 * inv_base;
    r.e2 = m.c1 * inv_base;
    r.e3 = -m.c3 * inv_base;
    const Jet3 inv_full = reciprocal(full);
    r.f1 = -(m.c2 * m.d1 * r.e1 - m.c3 * m.d3 * r.e1 - m.c3 * m.d2 * r.e3 + m.c2 * m.d3 * r.e3 +
             2.0 * m.d1 * m.d2 * r.e1 * T - 2.0 * m.d3 * m.d3 * r.e1 * T) *
           inv_full;
    const Jet3 x = (m.d3 * r.e1 + m.d2 * r.e3) * h1 - (m.d1 * r.e1 + m.d3 * r.e3) * h3;
    const Jet3 inv_h2 = reciprocal(h2);
    r.f2 = h3 * x * inv_h2 * inv_full - (m.d2 * r.e2 + m.d3 * r.e3) * inv_h2;
    r.f3 = -x * inv_full;
    return r;
}

/// The inverse of G from the closed-form coefficients. hh = H1, vv = H2,
/// hv(k, l) = H3^k_l = e3 delta + f3 g0^k p_l, vh = hv^T.
inline BlockTensor invert_G_closed_form(const CotangentPoint& pt, const InverseCoefficients& e) {
    const Vector& p = pt.p;
    const Vector& g0 = pt.g0;
    const int n = pt.n();
    BlockTensor H;
    H.hh = e.e1.v0 * pt.g_inv + e.f1.v0 * g0 * g0.transpose();
    H.vv = e.e2.v0 * pt.g + e.f2.v0 * p * p.transpose();
    H.hv = e.e3.v0 * Matrix::Identity(n, n) + e.f3.v0 * g0 * p.transpose();
    H.vh = H.hv.transpose();
    return H;
}

inline BlockTensor invert_G_closed_form(const CotangentPoint& pt, const MetricCoefficients& m) {
    return invert_G_closed_form(pt, inverse_coefficients(m, pt.t));
}

/// Coordinates y = (x, p) of the induced chart on T*M.
inline Vector join(const Vector& x, const Vector& p) {
    Vector y(x.size() + p.size());
    y << x, p;
    return y;
}

/// Phi(mu, a) = induced-chart component mu of the adapted frame vector E_a:
/// delta_i = d/dq^i + Gamma0_ih d/dp_h.
inline Matrix frame_matrix(const CotangentPoint& pt) {
    const int n = pt.n();
    Matrix phi = Matrix::Identity(2 * n, 2 * n);
    phi.bottomLeftCorner(n, n) = pt.gamma0.transpose();
    return phi;
}

inline Matrix frame_matrix_inverse(const CotangentPoint& pt) {
    const int n = pt.n();
    Matrix inv = Matrix::Identity(2 * n, 2 * n);
    inv.bottomLeftCorner(n, n) = -pt.gamma0.transpose();
    return inv;
}

/// The lifted structure evaluated in the induced chart y = (x, p), for
/// finite-difference oracles.
class InducedChart {
public:
    explicit InducedChart(CoefficientFamily family) : family_(std::move(family)) {}

    const CoefficientFamily& family() const { return family_; }
    int n() const { return family_.space.n; }

    CotangentPoint point(const Vector& y) const {
        const int n = this->n();
        return CotangentPoint::make(family_.space, y.head(n), y.tail(n));
    }

    /// G(d_mu, d_nu).
    Matrix metric(const Vector& y) const {
        const CotangentPoint pt = point(y);
        const Matrix inv = frame_matrix_inverse(pt);
        return inv.transpose() * assemble_G(pt, family_.at(pt.t, false).metric).dense() * inv;
    }

    /// Column convention: (b, a) entry is the d_b component of J d_a.
    Matrix complex_structure(const Vector& y) const {
        const CotangentPoint pt = point(y);
        return frame_matrix(pt) * assemble_J(pt, family_.at(pt.t, false).structure).dense() *
               frame_matrix_inverse(pt);
    }

    /// Omega(d_mu, d_nu) = G(d_mu, J d_nu).
    Matrix fundamental_form(const Vector& y) const {
        const CotangentPoint pt = point(y);
        const CoefficientValues v = family_.at(pt.t, false);
        const Matrix inv = frame_matrix_inverse(pt);
        return inv.transpose() * assemble_G(pt, v.metric).dense() * assemble_J(pt, v.structure).dense() * inv;
    }

private:
    CoefficientFamily family_;
};

/// Max component of the Nijenhuis tensor
///   N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]
/// on coordinate fields of the induced chart, J differentiated by central
/// differences.
inline double nijenhuis_numeric(const InducedChart& chart, const Vector& y, double h = fd::kStep) {
    const Matrix J = chart.complex_structure(y);
    const auto dJ = fd::partials([&](const Vector& z) { return chart.complex_structure(z); }, y, h);
    const int dim = static_cast<int>(y.size());
    double worst = 0.0;
    for (int mu = 0; mu < dim; ++mu)
        for (int nu = 0; nu < dim; ++nu)
            for (int r = 0; r < dim; ++r) {
                double acc = 0.0;
                for (int s = 0; s < dim; ++s) {
                    acc += J(s, mu) * dJ[s](r, nu) - J(s, nu) * dJ[s](r, mu);
                    acc -= J(r, s) * (dJ[mu](s, nu) - dJ[nu](s, mu));
                }
                worst = std::max(worst, std::abs(acc));
            }
    return worst;
}

/// Max component of dOmega over coordinate triples of the induced chart.
inline double d_omega_numeric(const InducedChart& chart, const Vector& y, double h = fd::kStep) {
    const auto dW = fd::partials([&](const Vector& z) { return chart.fundamental_form(z); }, y, h);
    const int dim = static_cast<int>(y.size());
    double worst = 0.0;
    for (int l = 0; l < dim; ++l)
        for (int m = l + 1; m < dim; ++m)
            for (int k = m + 1; k < dim; ++k)
                worst = std::max(worst, std::abs(dW[l](m, k) + dW[m](k, l) + dW[k](l, m)));
    return worst;
}

/// max |J^2 + I|.
inline double j_square_residual(const BlockTensor& J) {
    const Matrix j = J.dense();
    return (j * j + Matrix::Identity(j.rows(), j.cols())).cwiseAbs().maxCoeff();
}

/// max |J^T G J - G|, i.e. G(JX, JY) - G(X, Y) over frame pairs.
inline double hermitian_residual(const BlockTensor& G, const BlockTensor& J) {
    const Matrix g = G.dense(), j = J.dense();
    return (j.transpose() * g * j - g).cwiseAbs().maxCoeff();
}

inline double antisymmetry_residual(const BlockTensor& omega) {
    const Matrix w = omega.dense();
    return (w + w.transpose()).cwiseAbs().maxCoeff();
}

/// max of |G H - I| and |H G - I|.
inline double inverse_residual(const BlockTensor& G, const BlockTensor& H) {
    const Matrix g = G.dense(), h = H.dense();
    const Matrix id = Matrix::Identity(g.rows(), g.cols());
    return std::max((g * h - id).cwiseAbs().maxCoeff(), (h * g - id).cwiseAbs().maxCoeff());
}

}  // namespace natlift
