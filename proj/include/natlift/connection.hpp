#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "natlift/bundle.hpp"
#include "natlift/coefficients.hpp"
#include "natlift/fd_geometry.hpp"
#include "natlift/index_array.hpp"

namespace natlift {

/// An M-tensor block alpha(t) A + beta(t) u (x) v, with A independent of p
/// and u, v in {p, g0}. Provides the value and the first two derivatives
/// along the vertical fields d^m, by the product rule with d^m t = g0^m.
class PairBlock {
public:
    PairBlock(Jet3 alpha, Jet3 beta, Matrix base, Vector u, Matrix du, Vector v, Matrix dv, const CotangentPoint& pt)
        : alpha_(alpha), beta_(beta), base_(std::move(base)), u_(std::move(u)), du_(std::move(du)),
          v_(std::move(v)), dv_(std::move(dv)), dt_(pt.g0), ddt_(pt.g_inv) {}

    int n() const { return static_cast<int>(base_.rows()); }

    double operator()(int j, int k) const { return alpha_.v0 * base_(j, k) + beta_.v0 * u_(j) * v_(k); }

    /// d(m, j, k) = d^m of the (j, k) entry.
    Array3 first() const {
        const int n = this->n();
        Array3 out(n);
        for (int m = 0; m < n; ++m)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    out(m, j, k) = alpha_.v1 * dt_(m) * base_(j, k) + beta_.v1 * dt_(m) * u_(j) * v_(k) +
                                   beta_.v0 * (du_(m, j) * v_(k) + u_(j) * dv_(m, k));
        return out;
    }

    /// dd(m, i, j, k) = d^m d^i of the (j, k) entry.
    Array4 second() const {
        const int n = this->n();
        Array4 out(n);
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        const double uv = u_(j) * v_(k);
                        const double duv_i = du_(i, j) * v_(k) + u_(j) * dv_(i, k);
                        const double duv_m = du_(m, j) * v_(k) + u_(j) * dv_(m, k);
                        out(m, i, j, k) = alpha_.v2 * dt_(m) * dt_(i) * base_(j, k) +
                                          alpha_.v1 * ddt_(m, i) * base_(j, k) +
                                          beta_.v2 * dt_(m) * dt_(i) * uv + beta_.v1 * ddt_(m, i) * uv +
                                          beta_.v1 * (dt_(i) * duv_m + dt_(m) * duv_i) +
                                          beta_.v0 * (du_(i, j) * dv_(m, k) + du_(m, j) * dv_(i, k));
                    }
        return out;
    }

private:
    Jet3 alpha_, beta_;
    Matrix base_;
    Vector u_;
    Matrix du_;
    Vector v_;
    Matrix dv_;
    Vector dt_;
    Matrix ddt_;
};

/// The M-tensor blocks of G and H at a point: G1, G2, G3(j,k) = G3^j_k and
/// H1, H2, H3(k,l) = H3^k_l.
struct MetricBlocks {
    PairBlock G1, G2, G3;
    PairBlock H1, H2, H3;
    Jet3 c2, c3;

    static MetricBlocks make(const CotangentPoint& pt, const MetricCoefficients& m) {
        const InverseCoefficients e = inverse_coefficients(m, pt.t);
        const int n = pt.n();
        const Matrix id = Matrix::Identity(n, n);
        // d^m p_k = delta_mk, d^m g0_k = g^mk.
        return {PairBlock(m.c1, m.d1, pt.g, pt.p, id, pt.p, id, pt),
                PairBlock(m.c2, m.d2, pt.g_inv, pt.g0, pt.g_inv, pt.g0, pt.g_inv, pt),
                PairBlock(m.c3, m.d3, id, pt.g0, pt.g_inv, pt.p, id, pt),
                PairBlock(e.e1, e.f1, pt.g_inv, pt.g0, pt.g_inv, pt.g0, pt.g_inv, pt),
                PairBlock(e.e2, e.f2, pt.g, pt.p, id, pt.p, id, pt),
                PairBlock(e.e3, e.f3, id, pt.g0, pt.g_inv, pt.p, id, pt),
                m.c2,
                m.c3};
    }
};

/// Coefficients of the Levi-Civita connection of G in the adapted frame:
///   nabla_{d^i} d^j         = Q(i,j,h) d^h + Qt(i,j,h) delta_h
///   nabla_{delta_i} d^j     = (-Gamma^j_ih + Pt(i,j,h)) d^h + P(i,j,h) delta_h
///   nabla_{d^i} delta_j     = P(j,i,h) delta_h + Pt(j,i,h) d^h
///   nabla_{delta_i} delta_j = (Gamma^h_ij + St(i,j,h)) delta_h + S(i,j,h) d^h
struct ConnectionBlocks {
    Array3 Q, Qt, P, Pt, S, St;

    double max_abs_diff_to(const ConnectionBlocks& o) const {
        return std::max({max_abs_diff(Q, o.Q), max_abs_diff(Qt, o.Qt), max_abs_diff(P, o.P),
                         max_abs_diff(Pt, o.Pt), max_abs_diff(S, o.S), max_abs_diff(St, o.St)});
    }
};

/// Derivatives along d^m of the connection blocks; dX(m, ...) = d^m X(...).
struct ConnectionDerivatives {
    Array4 dQ, dQt, dP, dPt, dS, dSt;
};

namespace detail {

template <typename F>
Array3 tabulate3(int n, F&& f) {
    Array3 out(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) out(a, b, c) = f(a, b, c);
    return out;
}

template <typename F>
Array4 tabulate4(int n, F&& f) {
    Array4 out(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) out(a, b, c, d) = f(a, b, c, d);
    return out;
}

/// The intermediate first-kind symbols, before contraction with H.
struct FirstKind {
    Array3 A, B, C, D, E, F;
};

inline FirstKind first_kind(const CotangentPoint& pt, const MetricBlocks& mb, const Array3& dG1, const Array3& dG2,
                            const Array3& dG3) {
    const int n = pt.n();
    const double c2 = mb.c2.v0, c3 = mb.c3.v0;
    const Array3& r0 = pt.r0;
    FirstKind fk;
    fk.A = tabulate3(n, [&](int i, int j, int k) { return 0.5 * (dG2(i, j, k) + dG2(j, i, k) - dG2(k, i, j)); });
    fk.B = tabulate3(n, [&](int i, int j, int k) { return 0.5 * (dG3(i, j, k) + dG3(j, i, k)); });
    fk.C = tabulate3(n, [&](int i, int j, int k) { return 0.5 * (dG3(i, k, j) - dG3(k, i, j)); });
    fk.D = tabulate3(n, [&](int i, int j, int k) {
        double acc = dG1(i, j, k);
        for (int l = 0; l < n; ++l) acc -= r0(l, j, k) * mb.G2(l, i);
        return 0.5 * acc;
    });
    fk.E = tabulate3(n, [&](int i, int j, int k) {
        double acc = -dG1(k, i, j);
        for (int l = 0; l < n; ++l) acc += c2 * pt.g_inv(k, l) * r0(l, i, j);
        return 0.5 * acc;
    });
    fk.F = tabulate3(n, [&](int i, int j, int k) { return -c3 * r0(i, j, k); });
    return fk;
}

}  // namespace detail

/// Closed-form connection blocks and their vertical derivatives.
struct ClosedFormConnection {
    ConnectionBlocks blocks;
    ConnectionDerivatives derivatives;
};

inline ClosedFormConnection closed_form_connection(const CotangentPoint& pt, const MetricCoefficients& m) {
    using detail::tabulate3;
    using detail::tabulate4;
    const int n = pt.n();
    const MetricBlocks mb = MetricBlocks::make(pt, m);
    const Array3 dG1 = mb.G1.first(), dG2 = mb.G2.first(), dG3 = mb.G3.first();
    const Array4 ddG1 = mb.G1.second(), ddG2 = mb.G2.second(), ddG3 = mb.G3.second();
    const Array3 dH1 = mb.H1.first(), dH2 = mb.H2.first(), dH3 = mb.H3.first();
    const auto& H1 = mb.H1;
    const auto& H2 = mb.H2;
    const auto& H3 = mb.H3;
    const detail::FirstKind fk = detail::first_kind(pt, mb, dG1, dG2, dG3);
    const Array3 &A = fk.A, &B = fk.B, &C = fk.C, &D = fk.D, &E = fk.E, &F = fk.F;

    // Vertical derivatives of the first-kind symbols.
    const Array4 dA = tabulate4(n, [&](int m_, int i, int j, int k) {
        return 0.5 * (ddG2(m_, i, j, k) + ddG2(m_, j, i, k) - ddG2(m_, k, i, j));
    });
    const Array4 dB =
        tabulate4(n, [&](int m_, int i, int j, int k) { return 0.5 * (ddG3(m_, i, j, k) + ddG3(m_, j, i, k)); });
    const Array4 dC =
        tabulate4(n, [&](int m_, int i, int j, int k) { return 0.5 * (ddG3(m_, i, k, j) - ddG3(m_, k, i, j)); });
    const Array4 dD = tabulate4(n, [&](int m_, int i, int j, int k) {
        double acc = ddG1(m_, i, j, k);
        for (int l = 0; l < n; ++l) acc -= pt.riemann(m_, l, j, k) * mb.G2(l, i) + pt.r0(l, j, k) * dG2(m_, l, i);
        return 0.5 * acc;
    });
    const double c2 = mb.c2.v0, dc2 = mb.c2.v1, c3 = mb.c3.v0, dc3 = mb.c3.v1;
    const Array4 dE = tabulate4(n, [&](int m_, int i, int j, int k) {
        double acc = -ddG1(m_, k, i, j);
        for (int l = 0; l < n; ++l)
            acc += pt.g_inv(k, l) * (dc2 * pt.g0(m_) * pt.r0(l, i, j) + c2 * pt.riemann(m_, l, i, j));
        return 0.5 * acc;
    });
    const Array4 dF = tabulate4(n, [&](int m_, int i, int j, int k) {
        return -dc3 * pt.g0(m_) * pt.r0(i, j, k) - c3 * pt.riemann(m_, i, j, k);
    });

    ClosedFormConnection out;
    auto& b = out.blocks;
    auto& d = out.derivatives;
    b.Q = tabulate3(n, [&](int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += A(i, j, k) * H2(h, k) + B(i, j, k) * H3(k, h);
        return acc;
    });
    b.Qt = tabulate3(n, [&](int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += A(i, j, k) * H3(h, k) + B(i, j, k) * H1(h, k);
        return acc;
    });
    b.P = tabulate3(n, [&](int j, int i, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += D(i, j, k) * H1(h, k) + C(i, j, k) * H3(h, k);
        return acc;
    });
    b.Pt = tabulate3(n, [&](int j, int i, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += D(i, j, k) * H3(k, h) + C(i, j, k) * H2(h, k);
        return acc;
    });
    b.S = tabulate3(n, [&](int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += F(i, j, k) * H3(k, h) + E(i, j, k) * H2(h, k);
        return acc;
    });
    b.St = tabulate3(n, [&](int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += F(i, j, k) * H1(h, k) + E(i, j, k) * H3(h, k);
        return acc;
    });

    d.dQ = tabulate4(n, [&](int m_, int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += dA(m_, i, j, k) * H2(h, k) + A(i, j, k) * dH2(m_, h, k) + dB(m_, i, j, k) * H3(k, h) +
                   B(i, j, k) * dH3(m_, k, h);
        return acc;
    });
    d.dQt = tabulate4(n, [&](int m_, int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += dA(m_, i, j, k) * H3(h, k) + A(i, j, k) * dH3(m_, h, k) + dB(m_, i, j, k) * H1(h, k) +
                   B(i, j, k) * dH1(m_, h, k);
        return acc;
    });
    d.dP = tabulate4(n, [&](int m_, int j, int i, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += dD(m_, i, j, k) * H1(h, k) + D(i, j, k) * dH1(m_, h, k) + dC(m_, i, j, k) * H3(h, k) +
                   C(i, j, k) * dH3(m_, h, k);
        return acc;
    });
    d.dPt = tabulate4(n, [&](int m_, int j, int i, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += dD(m_, i, j, k) * H3(k, h) + D(i, j, k) * dH3(m_, k, h) + dC(m_, i, j, k) * H2(h, k) +
                   C(i, j, k) * dH2(m_, h, k);
        return acc;
    });
    d.dS = tabulate4(n, [&](int m_, int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += dF(m_, i, j, k) * H3(k, h) + F(i, j, k) * dH3(m_, k, h) + dE(m_, i, j, k) * H2(h, k) +
                   E(i, j, k) * dH2(m_, h, k);
        return acc;
    });
    d.dSt = tabulate4(n, [&](int m_, int i, int j, int h) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += dF(m_, i, j, k) * H1(h, k) + F(i, j, k) * dH1(m_, h, k) + dE(m_, i, j, k) * H3(h, k) +
                   E(i, j, k) * dH3(m_, h, k);
        return acc;
    });
    return out;
}

inline ConnectionBlocks mtensor_coeffs(const CotangentPoint& pt, const MetricCoefficients& m) {
    return closed_form_connection(pt, m).blocks;
}

/// Connection in the full adapted frame: omega(a, b, c) is the E_c component
/// of nabla_{E_a} E_b, a < n for delta_a and a >= n for d^(a-n).
inline Array3 frame_connection(const CotangentPoint& pt, const ConnectionBlocks& b) {
    const int n = pt.n();
    Array3 w(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int h = 0; h < n; ++h) {
                w(n + i, n + j, n + h) = b.Q(i, j, h);
                w(n + i, n + j, h) = b.Qt(i, j, h);
                w(i, n + j, n + h) = -pt.gamma(j, i, h) + b.Pt(i, j, h);
                w(i, n + j, h) = b.P(i, j, h);
                w(n + i, j, h) = b.P(j, i, h);
                w(n + i, j, n + h) = b.Pt(j, i, h);
                w(i, j, h) = pt.gamma(h, i, j) + b.St(i, j, h);
                w(i, j, n + h) = b.S(i, j, h);
            }
    return w;
}

/// Derivatives d_mu Phi(nu, b) of the frame matrix, by central differences.
inline std::vector<Matrix> frame_matrix_partials(const InducedChart& chart, const Vector& y, double h = fd::kStep) {
    return fd::partials([&](const Vector& z) { return frame_matrix(chart.point(z)); }, y, h);
}

/// Levi-Civita connection of G from finite-difference Christoffel symbols in
/// the induced chart, carried to the adapted frame. Layout as
/// frame_connection.
inline Array3 koszul_frame_connection(const InducedChart& chart, const Vector& y, double h = fd::kStep) {
    const int dim = static_cast<int>(y.size());
    const CotangentPoint pt = chart.point(y);
    const Array3 gc = fd::christoffel([&](const Vector& z) { return chart.metric(z); }, y, h);
    const Matrix phi = frame_matrix(pt);
    const Matrix phi_inv = frame_matrix_inverse(pt);
    const auto dphi = frame_matrix_partials(chart, y, h);
    Array3 w(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            Vector v = Vector::Zero(dim);  // induced-chart components of nabla_{E_a} E_b
            for (int mu = 0; mu < dim; ++mu) {
                if (phi(mu, a) == 0.0) continue;
                for (int nu = 0; nu < dim; ++nu) {
                    double acc = dphi[mu](nu, b);
                    for (int l = 0; l < dim; ++l) acc += gc(nu, mu, l) * phi(l, b);
                    v(nu) += phi(mu, a) * acc;
                }
            }
            const Vector f = phi_inv * v;
            for (int c = 0; c < dim; ++c) w(a, b, c) = f(c);
        }
    return w;
}

/// Reads the six blocks off a full frame connection, removing the base
/// Christoffel terms.
inline ConnectionBlocks extract_blocks(const CotangentPoint& pt, const Array3& w) {
    const int n = pt.n();
    ConnectionBlocks b{Array3(n), Array3(n), Array3(n), Array3(n), Array3(n), Array3(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int h = 0; h < n; ++h) {
                b.Q(i, j, h) = w(n + i, n + j, n + h);
                b.Qt(i, j, h) = w(n + i, n + j, h);
                b.P(i, j, h) = w(i, n + j, h);
                b.Pt(i, j, h) = w(i, n + j, n + h) + pt.gamma(j, i, h);
                b.S(i, j, h) = w(i, j, n + h);
                b.St(i, j, h) = w(i, j, h) - pt.gamma(h, i, j);
            }
    return b;
}

inline ConnectionBlocks koszul_oracle(const InducedChart& chart, const Vector& y, double h = fd::kStep) {
    return extract_blocks(chart.point(y), koszul_frame_connection(chart, y, h));
}

/// Max |Gamma^h_ij - (horizontal part of nabla_{delta_i} delta_j minus St)|,
/// i.e. how well a frame connection reproduces the base Christoffel symbols.
inline double base_christoffel_residual(const CotangentPoint& pt, const Array3& w, const ConnectionBlocks& b) {
    const int n = pt.n();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int h = 0; h < n; ++h)
                worst = std::max(worst, std::abs(w(i, j, h) - b.St(i, j, h) - pt.gamma(h, i, j)));
    return worst;
}

struct MetricTorsionResidual {
    double metric = 0.0;   ///< max |(nabla_{E_a} G)(E_b, E_c)|
    double torsion = 0.0;  ///< max |nabla_a E_b - nabla_b E_a - [E_a, E_b]|
};

/// Residuals of nabla G = 0 and T = 0 for a frame connection, with frame
/// derivatives and brackets taken numerically in the induced chart.
inline MetricTorsionResidual metric_torsion_check(const InducedChart& chart, const Vector& y, const Array3& w,
                                                  double h = fd::kStep) {
    const int dim = static_cast<int>(y.size());
    const CotangentPoint pt = chart.point(y);
    const Matrix phi = frame_matrix(pt);
    const Matrix phi_inv = frame_matrix_inverse(pt);
    const auto dphi = frame_matrix_partials(chart, y, h);
    const auto frame_metric = [&](const Vector& z) {
        const CotangentPoint q = chart.point(z);
        return assemble_G(q, chart.family().at(q.t, false).metric).dense();
    };
    const Matrix G = frame_metric(y);
    const auto dG = fd::partials(frame_metric, y, h);

    MetricTorsionResidual r;
    for (int a = 0; a < dim; ++a) {
        Matrix ea_G = Matrix::Zero(dim, dim);
        for (int mu = 0; mu < dim; ++mu) ea_G += phi(mu, a) * dG[mu];
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c) {
                double acc = ea_G(b, c);
                for (int d = 0; d < dim; ++d) acc -= w(a, b, d) * G(d, c) + w(a, c, d) * G(b, d);
                r.metric = std::max(r.metric, std::abs(acc));
            }
        for (int b = 0; b < dim; ++b) {
            Vector bracket = Vector::Zero(dim);
            for (int mu = 0; mu < dim; ++mu)
                for (int nu = 0; nu < dim; ++nu)
                    bracket(nu) += phi(mu, a) * dphi[mu](nu, b) - phi(mu, b) * dphi[mu](nu, a);
            const Vector fb = phi_inv * bracket;
            for (int c = 0; c < dim; ++c)
                r.torsion = std::max(r.torsion, std::abs(w(a, b, c) - w(b, a, c) - fb(c)));
        }
    }
    return r;
}

}  // namespace natlift
