#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "natlift/bundle.hpp"
#include "natlift/connection.hpp"
#include "natlift/fd_geometry.hpp"
#include "natlift/index_array.hpp"

namespace natlift {

/// Adapted-frame components of K(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z:
///   K(delta_i, delta_j) delta_k = QQQQ(i,j,k,h) delta_h + QQQP(i,j,k,h) d^h
///   K(delta_i, delta_j) d^k     = QQPQ(i,j,k,h) delta_h + QQPP(i,j,k,h) d^h
///   K(d^i, d^j) delta_k         = PPQQ(i,j,k,h) delta_h + PPQP(i,j,k,h) d^h
///   K(d^i, d^j) d^k             = PPPQ(i,j,k,h) delta_h + PPPP(i,j,k,h) d^h
///   K(d^i, delta_j) delta_k     = PQQQ(i,j,k,h) delta_h + PQQP(i,j,k,h) d^h
///   K(d^i, delta_j) d^k         = PQPQ(i,j,k,h) delta_h + PQPP(i,j,k,h) d^h
struct CurvatureBlocks {
    Array4 QQQQ, QQQP, QQPQ, QQPP;
    Array4 PPQQ, PPQP, PPPQ, PPPP;
    Array4 PQQQ, PQQP, PQPQ, PQPP;

    int n() const { return QQQQ.dim(); }

    /// K(a, b, c, d): the E_d component of K(E_a, E_b) E_c.
    IndexArray<4> full() const {
        const int n = this->n();
        IndexArray<4> k(2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int c = 0; c < n; ++c)
                    for (int h = 0; h < n; ++h) {
                        const int I = n + i, J = n + j, C = n + c, H = n + h;
                        k(i, j, c, h) = QQQQ(i, j, c, h);
                        k(i, j, c, H) = QQQP(i, j, c, h);
                        k(i, j, C, h) = QQPQ(i, j, c, h);
                        k(i, j, C, H) = QQPP(i, j, c, h);
                        k(I, J, c, h) = PPQQ(i, j, c, h);
                        k(I, J, c, H) = PPQP(i, j, c, h);
                        k(I, J, C, h) = PPPQ(i, j, c, h);
                        k(I, J, C, H) = PPPP(i, j, c, h);
                        k(I, j, c, h) = PQQQ(i, j, c, h);
                        k(I, j, c, H) = PQQP(i, j, c, h);
                        k(I, j, C, h) = PQPQ(i, j, c, h);
                        k(I, j, C, H) = PQPP(i, j, c, h);
                        k(j, I, c, h) = -PQQQ(i, j, c, h);
                        k(j, I, c, H) = -PQQP(i, j, c, h);
                        k(j, I, C, h) = -PQPQ(i, j, c, h);
                        k(j, I, C, H) = -PQPP(i, j, c, h);
                    }
        return k;
    }

    static CurvatureBlocks from_full(const Array4& k) {
        const int n = k.dim() / 2;
        CurvatureBlocks b;
        Array4* blocks[] = {&b.QQQQ, &b.QQQP, &b.QQPQ, &b.QQPP, &b.PPQQ, &b.PPQP,
                            &b.PPPQ, &b.PPPP, &b.PQQQ, &b.PQQP, &b.PQPQ, &b.PQPP};
        // Offsets of (first, second, third, output) frame arguments per block.
        static constexpr int offsets[12][4] = {{0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 1, 1},
                                               {1, 1, 0, 0}, {1, 1, 0, 1}, {1, 1, 1, 0}, {1, 1, 1, 1},
                                               {1, 0, 0, 0}, {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 0, 1, 1}};
        for (int s = 0; s < 12; ++s) {
            Array4& a = *blocks[s];
            a = Array4(n);
            const auto& o = offsets[s];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int c = 0; c < n; ++c)
                        for (int h = 0; h < n; ++h) a(i, j, c, h) = k(o[0] * n + i, o[1] * n + j, o[2] * n + c, o[3] * n + h);
        }
        return b;
    }

    double max_abs_diff_to(const CurvatureBlocks& o) const { return max_abs_diff(full(), o.full()); }
};

/// The twelve blocks from the closed-form connection and its vertical
/// derivatives.
inline CurvatureBlocks curvature_blocks(const CotangentPoint& pt, const ClosedFormConnection& conn) {
    using detail::tabulate4;
    const int n = pt.n();
    const auto& Q = conn.blocks.Q;
    const auto& Qt = conn.blocks.Qt;
    const auto& P = conn.blocks.P;
    const auto& Pt = conn.blocks.Pt;
    const auto& S = conn.blocks.S;
    const auto& St = conn.blocks.St;
    const auto& dQ = conn.derivatives.dQ;
    const auto& dQt = conn.derivatives.dQt;
    const auto& dP = conn.derivatives.dP;
    const auto& dPt = conn.derivatives.dPt;
    const auto& dS = conn.derivatives.dS;
    const auto& dSt = conn.derivatives.dSt;
    const auto& R = pt.riemann;
    const auto& R0 = pt.r0;

    CurvatureBlocks b;
    b.QQQQ = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = R(h, k, i, j);
        for (int l = 0; l < n; ++l)
            acc += St(j, k, l) * St(i, l, h) + S(j, k, l) * P(i, l, h) - St(i, k, l) * St(j, l, h) -
                   S(i, k, l) * P(j, l, h) - R0(l, i, j) * P(k, l, h);
        return acc;
    });
    b.QQQP = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
            acc += St(j, k, l) * S(i, l, h) + S(j, k, l) * Pt(i, l, h) - St(i, k, l) * S(j, l, h) -
                   S(i, k, l) * Pt(j, l, h) - R0(l, i, j) * Pt(k, l, h);
        return acc;
    });
    b.QQPQ = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
            acc += Pt(j, k, l) * P(i, l, h) + P(j, k, l) * St(i, l, h) - Pt(i, k, l) * P(j, l, h) -
                   P(i, k, l) * St(j, l, h) - R0(l, i, j) * Qt(l, k, h);
        return acc;
    });
    b.QQPP = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = -R(k, h, i, j);
        for (int l = 0; l < n; ++l)
            acc += Pt(j, k, l) * Pt(i, l, h) + P(j, k, l) * S(i, l, h) - Pt(i, k, l) * Pt(j, l, h) -
                   P(i, k, l) * S(j, l, h) - R0(l, i, j) * Q(l, k, h);
        return acc;
    });
    b.PPQQ = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dP(i, k, j, h) - dP(j, k, i, h);
        for (int l = 0; l < n; ++l)
            acc += Pt(k, j, l) * Qt(i, l, h) + P(k, j, l) * P(l, i, h) - Pt(k, i, l) * Qt(j, l, h) -
                   P(k, i, l) * P(l, j, h);
        return acc;
    });
    b.PPQP = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dPt(i, k, j, h) - dPt(j, k, i, h);
        for (int l = 0; l < n; ++l)
            acc += Pt(k, j, l) * Q(i, l, h) + P(k, j, l) * Pt(l, i, h) - Pt(k, i, l) * Q(j, l, h) -
                   P(k, i, l) * Pt(l, j, h);
        return acc;
    });
    b.PPPQ = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dQt(i, j, k, h) - dQt(j, i, k, h);
        for (int l = 0; l < n; ++l)
            acc += Q(j, k, l) * Qt(i, l, h) + Qt(j, k, l) * P(l, i, h) - Q(i, k, l) * Qt(j, l, h) -
                   Qt(i, k, l) * P(l, j, h);
        return acc;
    });
    b.PPPP = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dQ(i, j, k, h) - dQ(j, i, k, h);
        for (int l = 0; l < n; ++l)
            acc += Q(j, k, l) * Q(i, l, h) + Qt(j, k, l) * Pt(l, i, h) - Q(i, k, l) * Q(j, l, h) -
                   Qt(i, k, l) * Pt(l, j, h);
        return acc;
    });
    b.PQQQ = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dSt(i, j, k, h);
        for (int l = 0; l < n; ++l)
            acc += S(j, k, l) * Qt(i, l, h) + St(j, k, l) * P(l, i, h) - Pt(k, i, l) * P(j, l, h) -
                   P(k, i, l) * St(j, l, h);
        return acc;
    });
    b.PQQP = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dS(i, j, k, h);
        for (int l = 0; l < n; ++l)
            acc += St(j, k, l) * Pt(l, i, h) + S(j, k, l) * Q(i, l, h) - P(k, i, l) * S(j, l, h) -
                   Pt(k, i, l) * Pt(j, l, h);
        return acc;
    });
    b.PQPQ = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dP(i, j, k, h);
        for (int l = 0; l < n; ++l)
            acc += Pt(j, k, l) * Qt(i, l, h) + P(j, k, l) * P(l, i, h) - Q(i, k, l) * P(j, l, h) -
                   Qt(i, k, l) * St(j, l, h);
        return acc;
    });
    b.PQPP = tabulate4(n, [&](int i, int j, int k, int h) {
        double acc = dPt(i, j, k, h);
        for (int l = 0; l < n; ++l)
            acc += Pt(j, k, l) * Q(i, l, h) + P(j, k, l) * Pt(l, i, h) - Q(i, k, l) * Pt(j, l, h) -
                   Qt(i, k, l) * S(j, l, h);
        return acc;
    });
    return b;
}

inline CurvatureBlocks curvature_blocks(const CotangentPoint& pt, const MetricCoefficients& m) {
    return curvature_blocks(pt, closed_form_connection(pt, m));
}

/// Curvature of G from nested finite differences of the induced-chart
/// metric, carried to the adapted frame.
inline CurvatureBlocks curvature_oracle(const InducedChart& chart, const Vector& y, double h = fd::kStep) {
    const int dim = static_cast<int>(y.size());
    const CotangentPoint pt = chart.point(y);
    const Array4 rc = fd::riemann([&](const Vector& z) { return chart.metric(z); }, y, h);
    const Matrix phi = frame_matrix(pt);
    const Matrix phi_inv = frame_matrix_inverse(pt);
    // Contract one slot at a time.
    auto contract = [dim](const Array4& in, const Matrix& m, int slot) {
        Array4 out(dim);
        int idx[4];
        for (idx[0] = 0; idx[0] < dim; ++idx[0])
            for (idx[1] = 0; idx[1] < dim; ++idx[1])
                for (idx[2] = 0; idx[2] < dim; ++idx[2])
                    for (idx[3] = 0; idx[3] < dim; ++idx[3]) {
                        double acc = 0.0;
                        int src[4] = {idx[0], idx[1], idx[2], idx[3]};
                        for (int s = 0; s < dim; ++s) {
                            src[slot] = s;
                            acc += m(s, idx[slot]) * in(src[0], src[1], src[2], src[3]);
                        }
                        out(idx[0], idx[1], idx[2], idx[3]) = acc;
                    }
        return out;
    };
    // rc(rho, sigma, mu, nu) -> k(mu, nu, sigma, rho) in chart components.
    Array4 k(dim);
    for (int r = 0; r < dim; ++r)
        for (int s = 0; s < dim; ++s)
            for (int m = 0; m < dim; ++m)
                for (int n = 0; n < dim; ++n) k(m, n, s, r) = rc(r, s, m, n);
    k = contract(k, phi, 0);
    k = contract(k, phi, 1);
    k = contract(k, phi, 2);
    k = contract(k, phi_inv.transpose(), 3);
    return CurvatureBlocks::from_full(k);
}

/// max |K(a,b,c) + K(b,c,a) + K(c,a,b)| over frame triples.
inline double bianchi_residual(const Array4& k) {
    const int dim = k.dim();
    double worst = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c)
                for (int d = 0; d < dim; ++d)
                    worst = std::max(worst, std::abs(k(a, b, c, d) + k(b, c, a, d) + k(c, a, b, d)));
    return worst;
}

/// Ricci tensor Ric(Y, Z) = trace(X -> K(X, Y) Z) in the adapted frame.
/// hh(j,k) = Ric(delta_j, delta_k), hv(j,k) = Ric(delta_j, d^k),
/// vh(k,j) = Ric(d^k, delta_j), vv(j,k) = Ric(d^j, d^k).
inline BlockTensor ricci(const Array4& k) {
    const int dim = k.dim();
    Matrix ric = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
            for (int a = 0; a < dim; ++a) ric(b, c) += k(a, b, c, a);
    return BlockTensor::from_dense(ric);
}

/// The Ricci blocks assembled directly from the twelve curvature blocks.
struct RicciBlocks {
    Matrix QQ;  ///< Ric(delta_j, delta_k)
    Matrix PP;  ///< Ric(d^j, d^k)
    Matrix QP;  ///< QP(j,k) = Ric(delta_j, d^k)
    Matrix PQ;  ///< PQ(k,j) = Ric(d^k, delta_j)

    BlockTensor tensor() const { return {QQ, QP, PQ, PP}; }
};

inline RicciBlocks ricci_blocks(const CurvatureBlocks& b) {
    const int n = b.n();
    RicciBlocks r{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int h = 0; h < n; ++h) {
                r.QQ(j, k) += b.QQQQ(h, j, k, h) + b.PQQP(h, j, k, h);
                r.PP(j, k) += b.PPPP(h, j, k, h) - b.PQPQ(j, h, k, h);
                r.QP(j, k) += b.PQPP(h, j, k, h) + b.QQPQ(h, j, k, h);
                r.PQ(k, j) += -b.PQQQ(k, h, j, h) + b.PPQP(h, k, j, h);
            }
    return r;
}

inline double ricci_symmetry_residual(const BlockTensor& ric) {
    const Matrix r = ric.dense();
    return (r - r.transpose()).cwiseAbs().maxCoeff();
}

/// Least-squares split of a block into u * base + v * (a (x) b).
struct PatternFit {
    double u = 0.0;
    double v = std::numeric_limits<double>::quiet_NaN();  ///< NaN when the p-pattern is not identifiable
    double misfit = 0.0;                                  ///< max |block - fit|
};

inline PatternFit fit_pattern(const Matrix& block, const Matrix& base, const Vector& a, const Vector& b,
                              bool with_p_pattern) {
    const Eigen::Index n = block.rows();
    const Eigen::Index cols = with_p_pattern ? 2 : 1;
    Matrix design(n * n, cols);
    Vector rhs(n * n);
    const Matrix outer = a * b.transpose();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            design(i * n + j, 0) = base(i, j);
            if (with_p_pattern) design(i * n + j, 1) = outer(i, j);
            rhs(i * n + j) = block(i, j);
        }
    const Vector sol = design.colPivHouseholderQr().solve(rhs);
    PatternFit fit;
    fit.u = sol(0);
    if (with_p_pattern) fit.v = sol(1);
    fit.misfit = (design * sol - rhs).cwiseAbs().maxCoeff();
    return fit;
}

struct EinsteinResidual {
    BlockTensor residual;  ///< Ric - rho G
    double max_abs = 0.0;
    PatternFit hh, vv, hv;
};

/// Squared covector length below which the p-bilinear pattern is not fitted.
inline constexpr double kPatternGuard = 1e-4;

inline EinsteinResidual einstein_residual(const CotangentPoint& pt, const BlockTensor& ric, const BlockTensor& G,
                                          double rho) {
    EinsteinResidual e;
    e.residual = BlockTensor::from_dense(ric.dense() - rho * G.dense());
    e.max_abs = e.residual.dense().cwiseAbs().maxCoeff();
    const bool identifiable = pt.p.squaredNorm() >= kPatternGuard;
    const int n = pt.n();
    e.hh = fit_pattern(e.residual.hh, pt.g, pt.p, pt.p, identifiable);
    e.vv = fit_pattern(e.residual.vv, pt.g_inv, pt.g0, pt.g0, identifiable);
    e.hv = fit_pattern(e.residual.hv, Matrix::Identity(n, n), pt.p, pt.g0, identifiable);
    return e;
}

/// k(X) = G(K(X, JX) JX, X) / G(X, X)^2 for a frame vector X.
inline double holomorphic_sectional_curvature(const Array4& k, const BlockTensor& G, const BlockTensor& J,
                                              const Vector& X) {
    const Matrix g = G.dense();
    const double norm2 = X.dot(g * X);
    if (!(norm2 > 0.0)) throw EvaluationError("holomorphic sectional curvature needs a nonzero vector");
    const Vector JX = J.dense() * X;
    const int dim = k.dim();
    Vector out = Vector::Zero(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c) {
                const double w = X(a) * JX(b) * JX(c);
                if (w == 0.0) continue;
                for (int d = 0; d < dim; ++d) out(d) += k(a, b, c, d) * w;
            }
    return out.dot(g * X) / (norm2 * norm2);
}

}  // namespace natlift
