#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "natlift/errors.hpp"
#include "natlift/family_spec.hpp"
#include "natlift/jet.hpp"
#include "natlift/space_form.hpp"

namespace natlift {

/// Coefficients of the almost complex structure J (a4 = -a3, b4 = -b3).
struct StructureCoefficients {
    Jet3 a1, a2, a3;
    Jet3 b1, b2, b3;
};

/// Coefficients of the lifted metric G.
struct MetricCoefficients {
    Jet3 c1, c2, c3;
    Jet3 d1, d2, d3;
};

/// a2 = (1 + a3^2) / a1, the first closure relation of J^2 = -1.
inline Jet3 close_a2(const Jet3& a1, const Jet3& a3) {
    if (a1.v0 == 0.0) throw DegenerateStructureError("a1 vanishes; a1 a2 = 1 + a3^2 has no solution");
    return (1.0 + a3 * a3) / a1;
}

struct IntegrabilityB {
    Jet3 b1, b2, b3;
    Jet3 denominator;
};

/// b1, b2, b3 making J integrable over a base of constant curvature c.
///
/// The quotients contain a1', a2', a3', so the returned jets are exact to
/// second order only; their third slot is NaN.
inline IntegrabilityB integrability_b(const Jet3& a1, const Jet3& a2, const Jet3& a3, double c, double t) {
    const Jet3 T = Jet3::variable(t);
    const Jet3 da1 = differentiate(a1);
    const Jet3 da2 = differentiate(a2);
    const Jet3 da3 = differentiate(a3);

    const Jet3 den = a1 - 2.0 * T * da1 - 2.0 * c * T * a2 - 4.0 * c * T * T * da2;
    const double scale = std::max({std::abs(a1.v0), std::abs(2.0 * t * da1.v0), std::abs(2.0 * c * t * a2.v0),
                                   std::abs(4.0 * c * t * t * da2.v0)});
    if (std::abs(den.v0) <= 1e-13 * std::max(scale, 1.0))
        throw IntegrabilityDegeneracyError("integrability denominator vanishes at t = " + std::to_string(t), t);

    const Jet3 n1 = 2.0 * c * c * T * a2 * a2 + 2.0 * c * T * a1 * da2 + a1 * da1 - c + 3.0 * c * a3 * a3;
    const Jet3 n2 = 2.0 * T * da3 * da3 - 2.0 * T * da1 * da2 + c * a2 * a2 + 2.0 * c * T * a2 * da2 + a1 * da2;
    const Jet3 n3 = a1 * da3 + 2.0 * c * a2 * a3 + 4.0 * c * T * da2 * a3 - 2.0 * c * T * a2 * da3;
    const Jet3 inv = reciprocal(den);
    return {n1 * inv, n2 * inv, n3 * inv, den};
}

/// Residuals of the equivalent form of the integrability conditions, which
/// recovers a1', a2', a3' from the b-coefficients. Returns max |lhs - rhs|.
inline double integrability_equivalent_residual(const StructureCoefficients& s, double c, double t) {
    const double a1 = s.a1.v0, a2 = s.a2.v0, a3 = s.a3.v0;
    const double b1 = s.b1.v0, b3 = s.b3.v0;
    const double w = a1 + 2.0 * t * b1;
    const double r1 = s.a1.v1 - (a1 * b1 + c - 3.0 * c * a3 * a3 - 4.0 * c * t * a3 * b3) / w;
    const double r2 = s.a2.v1 - (2.0 * a3 * b3 - a2 * b1 - c * a2 * a2) / w;
    const double r3 = s.a3.v1 - (a1 * b3 - 2.0 * c * a2 * a3 - 2.0 * c * t * a2 * b3) / w;
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

/// Max residual of a1 a2 = 1 + a3^2 and (a1+2tb1)(a2+2tb2) = 1 + (a3+2tb3)^2.
inline double closure_residual(const StructureCoefficients& s, double t) {
    const double r1 = s.a1.v0 * s.a2.v0 - 1.0 - s.a3.v0 * s.a3.v0;
    const double h1 = s.a1.v0 + 2.0 * t * s.b1.v0;
    const double h2 = s.a2.v0 + 2.0 * t * s.b2.v0;
    const double h3 = s.a3.v0 + 2.0 * t * s.b3.v0;
    const double r2 = h1 * h2 - 1.0 - h3 * h3;
    return std::max(std::abs(r1), std::abs(r2));
}

/// Metric coefficients of the Hermitian metric proportional to J with factors
/// lambda and lambda + 2 t mu, without any admissibility test:
///   c_i = lambda a_i,  d_i = lambda b_i + mu a_i + 2 t mu b_i.
inline MetricCoefficients proportional_coeffs(const StructureCoefficients& s, const Jet3& lambda, const Jet3& mu,
                                              double t) {
    const Jet3 T = Jet3::variable(t);
    const Jet3 two_t_mu = 2.0 * T * mu;
    MetricCoefficients m;
    m.c1 = lambda * s.a1;
    m.c2 = lambda * s.a2;
    m.c3 = lambda * s.a3;
    m.d1 = lambda * s.b1 + mu * s.a1 + two_t_mu * s.b1;
    m.d2 = lambda * s.b2 + mu * s.a2 + two_t_mu * s.b2;
    m.d3 = lambda * s.b3 + mu * s.a3 + two_t_mu * s.b3;
    return m;
}

/// As proportional_coeffs, but requires lambda > 0 and lambda + 2 t mu > 0.
/// The Kaehler case is mu = lambda'.
inline MetricCoefficients kahler_coeffs(const StructureCoefficients& s, const Jet3& lambda, const Jet3& mu, double t) {
    if (!(lambda.v0 > 0.0))
        throw InadmissibleStructureError("lambda must be positive, got " + std::to_string(lambda.v0) +
                                         " at t = " + std::to_string(t));
    if (!(lambda.v0 + 2.0 * t * mu.v0 > 0.0))
        throw InadmissibleStructureError("lambda + 2 t mu must be positive, got " +
                                         std::to_string(lambda.v0 + 2.0 * t * mu.v0) + " at t = " +
                                         std::to_string(t));
    return proportional_coeffs(s, lambda, mu, t);
}

inline MetricCoefficients kahler_coeffs(const StructureCoefficients& s, const Jet3& lambda, double t) {
    return kahler_coeffs(s, lambda, differentiate(lambda), t);
}

/// Positivity margins of a coefficient set; every field must be > 0 for an
/// admissible Kaehler structure (the denominator only needs to be nonzero).
struct PositivityReport {
    double lambda = 0.0;
    double lambda_plus = 0.0;         ///< lambda + 2 t lambda'
    double horizontal = 0.0;          ///< c1 + 2 t d1
    double vertical = 0.0;            ///< c2 + 2 t d2
    double determinant = 0.0;         ///< (c1+2td1)(c2+2td2) - (c3+2td3)^2
    double integrability_denominator = 0.0;

    bool lambda_ok() const { return lambda > 0.0 && lambda_plus > 0.0; }
    bool metric_ok() const { return horizontal > 0.0 && vertical > 0.0 && determinant > 0.0; }
    bool denominator_ok() const { return integrability_denominator != 0.0; }
    bool admissible() const { return lambda_ok() && metric_ok() && denominator_ok(); }

    /// Smallest of the positive-required margins.
    double min_margin() const { return std::min({lambda, lambda_plus, horizontal, vertical, determinant}); }
};

inline PositivityReport positivity_check(const MetricCoefficients& m, const Jet3& lambda, const Jet3& mu,
                                         double denominator, double t) {
    PositivityReport r;
    r.lambda = lambda.v0;
    r.lambda_plus = lambda.v0 + 2.0 * t * mu.v0;
    r.horizontal = m.c1.v0 + 2.0 * t * m.d1.v0;
    r.vertical = m.c2.v0 + 2.0 * t * m.d2.v0;
    const double off = m.c3.v0 + 2.0 * t * m.d3.v0;
    r.determinant = r.horizontal * r.vertical - off * off;
    r.integrability_denominator = denominator;
    return r;
}

/// Case-I Einstein factor lambda = 2 a1 c (n+1) / (rho (a1^2 + 2 c t (1 + a3^2))).
inline Jet3 lambda_case1(const Jet3& a1, const Jet3& a3, double c, int n, double rho, double t) {
    if (rho == 0.0) throw EvaluationError("case-I lambda needs a nonzero rho");
    const Jet3 T = Jet3::variable(t);
    const Jet3 den = rho * (a1 * a1 + 2.0 * c * T * (1.0 + a3 * a3));
    if (den.v0 == 0.0) throw EvaluationError("case-I lambda denominator vanishes at t = " + std::to_string(t));
    return 2.0 * c * (n + 1) * a1 / den;
}

/// Radicand under the square root of the case-II lambda.
inline Jet3 case2_radicand(const Jet3& a1, const Jet3& a3, double c, double t) {
    const Jet3 T = Jet3::variable(t);
    const Jet3 a1s = a1 * a1, a3s = a3 * a3;
    return a1s * a1s - 4.0 * a1s * c * T + 4.0 * a1s * a3s * c * T + 4.0 * c * c * T * T +
           8.0 * a3s * c * c * T * T + 4.0 * a3s * a3s * c * c * T * T;
}

/// Case-II Einstein factor
///   lambda = n (a1^2 + 2ct + 2 a3^2 c t +- sqrt(radicand)) / (4 a1 rho t),
/// defined only for t > 0. `branch` is +1 or -1.
inline Jet3 lambda_case2(const Jet3& a1, const Jet3& a3, double c, int n, double rho, double t, int branch) {
    if (!(t > 0.0)) throw DomainError("case-II lambda is defined only for nonzero covectors (t > 0)");
    if (rho == 0.0) throw EvaluationError("case-II lambda needs a nonzero rho");
    if (branch != 1 && branch != -1) throw ConfigError("case-II branch must be +1 or -1");
    const Jet3 rad = case2_radicand(a1, a3, c, t);
    if (rad.v0 < 0.0) throw EvaluationError("case-II radicand is negative at t = " + std::to_string(t));
    if (rad.v0 == 0.0) throw EvaluationError("case-II radicand vanishes at t = " + std::to_string(t));
    const Jet3 T = Jet3::variable(t);
    const Jet3 num = a1 * a1 + 2.0 * c * T + 2.0 * a3 * a3 * c * T + static_cast<double>(branch) * sqrt(rad);
    const Jet3 den = 4.0 * a1 * rho * T;
    if (den.v0 == 0.0) throw EvaluationError("case-II lambda denominator vanishes");
    return static_cast<double>(n) * num / den;
}

/// lambda' forced by the case-I relation, solved for lambda':
///   lambda' = -lambda [a1 (a1 a1' + 2c(1+a3^2)) - 2ct (a1' (1+a3^2) - 2 a1 a3 a3')]
///             / (a1 [a1^2 + 2ct(1+a3^2)]).
inline double lambda_prime_case1(const Jet3& a1, const Jet3& a3, double lambda, double c, double t) {
    const double A1 = a1.v0, dA1 = a1.v1, A3 = a3.v0, dA3 = a3.v1;
    const double q = 1.0 + A3 * A3;
    const double den = A1 * (A1 * A1 + 2.0 * c * t * q);
    if (den == 0.0) throw EvaluationError("case-I lambda' denominator vanishes at t = " + std::to_string(t));
    const double num = A1 * (A1 * dA1 + 2.0 * c * q) - 2.0 * c * t * (dA1 * q - 2.0 * A1 * A3 * dA3);
    return -lambda * num / den;
}

/// The factors E and F that multiply An + B in the two residual equations,
/// and the quadratic Q in a1^2 obtained from F.
struct EFQ {
    double E = 0.0;
    double F = 0.0;
    double Q = 0.0;
    double u = 0.0;  ///< a1 - 2 a1' t
    double v = 0.0;  ///< 2 a1 a3' t
    /// (1 + a3^2) u^2 + 2 a3 u v + v^2, algebraically equal to E.
    double E_from_decomposition = 0.0;
};

inline EFQ e_f_expressions(const Jet3& a1j, const Jet3& a3j, double c, double t) {
    const double a1 = a1j.v0, d1 = a1j.v1, a3 = a3j.v0, d3 = a3j.v1;
    EFQ r;
    r.E = a1 * a1 + a1 * a1 * a3 * a3 - 4.0 * a1 * d1 * t - 4.0 * a1 * d1 * a3 * a3 * t + 4.0 * a1 * a1 * a3 * d3 * t +
          4.0 * d1 * d1 * t * t + 4.0 * d1 * d1 * a3 * a3 * t * t - 8.0 * a1 * d1 * a3 * d3 * t * t +
          4.0 * a1 * a1 * d3 * d3 * t * t;
    r.F = a1 * a1 * a1 * a3 - 2.0 * a1 * a1 * d1 * a3 * t + 2.0 * a1 * a1 * a1 * d3 * t + 2.0 * a1 * a3 * c * t +
          2.0 * a1 * a3 * a3 * a3 * c * t - 4.0 * d1 * a3 * c * t * t - 4.0 * d1 * a3 * a3 * a3 * c * t * t -
          4.0 * a1 * d3 * c * t * t + 4.0 * a1 * a3 * a3 * d3 * c * t * t;
    const double q = 1.0 + a3 * a3;
    r.Q = (a1 * a1) * (a1 * a1) - 4.0 * a1 * a1 * q * c * t + 4.0 * c * c * t * t * q * q;
    r.u = a1 - 2.0 * d1 * t;
    r.v = 2.0 * a1 * d3 * t;
    r.E_from_decomposition = q * r.u * r.u + 2.0 * a3 * r.u * r.v + r.v * r.v;
    return r;
}

/// Residuals of the two alternatives left by the Einstein conditions, each
/// divided by a term scale: the sum of the absolute values of its terms plus
/// the size of the leading term with lambda' replaced by lambda (a1^3 lambda,
/// resp. a1^6 lambda^2), so that families on which every term vanishes are
/// not normalised by rounding noise.
struct CaseResiduals {
    double case1 = 0.0;
    double case2 = 0.0;
    double case1_raw = 0.0;
    double case2_raw = 0.0;
};

inline CaseResiduals case_equations_residual(const Jet3& a1j, const Jet3& a3j, const Jet3& lambda, double c,
                                             double t) {
    const double a1 = a1j.v0, d1 = a1j.v1, a3 = a3j.v0, d3 = a3j.v1;
    const double l = lambda.v0, dl = lambda.v1;
    auto sum = [](double reference, std::initializer_list<double> terms, double& raw) {
        double s = 0.0, scale = std::abs(reference);
        for (double x : terms) {
            s += x;
            scale += std::abs(x);
        }
        raw = s;
        return scale > 0.0 ? std::abs(s) / scale : 0.0;
    };
    const double a1_2 = a1 * a1, a1_3 = a1_2 * a1, a1_4 = a1_2 * a1_2, a1_5 = a1_4 * a1, a1_6 = a1_3 * a1_3;
    const double a3_2 = a3 * a3, a3_3 = a3_2 * a3, a3_4 = a3_2 * a3_2;
    const double t2 = t * t, t3 = t2 * t, c2 = c * c;
    const double l2 = l * l, ll = l * dl, dl2 = dl * dl;

    CaseResiduals r;
    r.case1 = sum(a1_3 * l, {a1_2 * d1 * l, 2 * a1 * c * l, 2 * a1 * a3_2 * c * l, a1_3 * dl, -2 * d1 * c * l * t,
                   -2 * d1 * a3_2 * c * l * t, 4 * a1 * a3 * d3 * c * l * t, 2 * a1 * c * dl * t,
                   2 * a1 * a3_2 * c * dl * t},
                  r.case1_raw);
    r.case2 = sum(a1_6 * l2, {a1_5 * d1 * l2,
                   2 * a1_4 * a3_2 * c * l2,
                   a1_6 * ll,
                   -a1_4 * d1 * d1 * l2 * t,
                   -4 * a1_3 * d1 * c * l2 * t,
                   -4 * a1_3 * d1 * a3_2 * c * l2 * t,
                   4 * a1_4 * a3 * d3 * c * l2 * t,
                   -4 * a1_4 * c * ll * t,
                   4 * a1_4 * a3_2 * c * ll * t,
                   a1_6 * dl2 * t,
                   4 * a1_2 * d1 * d1 * c * l2 * t2,
                   4 * a1_2 * d1 * d1 * a3_2 * c * l2 * t2,
                   -8 * a1_3 * d1 * a3 * d3 * c * l2 * t2,
                   4 * a1 * d1 * c2 * l2 * t2,
                   8 * a1 * d1 * a3_2 * c2 * l2 * t2,
                   4 * a1 * d1 * a3_4 * c2 * l2 * t2,
                   -8 * a1_2 * a3 * d3 * c2 * l2 * t2,
                   -8 * a1_2 * a3_3 * d3 * c2 * l2 * t2,
                   4 * a1_2 * c2 * ll * t2,
                   8 * a1_2 * a3_2 * c2 * ll * t2,
                   4 * a1_2 * a3_4 * c2 * ll * t2,
                   -4 * a1_4 * c * dl2 * t2,
                   4 * a1_4 * a3_2 * c * dl2 * t2,
                   -4 * d1 * d1 * c2 * l2 * t3,
                   -8 * d1 * d1 * a3_2 * c2 * l2 * t3,
                   -4 * d1 * d1 * a3_4 * c2 * l2 * t3,
                   16 * a1 * d1 * a3 * d3 * c2 * l2 * t3,
                   16 * a1 * d1 * a3_3 * d3 * c2 * l2 * t3,
                   -16 * a1_2 * a3_2 * d3 * d3 * c2 * l2 * t3,
                   4 * a1_2 * c2 * dl2 * t3,
                   8 * a1_2 * a3_2 * c2 * dl2 * t3,
                   4 * a1_2 * a3_4 * c2 * dl2 * t3},
                  r.case2_raw);
    return r;
}

/// How lambda is obtained from the other data.
struct LambdaRule {
    enum class Kind { explicit_spec, case1, case2 };
    Kind kind = Kind::explicit_spec;
    FamilySpec spec = FamilySpec::constant(1.0);
    int branch = -1;

    static LambdaRule explicit_spec_rule(FamilySpec s) { return {Kind::explicit_spec, std::move(s), -1}; }
    static LambdaRule case1_rule() { return {Kind::case1, FamilySpec::constant(0.0), -1}; }
    static LambdaRule case2_rule(int branch) { return {Kind::case2, FamilySpec::constant(0.0), branch}; }

    std::string to_string() const {
        switch (kind) {
            case Kind::case1: return "case1";
            case Kind::case2: return branch > 0 ? "case2+" : "case2-";
            default: return "explicit";
        }
    }
};

/// Deliberate defects injected for negative controls. Defaults are inert.
struct Perturbation {
    double a2_shift = 0.0;      ///< breaks a1 a2 = 1 + a3^2
    double b1_shift = 0.0;      ///< breaks integrability
    double mu_shift = 0.0;      ///< breaks mu = lambda' (Kaehler closedness)
    double lambda_scale = 1.0;  ///< breaks the Einstein factor
    double c1_factor = 1.0;     ///< breaks c1 = lambda a1 (Hermitian pairing)
};

/// Every coefficient at one value of t.
struct CoefficientValues {
    double t = 0.0;
    StructureCoefficients structure;
    Jet3 lambda;
    Jet3 mu;
    MetricCoefficients metric;
    Jet3 integrability_denominator;

    PositivityReport positivity() const {
        return positivity_check(metric, lambda, mu, integrability_denominator.v0, t);
    }
};

/// The parameter functions a1, a3, lambda over a space form, plus the
/// context (rho) the Einstein rules need.
struct CoefficientFamily {
    FamilySpec a1 = FamilySpec::constant(1.0);
    FamilySpec a3 = FamilySpec::constant(0.0);
    LambdaRule lambda = LambdaRule::explicit_spec_rule(FamilySpec::constant(1.0));
    SpaceForm space;
    double rho = 0.0;
    Perturbation perturbation;

    Jet3 lambda_at(const Jet3& a1j, const Jet3& a3j, double t) const {
        switch (lambda.kind) {
            case LambdaRule::Kind::case1: return lambda_case1(a1j, a3j, space.c, space.n, rho, t);
            case LambdaRule::Kind::case2: return lambda_case2(a1j, a3j, space.c, space.n, rho, t, lambda.branch);
            default: return lambda.spec.eval(t);
        }
    }

    /// Throws DegenerateStructureError, IntegrabilityDegeneracyError or
    /// EvaluationError when t is outside the family's domain, and
    /// InadmissibleStructureError on a sign violation of lambda or
    /// lambda + 2 t mu unless `enforce_lambda_signs` is false.
    CoefficientValues at(double t, bool enforce_lambda_signs = true) const {
        CoefficientValues v;
        v.t = t;
        auto& s = v.structure;
        s.a1 = a1.eval(t);
        s.a3 = a3.eval(t);
        s.a2 = close_a2(s.a1, s.a3);
        const IntegrabilityB b = integrability_b(s.a1, s.a2, s.a3, space.c, t);
        s.b1 = b.b1 + perturbation.b1_shift;
        s.b2 = b.b2;
        s.b3 = b.b3;
        s.a2 += perturbation.a2_shift;
        v.integrability_denominator = b.denominator;
        v.lambda = perturbation.lambda_scale * lambda_at(s.a1, s.a3, t);
        v.mu = differentiate(v.lambda) + perturbation.mu_shift;
        v.metric = enforce_lambda_signs ? kahler_coeffs(s, v.lambda, v.mu, t) : proportional_coeffs(s, v.lambda, v.mu, t);
        v.metric.c1 *= perturbation.c1_factor;
        return v;
    }

    /// Admissibility margins at t. Never throws: a t at which the
    /// coefficients cannot be evaluated yields an all-zero report.
    PositivityReport positivity(double t) const {
        try {
            return at(t, false).positivity();
        } catch (const Error&) {
            return PositivityReport{};
        }
    }
};

}  // namespace natlift
