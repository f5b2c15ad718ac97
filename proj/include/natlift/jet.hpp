#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "natlift/errors.hpp"

namespace natlift {

/// Truncated Taylor jet of order 3 in the energy density t.
///
/// Slot k holds the k-th derivative d^k f / dt^k (not the Taylor coefficient),
/// so a jet of the identity function at t0 is (t0, 1, 0, 0).
struct Jet3 {
    double v0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;

    constexpr Jet3() = default;
    // Implicit so that plain numbers act as constant jets in mixed arithmetic.
    constexpr Jet3(double value) : v0(value) {}  // NOLINT(google-explicit-constructor)
    constexpr Jet3(double value, double d1, double d2, double d3) : v0(value), v1(d1), v2(d2), v3(d3) {}

    static constexpr Jet3 constant(double value) { return Jet3{value}; }
    static constexpr Jet3 variable(double t) { return Jet3{t, 1.0, 0.0, 0.0}; }

    constexpr double operator[](int k) const {
        switch (k) {
            case 0: return v0;
            case 1: return v1;
            case 2: return v2;
            default: return v3;
        }
    }

    constexpr Jet3& operator+=(const Jet3& o) {
        v0 += o.v0;
        v1 += o.v1;
        v2 += o.v2;
        v3 += o.v3;
        return *this;
    }
    constexpr Jet3& operator-=(const Jet3& o) {
        v0 -= o.v0;
        v1 -= o.v1;
        v2 -= o.v2;
        v3 -= o.v3;
        return *this;
    }
    constexpr Jet3& operator*=(const Jet3& o) {
        *this = Jet3{v0 * o.v0, v1 * o.v0 + v0 * o.v1, v2 * o.v0 + 2.0 * v1 * o.v1 + v0 * o.v2,
                     v3 * o.v0 + 3.0 * v2 * o.v1 + 3.0 * v1 * o.v2 + v0 * o.v3};
        return *this;
    }

    friend constexpr Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
    friend constexpr Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
    friend constexpr Jet3 operator*(Jet3 a, const Jet3& b) { return a *= b; }
    friend constexpr Jet3 operator-(const Jet3& a) { return Jet3{-a.v0, -a.v1, -a.v2, -a.v3}; }

    friend std::ostream& operator<<(std::ostream& os, const Jet3& j) {
        return os << '(' << j.v0 << ", " << j.v1 << ", " << j.v2 << ", " << j.v3 << ')';
    }
};

/// Jet of f(a) given f and its first three derivatives evaluated at a.v0
/// (Faa di Bruno to third order).
constexpr Jet3 compose(const Jet3& a, double f0, double f1, double f2, double f3) {
    return Jet3{f0, f1 * a.v1, f2 * a.v1 * a.v1 + f1 * a.v2,
                f3 * a.v1 * a.v1 * a.v1 + 3.0 * f2 * a.v1 * a.v2 + f1 * a.v3};
}

inline Jet3 reciprocal(const Jet3& b) {
    if (b.v0 == 0.0) throw EvaluationError("division by zero jet");
    const double r = 1.0 / b.v0;
    return compose(b, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }

inline Jet3 sqrt(const Jet3& a) {
    if (!(a.v0 > 0.0)) throw EvaluationError("square root of non-positive jet");
    const double s = std::sqrt(a.v0);
    return compose(a, s, 0.5 / s, -0.25 / (s * a.v0), 0.375 / (s * a.v0 * a.v0));
}

/// Integer power by repeated multiplication; exact for any sign of the base.
inline Jet3 pow(const Jet3& a, int k) {
    if (k < 0) return reciprocal(pow(a, -k));
    Jet3 result{1.0};
    Jet3 base = a;
    while (k > 0) {
        if (k & 1) result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

/// Real power; requires a positive base unless the exponent is integral.
inline Jet3 pow(const Jet3& a, double r) {
    if (r == std::floor(r) && std::abs(r) < 64.0) return pow(a, static_cast<int>(r));
    if (!(a.v0 > 0.0)) throw EvaluationError("non-integral power of non-positive jet");
    const double x = a.v0;
    const double f0 = std::pow(x, r);
    return compose(a, f0, r * f0 / x, r * (r - 1.0) * f0 / (x * x), r * (r - 1.0) * (r - 2.0) * f0 / (x * x * x));
}

/// Derivative of a jet as a jet. The third slot is unknown and set to NaN,
/// which only ever propagates into third slots of downstream products.
constexpr Jet3 differentiate(const Jet3& a) {
    return Jet3{a.v1, a.v2, a.v3, std::numeric_limits<double>::quiet_NaN()};
}

}  // namespace natlift
