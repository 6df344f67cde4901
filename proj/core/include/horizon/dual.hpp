#pragma once

#include <cmath>

namespace horizon {

/// First-order dual number a + b*eps with eps^2 = 0. Arithmetic
/// carries the derivative along with the value, so evaluating an
/// expression on Dual inputs yields the exact forward-mode derivative
/// up to floating-point rounding.
///
/// The operators are plain IEEE arithmetic; domain checking (log of a
/// non-positive value, |x| at 0, ...) is the evaluator's job.
struct Dual {
    double value = 0.0;
    double deriv = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double v) : value(v) {}
    constexpr Dual(double v, double d) : value(v), deriv(d) {}

    constexpr Dual operator-() const { return {-value, -deriv}; }

    friend constexpr Dual operator+(Dual a, Dual b) {
        return {a.value + b.value, a.deriv + b.deriv};
    }
    friend constexpr Dual operator-(Dual a, Dual b) {
        return {a.value - b.value, a.deriv - b.deriv};
    }
    friend constexpr Dual operator*(Dual a, Dual b) {
        return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
    }
    friend constexpr Dual operator/(Dual a, Dual b) {
        return {a.value / b.value,
                (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
    }
};

inline Dual sqrt(Dual x) {
    double s = std::sqrt(x.value);
    return {s, x.deriv / (2.0 * s)};
}

inline Dual log(Dual x) { return {std::log(x.value), x.deriv / x.value}; }

inline Dual exp(Dual x) {
    double e = std::exp(x.value);
    return {e, x.deriv * e};
}

inline Dual sin(Dual x) { return {std::sin(x.value), x.deriv * std::cos(x.value)}; }

inline Dual cos(Dual x) { return {std::cos(x.value), -x.deriv * std::sin(x.value)}; }

/// |x| with the one-sided derivative; the evaluator rejects x == 0
/// before calling this.
inline Dual abs(Dual x) {
    return x.value < 0.0 ? Dual{-x.value, -x.deriv} : Dual{x.value, x.deriv};
}

} // namespace horizon
