#pragma once

// First-order dual numbers a + b eps with eps^2 = 0. Arithmetic on Dual
// carries exact first derivatives through the chain and product rules.

#include <cmath>

namespace qkham {

template <typename T = double>
struct Dual {
    T value{};
    T derivative{};

    constexpr Dual() = default;
    constexpr Dual(T v) : value(v) {}  // NOLINT: constants promote implicitly
    constexpr Dual(T v, T d) : value(v), derivative(d) {}

    static constexpr Dual variable(T v) { return {v, T{1}}; }

    constexpr Dual operator-() const { return {-value, -derivative}; }

    constexpr Dual& operator+=(const Dual& o) {
        value += o.value;
        derivative += o.derivative;
        return *this;
    }
    constexpr Dual& operator-=(const Dual& o) {
        value -= o.value;
        derivative -= o.derivative;
        return *this;
    }
    constexpr Dual& operator*=(const Dual& o) {
        derivative = derivative * o.value + value * o.derivative;
        value *= o.value;
        return *this;
    }
    constexpr Dual& operator/=(const Dual& o) {
        derivative = (derivative * o.value - value * o.derivative) / (o.value * o.value);
        value /= o.value;
        return *this;
    }

    friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
    friend constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }

    friend constexpr bool operator==(const Dual&, const Dual&) = default;
};

template <typename T>
Dual<T> sin(const Dual<T>& x) {
    using std::cos, std::sin;
    return {sin(x.value), cos(x.value) * x.derivative};
}

template <typename T>
Dual<T> cos(const Dual<T>& x) {
    using std::cos, std::sin;
    return {cos(x.value), -sin(x.value) * x.derivative};
}

template <typename T>
Dual<T> exp(const Dual<T>& x) {
    using std::exp;
    const T e = exp(x.value);
    return {e, e * x.derivative};
}

template <typename T>
Dual<T> sqrt(const Dual<T>& x) {
    using std::sqrt;
    const T s = sqrt(x.value);
    return {s, x.derivative / (T{2} * s)};
}

/// u^v. When the exponent carries no derivative the log term is dropped, so
/// negative bases with integral exponents differentiate cleanly.
template <typename T>
Dual<T> pow(const Dual<T>& u, const Dual<T>& v) {
    using std::log, std::pow;
    const T p = pow(u.value, v.value);
    T d = v.value * pow(u.value, v.value - T{1}) * u.derivative;
    if (u.derivative == T{}) d = T{};
    if (v.derivative != T{}) d += p * log(u.value) * v.derivative;
    return {p, d};
}

}  // namespace qkham
