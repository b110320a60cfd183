#pragma once

#include <cmath>

namespace symadapt {

using std::abs;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tanh;

// First-order dual number over an arbitrary scalar T. Nesting Dual<Dual<...>>
// gives higher derivative orders; the tower below is instantiated up to
// kMaxDualLevel so that iterated Lie derivatives and brackets can be taken
// by plain forward-mode seeding.
template <typename T>
struct Dual {
  T re{};
  T du{};

  constexpr Dual() = default;
  constexpr Dual(double v) : re(v), du() {}  // NOLINT: implicit by design
  constexpr Dual(const T& r, const T& d) : re(r), du(d) {}

  friend constexpr Dual operator+(const Dual& a, const Dual& b) {
    return {a.re + b.re, a.du + b.du};
  }
  friend constexpr Dual operator+(const Dual& a, double b) { return {a.re + b, a.du}; }
  friend constexpr Dual operator+(double a, const Dual& b) { return {a + b.re, b.du}; }

  friend constexpr Dual operator-(const Dual& a, const Dual& b) {
    return {a.re - b.re, a.du - b.du};
  }
  friend constexpr Dual operator-(const Dual& a, double b) { return {a.re - b, a.du}; }
  friend constexpr Dual operator-(double a, const Dual& b) { return {a - b.re, T{} - b.du}; }
  friend constexpr Dual operator-(const Dual& a) { return {T{} - a.re, T{} - a.du}; }
  friend constexpr Dual operator+(const Dual& a) { return a; }

  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.re * b.re, a.re * b.du + a.du * b.re};
  }
  friend constexpr Dual operator*(const Dual& a, double b) { return {a.re * b, a.du * b}; }
  friend constexpr Dual operator*(double a, const Dual& b) { return {a * b.re, a * b.du}; }

  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    T q = a.re / b.re;
    return {q, (a.du - q * b.du) / b.re};
  }
  friend constexpr Dual operator/(const Dual& a, double b) { return {a.re / b, a.du / b}; }
  friend constexpr Dual operator/(double a, const Dual& b) {
    T q = a / b.re;
    return {q, (T{} - q * b.du) / b.re};
  }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
};

template <typename T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.re);
  return {e, a.du * e};
}

template <typename T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.re), a.du / a.re};
}

template <typename T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.re), a.du * cos(a.re)};
}

template <typename T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.re), T{} - a.du * sin(a.re)};
}

template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.re);
  return {s, a.du / (2.0 * s)};
}

// Power with constant real exponent (covers the u^beta x^mu structural forms).
template <typename T>
Dual<T> pow(const Dual<T>& a, double e) {
  return {pow(a.re, e), (e * a.du) * pow(a.re, e - 1.0)};
}

template <typename T>
Dual<T> tanh(const Dual<T>& a) {
  T th = tanh(a.re);
  return {th, a.du * (1.0 - th * th)};
}

// Deepest real component, e.g. for domain checks and diagnostics.
constexpr double real_part(double x) { return x; }
template <typename T>
constexpr double real_part(const Dual<T>& x) {
  return real_part(x.re);
}

using D0 = double;
using D1 = Dual<D0>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;
using D5 = Dual<D4>;

template <typename T>
inline constexpr int dual_level_v = 0;
template <typename T>
inline constexpr int dual_level_v<Dual<T>> = dual_level_v<T> + 1;

// Levels 0..5 are instantiated; derivative requests past the top throw.
inline constexpr int kMaxDualLevel = 5;

}  // namespace symadapt
