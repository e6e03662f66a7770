#pragma once

// Truncated Taylor series in one variable. Used to differentiate smooth radial
// profiles (multiquadric, Gaussian, shifted fundamental solutions, and products
// of those) to fixed order without hand-written derivative formulas.
//
// A Jet carries coefficients c[0..K] of the expansion about some point r0 and
// the number of leading coefficients that are valid. Operations that lose an
// order (differentiation, division by r at r0 = 0) shrink the valid count.

#include "dlm/errors.hpp"
#include "dlm/scalar.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dlm {

template <typename T, int K = 8>
struct Jet {
  static constexpr int kCapacity = K + 1;
  std::array<T, K + 1> c{};
  int valid = K + 1;

  Jet() { c.fill(T(0)); }

  static Jet constant(const T& v) {
    Jet j;
    j.c[0] = v;
    return j;
  }

  /// The expansion variable itself about r0: r0 + t.
  static Jet variable(const T& r0) {
    Jet j;
    j.c[0] = r0;
    j.c[1] = T(1);
    return j;
  }

  const T& operator[](int i) const { return c[i]; }
  T& operator[](int i) { return c[i]; }

  /// k-th derivative at r0, k! * c[k].
  T derivative_at(int k) const {
    if (k >= valid) throw SingularityError("derivative order not available from this expansion");
    T f(1);
    for (int i = 2; i <= k; ++i) f *= T(i);
    return f * c[k];
  }

  /// Expansion of d/dt.
  Jet derivative() const {
    Jet out;
    for (int i = 0; i + 1 < kCapacity; ++i) out.c[i] = T(i + 1) * c[i + 1];
    out.valid = std::max(0, valid - 1);
    return out;
  }

  /// Division by t; requires the constant term to vanish.
  Jet shift_down() const {
    if (valid > 0 && c[0] != T(0)) throw SingularityError("division by r at the origin of a profile with nonzero value");
    Jet out;
    for (int i = 0; i + 1 < kCapacity; ++i) out.c[i] = c[i + 1];
    out.valid = std::max(0, valid - 1);
    return out;
  }

  Jet operator-() const {
    Jet out = *this;
    for (auto& v : out.c) v = -v;
    return out;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < kCapacity; ++i) c[i] += o.c[i];
    valid = std::min(valid, o.valid);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < kCapacity; ++i) c[i] -= o.c[i];
    valid = std::min(valid, o.valid);
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  Jet& operator+=(const T& s) {
    c[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, const T& s) { return a += s; }
  friend Jet operator+(const T& s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, const T& s) {
    a.c[0] -= s;
    return a;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    for (int i = 0; i < kCapacity; ++i) {
      T s(0);
      for (int j = 0; j <= i; ++j) s += a.c[j] * b.c[i - j];
      out.c[i] = s;
    }
    out.valid = std::min(a.valid, b.valid);
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    // Cancel common leading zeros so r^k / r^j style quotients work at r0 = 0.
    Jet num = a;
    Jet den = b;
    while (den.valid > 0 && den.c[0] == T(0)) {
      if (num.valid > 0 && num.c[0] != T(0)) throw SingularityError("division by an expansion that vanishes at the origin");
      num = num.shift_down();
      den = den.shift_down();
    }
    if (den.valid == 0) throw SingularityError("division by an expansion with no valid terms");
    Jet out;
    for (int i = 0; i < kCapacity; ++i) {
      T s = num.c[i];
      for (int j = 1; j <= i; ++j) s -= den.c[j] * out.c[i - j];
      out.c[i] = s / den.c[0];
    }
    out.valid = std::min(num.valid, den.valid);
    return out;
  }
};

template <typename T, int K>
Jet<T, K> sqrt(const Jet<T, K>& a) {
  using std::sqrt;
  if (!(a.c[0] > T(0))) throw SingularityError("square root expansion requires a positive leading value");
  Jet<T, K> out;
  out.c[0] = sqrt(a.c[0]);
  for (int i = 1; i < Jet<T, K>::kCapacity; ++i) {
    T s = a.c[i];
    for (int j = 1; j < i; ++j) s -= out.c[j] * out.c[i - j];
    out.c[i] = s / (T(2) * out.c[0]);
  }
  out.valid = a.valid;
  return out;
}

template <typename T, int K>
Jet<T, K> exp(const Jet<T, K>& a) {
  using std::exp;
  Jet<T, K> out;
  out.c[0] = exp(a.c[0]);
  for (int i = 1; i < Jet<T, K>::kCapacity; ++i) {
    T s(0);
    for (int j = 1; j <= i; ++j) s += T(j) * a.c[j] * out.c[i - j];
    out.c[i] = s / T(i);
  }
  out.valid = a.valid;
  return out;
}

template <typename T, int K>
Jet<T, K> log(const Jet<T, K>& a) {
  using std::log;
  if (!(a.c[0] > T(0))) throw SingularityError("logarithm expansion requires a positive leading value");
  Jet<T, K> out;
  out.c[0] = log(a.c[0]);
  for (int i = 1; i < Jet<T, K>::kCapacity; ++i) {
    T s = T(i) * a.c[i];
    for (int j = 1; j < i; ++j) s -= T(j) * out.c[j] * a.c[i - j];
    out.c[i] = s / (T(i) * a.c[0]);
  }
  out.valid = a.valid;
  return out;
}

/// Integer power; negative exponents go through division.
template <typename T, int K>
Jet<T, K> ipow(const Jet<T, K>& a, int n) {
  if (n < 0) return Jet<T, K>::constant(T(1)) / ipow(a, -n);
  Jet<T, K> out = Jet<T, K>::constant(T(1));
  Jet<T, K> base = a;
  while (n > 0) {
    if (n & 1) out = out * base;
    base = base * base;
    n >>= 1;
  }
  return out;
}

}  // namespace dlm
