#pragma once

// Radial profiles phi(r) with derivatives of any order the kernels need.
//
// Two representations:
//  * PowerLog: finite sums of coef * r^a * (ln r)^b with integer a, b >= 0.
//    Covers fundamental solutions, polyharmonic splines, their r^{2m}
//    augmentations and products. Derivatives are exact and symbolic, and the
//    value at r = 0 follows from the limit of each term.
//  * Smooth: a closure returning the Taylor jet about any r0 >= 0 (multiquadric,
//    Gaussian, shifted fundamental solutions, and compositions of those).

#include "dlm/errors.hpp"
#include "dlm/jet.hpp"
#include "dlm/linear_operator.hpp"
#include "dlm/scalar.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <tuple>
#include <variant>
#include <vector>

namespace dlm {

template <typename T>
using RadialJet = Jet<T, 8>;

template <typename T>
class PowerLog {
 public:
  struct Term {
    T coef;
    int a;  // power of r
    int b;  // power of ln r
  };

  PowerLog() = default;
  explicit PowerLog(std::vector<Term> terms) : terms_(std::move(terms)) { canonicalize(); }

  static PowerLog monomial(const T& coef, int a, int b = 0) { return PowerLog({Term{coef, a, b}}); }
  static PowerLog one() { return monomial(T(1), 0, 0); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Finite at r = 0 (every term has a > 0, or a = b = 0).
  bool finite_at_origin() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.a > 0 || (t.a == 0 && t.b == 0); });
  }

  T value(const T& r) const {
    using std::log;
    using std::pow;
    if (r < T(0)) throw ValidationError("radial profiles are defined for r >= 0");
    T sum(0);
    if (r == T(0)) {
      for (const auto& t : terms_) {
        if (t.a > 0) continue;
        if (t.a == 0 && t.b == 0) {
          sum += t.coef;
          continue;
        }
        throw SingularityError("profile has no finite value at r = 0");
      }
      return sum;
    }
    const T lr = log(r);
    for (const auto& t : terms_) sum += t.coef * ipow_scalar(r, t.a) * ipow_scalar(lr, t.b);
    return sum;
  }

  PowerLog derivative() const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
      if (t.a != 0) out.push_back({t.coef * T(t.a), t.a - 1, t.b});
      if (t.b != 0) out.push_back({t.coef * T(t.b), t.a - 1, t.b - 1});
    }
    return PowerLog(std::move(out));
  }

  /// phi(r) * r^k
  PowerLog times_power(int k) const {
    std::vector<Term> out = terms_;
    for (auto& t : out) t.a += k;
    return PowerLog(std::move(out));
  }

  friend PowerLog operator*(const PowerLog& x, const PowerLog& y) {
    std::vector<Term> out;
    for (const auto& s : x.terms_) {
      for (const auto& t : y.terms_) out.push_back({s.coef * t.coef, s.a + t.a, s.b + t.b});
    }
    return PowerLog(std::move(out));
  }

  friend PowerLog operator+(const PowerLog& x, const PowerLog& y) {
    std::vector<Term> out = x.terms_;
    out.insert(out.end(), y.terms_.begin(), y.terms_.end());
    return PowerLog(std::move(out));
  }

  friend PowerLog operator*(const T& s, const PowerLog& x) {
    std::vector<Term> out = x.terms_;
    for (auto& t : out) t.coef *= s;
    return PowerLog(std::move(out));
  }

  /// Taylor jet about r0; at r0 = 0 the jet stops at the first singular order.
  RadialJet<T> jet_at(const T& r0) const {
    RadialJet<T> j;
    PowerLog d = *this;
    T fact(1);
    int k = 0;
    for (; k < RadialJet<T>::kCapacity; ++k) {
      if (k > 0) fact *= T(k);
      try {
        j.c[k] = d.value(r0) / fact;
      } catch (const SingularityError&) {
        break;
      }
      d = d.derivative();
    }
    j.valid = k;
    return j;
  }

  /// The profile evaluated on an expansion rho (rho must be positive at its base point).
  RadialJet<T> compose(const RadialJet<T>& rho) const {
    RadialJet<T> out;
    if (terms_.empty()) return out;
    const bool need_log = std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.b > 0; });
    RadialJet<T> lr;
    if (need_log) lr = log(rho);
    for (const auto& t : terms_) {
      RadialJet<T> term = ipow(rho, t.a);
      if (t.b > 0) term = term * ipow(lr, t.b);
      out += term * t.coef;
    }
    return out;
  }

 private:
  static T ipow_scalar(T x, int n) {
    if (n < 0) return T(1) / ipow_scalar(x, -n);
    T out(1);
    while (n > 0) {
      if (n & 1) out *= x;
      x *= x;
      n >>= 1;
    }
    return out;
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    std::vector<Term> merged;
    for (const auto& t : terms_) {
      if (t.b < 0) throw ValidationError("negative powers of ln r are not representable");
      if (!merged.empty() && merged.back().a == t.a && merged.back().b == t.b) {
        merged.back().coef += t.coef;
      } else {
        merged.push_back(t);
      }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.coef == T(0); }),
                 merged.end());
    terms_ = std::move(merged);
  }

  std::vector<Term> terms_;
};

template <typename T>
class Profile {
 public:
  using JetFn = std::function<RadialJet<T>(const T&)>;

  Profile() : rep_(PowerLog<T>()) {}
  Profile(PowerLog<T> p) : rep_(std::move(p)) {}  // NOLINT implicit on purpose
  static Profile smooth(JetFn fn) {
    Profile p;
    p.rep_ = std::move(fn);
    return p;
  }

  bool is_power_log() const { return std::holds_alternative<PowerLog<T>>(rep_); }
  const PowerLog<T>& power_log() const { return std::get<PowerLog<T>>(rep_); }

  RadialJet<T> jet_at(const T& r0) const {
    if (r0 < T(0)) throw ValidationError("radial profiles are defined for r >= 0");
    if (is_power_log()) return power_log().jet_at(r0);
    return std::get<JetFn>(rep_)(r0);
  }

  /// phi(r), phi'(r), ..., phi^(max_order)(r).
  std::vector<T> derivatives(const T& r, int max_order) const {
    if (max_order < 0) throw ValidationError("max_order must be nonnegative");
    std::vector<T> out(max_order + 1);
    if (is_power_log()) {
      PowerLog<T> d = power_log();
      for (int k = 0; k <= max_order; ++k) {
        out[k] = d.value(r);
        d = d.derivative();
      }
      return out;
    }
    const auto j = jet_at(r);
    for (int k = 0; k <= max_order; ++k) out[k] = j.derivative_at(k);
    return out;
  }

  T value(const T& r) const { return derivatives(r, 0)[0]; }

  friend Profile operator*(const Profile& x, const Profile& y) {
    if (x.is_power_log() && y.is_power_log()) return Profile(x.power_log() * y.power_log());
    return smooth([x, y](const T& r0) { return x.jet_at(r0) * y.jet_at(r0); });
  }

  friend Profile operator+(const Profile& x, const Profile& y) {
    if (x.is_power_log() && y.is_power_log()) return Profile(x.power_log() + y.power_log());
    return smooth([x, y](const T& r0) { return x.jet_at(r0) + y.jet_at(r0); });
  }

  friend Profile operator*(const T& s, const Profile& x) {
    if (x.is_power_log()) return Profile(s * x.power_log());
    return smooth([s, x](const T& r0) { return x.jet_at(r0) * s; });
  }

  Profile derivative() const {
    if (is_power_log()) return Profile(power_log().derivative());
    Profile self = *this;
    return smooth([self](const T& r0) { return self.jet_at(r0).derivative(); });
  }

  /// phi(r) / r; at r = 0 only defined when phi(0) = 0.
  Profile divide_by_r() const {
    if (is_power_log()) return Profile(power_log().times_power(-1));
    Profile self = *this;
    return smooth([self](const T& r0) {
      const auto j = self.jet_at(r0);
      if (r0 == T(0)) return j.shift_down();
      return j / RadialJet<T>::variable(r0);
    });
  }

  /// Radial reading of a catalogue operator applied to this profile in `dim`
  /// dimensions: D^k -> d^k/dr^k, Laplacian -> phi'' + (dim-1) phi'/r,
  /// normal derivative -> phi'.
  Profile apply_radial(const LinearOperator& op, int dim) const {
    Profile total{PowerLog<T>()};
    for (const auto& t : op.terms()) {
      Profile piece;
      switch (t.kind) {
        case OpKind::Identity: piece = *this; break;
        case OpKind::Derivative:
          piece = derivative();
          if (t.order == 2) piece = piece.derivative();
          break;
        case OpKind::NormalDerivative: piece = derivative(); break;
        case OpKind::Laplacian: {
          const Profile d1 = derivative();
          piece = d1.derivative();
          if (dim > 1) piece = piece + T(dim - 1) * d1.divide_by_r();
          break;
        }
      }
      total = total + T(t.coef) * piece;
    }
    return total;
  }

 private:
  std::variant<PowerLog<T>, JetFn> rep_;
};

}  // namespace dlm
