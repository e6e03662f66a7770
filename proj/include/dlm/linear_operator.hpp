#pragma once

// Linear differential operators of order <= 2 as flat sums of catalogue terms.
//
// Text form (used by configs): terms joined by '+', each `[coef*]name` with
// name one of I, Dx, Dxx, Dy, Dyy, lap, dn. Example: "0.1*I", "Dxx + 2*Dyy".

#include "dlm/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace dlm {

enum class OpKind { Identity, Derivative, Laplacian, NormalDerivative };

struct OpTerm {
  double coef = 1.0;
  OpKind kind = OpKind::Identity;
  int axis = 0;   // Derivative only
  int order = 0;  // Derivative only: 1 or 2

  int differential_order() const {
    switch (kind) {
      case OpKind::Identity: return 0;
      case OpKind::Derivative: return order;
      case OpKind::Laplacian: return 2;
      case OpKind::NormalDerivative: return 1;
    }
    return 0;
  }

  bool same_shape(const OpTerm& o) const { return kind == o.kind && axis == o.axis && order == o.order; }
  bool operator==(const OpTerm&) const = default;
};

class LinearOperator {
 public:
  LinearOperator() = default;
  explicit LinearOperator(std::vector<OpTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) validate(t);
  }

  static LinearOperator identity() { return scale(1.0); }
  static LinearOperator scale(double gamma) { return LinearOperator({OpTerm{gamma, OpKind::Identity, 0, 0}}); }
  static LinearOperator d(int axis, int order) { return LinearOperator({OpTerm{1.0, OpKind::Derivative, axis, order}}); }
  static LinearOperator laplacian() { return LinearOperator({OpTerm{1.0, OpKind::Laplacian, 0, 0}}); }
  static LinearOperator normal_derivative() { return LinearOperator({OpTerm{1.0, OpKind::NormalDerivative, 0, 0}}); }

  const std::vector<OpTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  int order() const {
    int o = 0;
    for (const auto& t : terms_) o = std::max(o, t.differential_order());
    return o;
  }

  int max_axis() const {
    int a = -1;
    for (const auto& t : terms_) {
      if (t.kind == OpKind::Derivative) a = std::max(a, t.axis);
    }
    return a;
  }

  bool uses_normal() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const OpTerm& t) { return t.kind == OpKind::NormalDerivative; });
  }

  /// True when every coefficient is zero (including the empty sum).
  bool is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const OpTerm& t) { return t.coef == 0.0; });
  }

  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    std::vector<OpTerm> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return LinearOperator(std::move(t));
  }

  friend LinearOperator operator*(double s, const LinearOperator& a) {
    std::vector<OpTerm> t = a.terms_;
    for (auto& x : t) x.coef *= s;
    return LinearOperator(std::move(t));
  }

  bool operator==(const LinearOperator&) const = default;

  std::string to_string() const {
    if (terms_.empty()) return "0*I";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) out += " + ";
      const auto& t = terms_[i];
      if (t.coef != 1.0) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g*", t.coef);
        out += buf;
      }
      out += term_name(t);
    }
    return out;
  }

  static LinearOperator parse(std::string_view text) {
    std::vector<OpTerm> terms;
    std::string cur;
    auto flush = [&]() {
      terms.push_back(parse_term(cur));
      cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char ch = text[i];
      const bool exponent_sign = i >= 2 && (text[i - 1] == 'e' || text[i - 1] == 'E') &&
                                 std::isdigit(static_cast<unsigned char>(text[i - 2]));
      if (ch == '+' && !exponent_sign && !trim(cur).empty()) {
        flush();
      } else {
        cur.push_back(ch);
      }
    }
    if (trim(cur).empty()) throw ValidationError("empty operator expression '" + std::string(text) + "'");
    flush();
    return LinearOperator(std::move(terms));
  }

 private:
  static void validate(const OpTerm& t) {
    if (!std::isfinite(t.coef)) throw ValidationError("operator coefficients must be finite");
    if (t.kind == OpKind::Derivative) {
      if (t.order < 1 || t.order > 2) throw ValidationError("derivative order must be 1 or 2");
      if (t.axis < 0 || t.axis > 1) throw ValidationError("derivative axis must be 0 (x) or 1 (y)");
    }
  }

  static std::string term_name(const OpTerm& t) {
    switch (t.kind) {
      case OpKind::Identity: return "I";
      case OpKind::Derivative: return std::string(1, 'D') + std::string(t.order, t.axis == 0 ? 'x' : 'y');
      case OpKind::Laplacian: return "lap";
      case OpKind::NormalDerivative: return "dn";
    }
    return "?";
  }

  static std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
  }

  static OpTerm parse_term(std::string_view raw) {
    const std::string s = trim(raw);
    OpTerm t;
    std::string name = s;
    if (const auto star = s.find('*'); star != std::string::npos) {
      const std::string num = trim(std::string_view(s).substr(0, star));
      name = trim(std::string_view(s).substr(star + 1));
      try {
        std::size_t used = 0;
        t.coef = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
      } catch (const std::exception&) {
        throw ValidationError("bad operator coefficient '" + num + "'");
      }
    } else if (!name.empty() && name[0] == '-') {
      t.coef = -1.0;
      name = trim(std::string_view(name).substr(1));
    }
    if (name == "I") {
      t.kind = OpKind::Identity;
    } else if (name == "lap") {
      t.kind = OpKind::Laplacian;
    } else if (name == "dn") {
      t.kind = OpKind::NormalDerivative;
    } else if (name == "Dx" || name == "Dxx" || name == "Dy" || name == "Dyy") {
      t.kind = OpKind::Derivative;
      t.axis = name[1] == 'x' ? 0 : 1;
      t.order = static_cast<int>(name.size()) - 1;
    } else {
      throw ValidationError("unknown operator term '" + name + "' (expected I, Dx, Dxx, Dy, Dyy, lap or dn)");
    }
    validate(t);
    return t;
  }

  std::vector<OpTerm> terms_;
};

}  // namespace dlm
