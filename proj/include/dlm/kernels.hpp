#pragma once

// Radial kernel families: classical RBFs, the Laplace fundamental-solution
// catalogue, and the operator-derived constructions built from it (augmented
// kernels, high-order fundamental-solution kernels, shape-parameter kernels,
// operator-product and operator-composed kernels for the auxiliary field, and
// source-weighted single kernels for one-field solvers).

#include "dlm/errors.hpp"
#include "dlm/linear_operator.hpp"
#include "dlm/profile.hpp"
#include "dlm/scalar.hpp"

#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlm {

enum class KernelFamily {
  Multiquadric,
  InverseMultiquadric,
  Gaussian,
  Polyharmonic,
  ThinPlateSpline,
  FundamentalSolution,
  EAK,
  HSK,
  SPK,
  ProductPsiV,
  ComposedPsiV,
};

inline std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Multiquadric: return "mq";
    case KernelFamily::InverseMultiquadric: return "imq";
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Polyharmonic: return "polyharmonic";
    case KernelFamily::ThinPlateSpline: return "tps";
    case KernelFamily::FundamentalSolution: return "fundamental";
    case KernelFamily::EAK: return "eak";
    case KernelFamily::HSK: return "hsk";
    case KernelFamily::SPK: return "spk";
    case KernelFamily::ProductPsiV: return "product";
    case KernelFamily::ComposedPsiV: return "composed";
  }
  return "?";
}

enum class FsKind { Laplace1D, Laplace2D, Laplace3D };

inline std::string_view to_string(FsKind k) {
  switch (k) {
    case FsKind::Laplace1D: return "laplace1d";
    case FsKind::Laplace2D: return "laplace2d";
    case FsKind::Laplace3D: return "laplace3d";
  }
  return "?";
}

inline FsKind fs_kind_from_string(std::string_view s) {
  if (s == "laplace1d") return FsKind::Laplace1D;
  if (s == "laplace2d") return FsKind::Laplace2D;
  if (s == "laplace3d") return FsKind::Laplace3D;
  throw CatalogueMissError("no fundamental solution named '" + std::string(s) + "' (expected laplace1d, laplace2d or laplace3d)");
}

inline int fs_dimension(FsKind k) { return k == FsKind::Laplace1D ? 1 : (k == FsKind::Laplace2D ? 2 : 3); }

enum class SingleStyle { EAK, HSK, SPK };

inline std::string_view to_string(SingleStyle s) {
  switch (s) {
    case SingleStyle::EAK: return "eak";
    case SingleStyle::HSK: return "hsk";
    case SingleStyle::SPK: return "spk";
  }
  return "?";
}

template <typename T>
struct FundamentalSolutionEntry {
  FsKind operator_kind;
  int order;
  PowerLog<T> profile;
  bool singular_at_origin;
};

/// Catalogued fundamental solution of a Laplace operator, iterated `order` times.
/// Order 1 keeps the physical normalization (r/2, ln r / 2pi, 1/(4 pi r));
/// higher orders drop multiplicative constants.
template <typename T>
FundamentalSolutionEntry<T> fundamental_solution_entry(FsKind kind, int order) {
  if (order < 1) throw ValidationError("fundamental solution order must be >= 1");
  PowerLog<T> prof;
  if (order == 1) {
    switch (kind) {
      case FsKind::Laplace1D: prof = PowerLog<T>::monomial(T(1) / T(2), 1); break;
      case FsKind::Laplace2D: prof = PowerLog<T>::monomial(T(1) / (T(2) * pi<T>()), 0, 1); break;
      case FsKind::Laplace3D: prof = PowerLog<T>::monomial(T(1) / (T(4) * pi<T>()), -1); break;
    }
  } else {
    switch (kind) {
      case FsKind::Laplace1D: prof = PowerLog<T>::monomial(T(1), 2 * order - 1); break;
      case FsKind::Laplace2D: prof = PowerLog<T>::monomial(T(1), 2 * order - 2, 1); break;
      case FsKind::Laplace3D: prof = PowerLog<T>::monomial(T(1), 2 * order - 3); break;
    }
  }
  return {kind, order, prof, !prof.finite_at_origin()};
}

/// Catalogue lookup for a catalogue operator in `dim` dimensions.
/// Identity and scalar multiples give no entry (the factor 1); Laplacians (and
/// the pure second derivative in 1D) map to the Laplace family.
inline std::optional<FsKind> fundamental_solution_for(const LinearOperator& op, int dim) {
  if (op.order() == 0) return std::nullopt;
  bool laplace_like = !op.terms().empty();
  for (const auto& t : op.terms()) {
    const bool lap = t.kind == OpKind::Laplacian || (dim == 1 && t.kind == OpKind::Derivative && t.order == 2);
    if (!lap) laplace_like = false;
  }
  if (!laplace_like) {
    throw CatalogueMissError("operator '" + op.to_string() +
                             "' has no radial fundamental solution in the catalogue; use the composed kernel instead");
  }
  return dim == 1 ? FsKind::Laplace1D : (dim == 2 ? FsKind::Laplace2D : FsKind::Laplace3D);
}

struct KernelParams {
  int m = 1;
  int n = 1;
  int s = 0;
  double c = 1.0;
  double epsilon = 1.0;
  int k = 3;      // polyharmonic degree / TPS half-degree
  int order = 1;  // fundamental-solution order
  std::optional<FsKind> base;
  std::optional<FsKind> p_base;
  std::optional<FsKind> q_base;
  double f_at_source = 1.0;
  SingleStyle style = SingleStyle::EAK;
};

/// Source-point weight for f-weighted single kernels.
using SourceWeight = std::function<double(std::span<const double>)>;

template <typename T>
class RadialKernel {
 public:
  RadialKernel() = default;
  RadialKernel(KernelFamily family, KernelParams params, int dim, Profile<T> profile, std::string description)
      : family_(family), params_(std::move(params)), dim_(dim), base_(std::move(profile)),
        description_(std::move(description)) {}

  /// Adds a source-weighted part: phi(r; x_src) = base(r) + weight(x_src) * weighted(r).
  RadialKernel& with_weighted(Profile<T> weighted, SourceWeight weight) {
    weighted_ = std::move(weighted);
    weight_ = std::move(weight);
    return *this;
  }

  KernelFamily family() const { return family_; }
  const KernelParams& params() const { return params_; }
  int dim() const { return dim_; }
  const std::string& describe() const { return description_; }
  const Profile<T>& profile() const { return base_; }
  bool source_dependent() const { return weighted_.has_value(); }
  static constexpr int max_derivative_order() { return 4; }

  /// phi, phi', ..., phi^(max_order) at r for the given source point.
  std::vector<T> radial_derivatives(const T& r, int max_order, std::span<const double> source = {}) const {
    if (max_order > max_derivative_order()) {
      throw ValidationError("radial derivatives are provided up to order " + std::to_string(max_derivative_order()));
    }
    auto out = base_.derivatives(r, max_order);
    if (weighted_) {
      if (source.empty()) throw ValidationError("source-weighted kernel evaluated without a source point");
      const T w = T(weight_(source));
      if (w != T(0)) {
        const auto extra = weighted_->derivatives(r, max_order);
        for (int i = 0; i <= max_order; ++i) out[i] += w * extra[i];
      }
    }
    return out;
  }

  T operator()(const T& r, std::span<const double> source = {}) const { return radial_derivatives(r, 0, source)[0]; }

  /// Finite value and vanishing slope at r = 0, with a finite second derivative.
  bool smooth_at_origin() const {
    auto check = [](const Profile<T>& p) {
      try {
        const auto d = p.derivatives(T(0), 2);
        return d[1] == T(0) && is_finite(d[0]) && is_finite(d[2]);
      } catch (const SingularityError&) {
        return false;
      }
    };
    return check(base_) && (!weighted_ || check(*weighted_));
  }

 private:
  KernelFamily family_ = KernelFamily::Multiquadric;
  KernelParams params_;
  int dim_ = 0;
  Profile<T> base_;
  std::optional<Profile<T>> weighted_;
  SourceWeight weight_;
  std::string description_;
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <typename T>
Profile<T> shifted(const PowerLog<T>& w, double c) {
  const T c2 = T(c) * T(c);
  return Profile<T>::smooth([w, c2](const T& r0) {
    const auto r = RadialJet<T>::variable(r0);
    return w.compose(sqrt(r * r + c2));
  });
}

inline std::string fs_name(const std::optional<FsKind>& k) { return k ? std::string(to_string(*k)) : "1"; }

template <typename T>
PowerLog<T> fs_or_one(const std::optional<FsKind>& k, int order) {
  return k ? fundamental_solution_entry<T>(*k, order).profile : PowerLog<T>::one();
}

}  // namespace detail

template <typename T>
RadialKernel<T> multiquadric(double c) {
  if (!(c > 0)) throw ValidationError("multiquadric shape parameter c must be positive");
  const T c2 = T(c) * T(c);
  KernelParams p;
  p.c = c;
  return {KernelFamily::Multiquadric, p, 0, Profile<T>::smooth([c2](const T& r0) {
            const auto r = RadialJet<T>::variable(r0);
            return sqrt(r * r + c2);
          }),
          "mq[c=" + detail::fmt_num(c) + "]"};
}

template <typename T>
RadialKernel<T> inverse_multiquadric(double c) {
  if (!(c > 0)) throw ValidationError("inverse multiquadric shape parameter c must be positive");
  const T c2 = T(c) * T(c);
  KernelParams p;
  p.c = c;
  return {KernelFamily::InverseMultiquadric, p, 0, Profile<T>::smooth([c2](const T& r0) {
            const auto r = RadialJet<T>::variable(r0);
            return RadialJet<T>::constant(T(1)) / sqrt(r * r + c2);
          }),
          "imq[c=" + detail::fmt_num(c) + "]"};
}

/// exp(-(epsilon r)^2)
template <typename T>
RadialKernel<T> gaussian(double epsilon) {
  if (!(epsilon > 0)) throw ValidationError("gaussian epsilon must be positive");
  const T e2 = T(epsilon) * T(epsilon);
  KernelParams p;
  p.epsilon = epsilon;
  return {KernelFamily::Gaussian, p, 0, Profile<T>::smooth([e2](const T& r0) {
            const auto r = RadialJet<T>::variable(r0);
            return exp((r * r) * (-e2));
          }),
          "gaussian[eps=" + detail::fmt_num(epsilon) + "]"};
}

/// r^k, k odd and positive.
template <typename T>
RadialKernel<T> polyharmonic(int k) {
  if (k < 1 || k % 2 == 0) throw ValidationError("polyharmonic degree must be odd and positive");
  KernelParams p;
  p.k = k;
  return {KernelFamily::Polyharmonic, p, 0, Profile<T>(PowerLog<T>::monomial(T(1), k)), "polyharmonic[k=" + std::to_string(k) + "]"};
}

/// r^k for any k >= 1 (no parity restriction; used for plain power profiles such as r^2).
template <typename T>
RadialKernel<T> radial_power(int k) {
  if (k < 1) throw ValidationError("power profile exponent must be >= 1");
  KernelParams p;
  p.k = k;
  return {KernelFamily::Polyharmonic, p, 0, Profile<T>(PowerLog<T>::monomial(T(1), k)), "power[k=" + std::to_string(k) + "]"};
}

/// r^{2k} ln r, k >= 1.
template <typename T>
RadialKernel<T> thin_plate_spline(int k) {
  if (k < 1) throw ValidationError("thin plate spline order must be >= 1");
  KernelParams p;
  p.k = k;
  return {KernelFamily::ThinPlateSpline, p, 0, Profile<T>(PowerLog<T>::monomial(T(1), 2 * k, 1)), "tps[k=" + std::to_string(k) + "]"};
}

template <typename T>
RadialKernel<T> fundamental_solution(FsKind kind, int order) {
  const auto e = fundamental_solution_entry<T>(kind, order);
  KernelParams p;
  p.base = kind;
  p.order = order;
  return {KernelFamily::FundamentalSolution, p, fs_dimension(kind), Profile<T>(e.profile),
          "fundamental[" + std::string(to_string(kind)) + " order=" + std::to_string(order) + "]"};
}

/// f_at_source * r^{2m} * w*(r).
template <typename T>
RadialKernel<T> eak_kernel(double f_at_source, int m, FsKind base) {
  if (m < 0) throw ValidationError("augmentation exponent m must be nonnegative");
  const auto e = fundamental_solution_entry<T>(base, 1);
  if (m == 0 && e.singular_at_origin) {
    throw ValidationError("m = 0 leaves the singular " + std::string(to_string(base)) + " fundamental solution unaugmented");
  }
  const PowerLog<T> prof = T(f_at_source) * e.profile.times_power(2 * m);
  KernelParams p;
  p.m = m;
  p.base = base;
  p.f_at_source = f_at_source;
  return {KernelFamily::EAK, p, fs_dimension(base), Profile<T>(prof),
          "eak[" + std::string(to_string(base)) + " m=" + std::to_string(m) + " f=" + detail::fmt_num(f_at_source) + "]"};
}

/// r^{2m} * w*(r).
template <typename T>
RadialKernel<T> psi_u_kernel(int m, FsKind base) {
  auto k = eak_kernel<T>(1.0, m, base);
  return {KernelFamily::EAK, k.params(), k.dim(), k.profile(),
          "eak[" + std::string(to_string(base)) + " m=" + std::to_string(m) + "]"};
}

/// r^{2n} * w*_R * w*_p * w*_q; an absent p or q entry is the factor 1.
template <typename T>
RadialKernel<T> psi_v_product(int n, FsKind w_r, std::optional<FsKind> w_p, std::optional<FsKind> w_q) {
  if (n < 0) throw ValidationError("augmentation exponent n must be nonnegative");
  const PowerLog<T> prof = (detail::fs_or_one<T>(w_r, 1) * detail::fs_or_one<T>(w_p, 1) * detail::fs_or_one<T>(w_q, 1))
                               .times_power(2 * n);
  if (!prof.finite_at_origin()) {
    throw ValidationError("n = " + std::to_string(n) + " does not cancel the combined singularity of the product kernel");
  }
  KernelParams p;
  p.n = n;
  p.base = w_r;
  p.p_base = w_p;
  p.q_base = w_q;
  return {KernelFamily::ProductPsiV, p, fs_dimension(w_r), Profile<T>(prof),
          "product[n=" + std::to_string(n) + " R=" + std::string(to_string(w_r)) + " p=" + detail::fs_name(w_p) +
              " q=" + detail::fs_name(w_q) + "]"};
}

/// High-order fundamental-solution pair: psi_u = w*_R of order m, psi_v = product
/// of the order-n iterates of w*_R, w*_p and w*_q.
template <typename T>
std::pair<RadialKernel<T>, RadialKernel<T>> hsk_kernels(int m, int n, FsKind w_r, std::optional<FsKind> w_p,
                                                        std::optional<FsKind> w_q) {
  if (m < 1 || n < 1) throw ValidationError("HSK orders m and n must be >= 1");
  KernelParams p;
  p.m = m;
  p.n = n;
  p.base = w_r;
  p.p_base = w_p;
  p.q_base = w_q;
  const PowerLog<T> u = detail::fs_or_one<T>(w_r, m);
  const PowerLog<T> v = detail::fs_or_one<T>(w_r, n) * detail::fs_or_one<T>(w_p, n) * detail::fs_or_one<T>(w_q, n);
  const std::string tag = std::string(to_string(w_r));
  RadialKernel<T> ku{KernelFamily::HSK, p, fs_dimension(w_r), Profile<T>(u), "hsk_u[" + tag + " m=" + std::to_string(m) + "]"};
  RadialKernel<T> kv{KernelFamily::HSK, p, fs_dimension(w_r), Profile<T>(v),
                     "hsk_v[" + tag + " n=" + std::to_string(n) + " p=" + detail::fs_name(w_p) + " q=" + detail::fs_name(w_q) + "]"};
  return {ku, kv};
}

/// Shape-parameter pair: catalogue profiles (of the given order) evaluated at sqrt(r^2 + c^2).
template <typename T>
std::pair<RadialKernel<T>, RadialKernel<T>> spk_kernels(double c, FsKind w_r, std::optional<FsKind> w_p,
                                                        std::optional<FsKind> w_q, int order = 1) {
  if (!(c > 0)) throw ValidationError("SPK shape parameter c must be positive");
  KernelParams p;
  p.c = c;
  p.order = order;
  p.base = w_r;
  p.p_base = w_p;
  p.q_base = w_q;
  const auto u = detail::shifted<T>(detail::fs_or_one<T>(w_r, order), c);
  const auto v = detail::shifted<T>(
      detail::fs_or_one<T>(w_r, order) * detail::fs_or_one<T>(w_p, order) * detail::fs_or_one<T>(w_q, order), c);
  const std::string tag = std::string(to_string(w_r)) + " c=" + detail::fmt_num(c) +
                          (order != 1 ? " order=" + std::to_string(order) : std::string());
  RadialKernel<T> ku{KernelFamily::SPK, p, fs_dimension(w_r), u, "spk_u[" + tag + "]"};
  RadialKernel<T> kv{KernelFamily::SPK, p, fs_dimension(w_r), v,
                     "spk_v[" + tag + " p=" + detail::fs_name(w_p) + " q=" + detail::fs_name(w_q) + "]"};
  return {ku, kv};
}

template <typename T>
RadialKernel<T> spk_u(double c, FsKind w_r, int order = 1) {
  return spk_kernels<T>(c, w_r, std::nullopt, std::nullopt, order).first;
}

/// r^{2s} * (p psi_u)(r) * (q psi_u)(r), with p and q applied radially in `dim` dimensions.
template <typename T>
RadialKernel<T> psi_v_composed(int s, const LinearOperator& p, const LinearOperator& q, const RadialKernel<T>& psi_u,
                               int dim) {
  if (s < 0) throw ValidationError("augmentation exponent s must be nonnegative");
  if (psi_u.source_dependent()) throw ValidationError("the composed kernel needs a source-independent psi_u");
  if (std::max(p.order(), q.order()) + 2 > RadialKernel<T>::max_derivative_order()) {
    throw ValidationError("operator order exceeds the derivative catalogue of psi_u");
  }
  const Profile<T> base = psi_u.profile();
  Profile<T> prof = base.apply_radial(p, dim) * base.apply_radial(q, dim);
  if (s > 0) prof = Profile<T>(PowerLog<T>::monomial(T(1), 2 * s)) * prof;
  KernelParams kp = psi_u.params();
  kp.s = s;
  return {KernelFamily::ComposedPsiV, kp, dim, prof,
          "composed[s=" + std::to_string(s) + " p=" + p.to_string() + " q=" + q.to_string() + " of " + psi_u.describe() + "]"};
}

/// Single kernel for one-field solvers:
///   [-(p W)(q W) + f(x_src)] * W
/// with W = r^{2m} w*   (EAK),  W = w* of order m  (HSK),  W = w*(sqrt(r^2 + c^2))  (SPK).
/// For EAK the bracket multiplies r^{2m} w* while p and q act on w* itself.
template <typename T>
RadialKernel<T> single_rbf(SingleStyle style, const LinearOperator& p, const LinearOperator& q, const LinearOperator& R,
                           SourceWeight f, KernelParams params, int dim) {
  const auto fs = fundamental_solution_for(R, dim);
  if (!fs) throw CatalogueMissError("single kernels need a differential operator R with a catalogued fundamental solution");
  params.base = fs;
  params.style = style;
  Profile<T> w;      // profile p and q act on
  Profile<T> outer;  // profile the bracket multiplies
  std::string tag;
  switch (style) {
    case SingleStyle::EAK: {
      const auto e = fundamental_solution_entry<T>(*fs, 1);
      if (params.m == 0 && e.singular_at_origin) throw ValidationError("EAK single kernel needs m >= 1 for a singular base");
      w = Profile<T>(e.profile);
      outer = Profile<T>(e.profile.times_power(2 * params.m));
      tag = "m=" + std::to_string(params.m);
      break;
    }
    case SingleStyle::HSK: {
      if (params.m < 1) throw ValidationError("HSK single kernel needs m >= 1");
      w = Profile<T>(fundamental_solution_entry<T>(*fs, params.m).profile);
      outer = w;
      tag = "m=" + std::to_string(params.m);
      break;
    }
    case SingleStyle::SPK: {
      if (!(params.c > 0)) throw ValidationError("SPK shape parameter c must be positive");
      w = detail::shifted<T>(fundamental_solution_entry<T>(*fs, params.order).profile, params.c);
      outer = w;
      tag = "c=" + detail::fmt_num(params.c);
      break;
    }
  }
  const Profile<T> nonlinear = T(-1) * (w.apply_radial(p, dim) * w.apply_radial(q, dim)) * outer;
  const KernelFamily fam = style == SingleStyle::EAK ? KernelFamily::EAK : (style == SingleStyle::HSK ? KernelFamily::HSK : KernelFamily::SPK);
  RadialKernel<T> k{fam, params, dim, nonlinear,
                    "single_" + std::string(to_string(style)) + "[" + std::string(to_string(*fs)) + " " + tag + "]"};
  k.with_weighted(outer, std::move(f));
  return k;
}

/// Family names accepted by the config grammar and the `kernels` listing.
inline std::vector<std::string> kernel_family_names() {
  return {"mq", "imq", "gaussian", "polyharmonic", "power", "tps", "fundamental", "eak", "hsk", "spk", "product", "composed", "single"};
}

}  // namespace dlm
