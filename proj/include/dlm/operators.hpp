#pragma once

// Application of catalogue operators to radial kernels (through the radial
// chain rule) and to fields given by value/gradient/Hessian, plus the problem
// description p(u) q(u) + R(u) = f with Dirichlet/Neumann data.

#include "dlm/errors.hpp"
#include "dlm/geometry.hpp"
#include "dlm/kernels.hpp"
#include "dlm/linear_operator.hpp"
#include "dlm/scalar.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>

namespace dlm {

/// Value, gradient and Hessian of a field at one point. `order` says how many
/// of those are populated (0: value only, 1: + gradient, 2: + Hessian).
template <typename T, int Dim>
struct FieldJet {
  T value = T(0);
  Eigen::Matrix<T, Dim, 1> grad = Eigen::Matrix<T, Dim, 1>::Zero();
  Eigen::Matrix<T, Dim, Dim> hess = Eigen::Matrix<T, Dim, Dim>::Zero();
  int order = 2;

  FieldJet& operator+=(const FieldJet& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    order = std::min(order, o.order);
    return *this;
  }
  FieldJet& operator*=(const T& s) {
    value *= s;
    grad *= s;
    hess *= s;
    return *this;
  }
};

template <typename T, int Dim>
Eigen::Matrix<T, Dim, 1> cast_point(const Point<Dim>& x) {
  Eigen::Matrix<T, Dim, 1> out;
  for (int a = 0; a < Dim; ++a) out[a] = T(x[a]);
  return out;
}

/// (op u)(x) from the field's jet. `normal` is required for normal-derivative terms.
template <typename T, int Dim>
T apply(const LinearOperator& op, const FieldJet<T, Dim>& u, const Point<Dim>* normal = nullptr) {
  if (op.order() > u.order) throw ValidationError("field jet lacks the derivatives the operator needs");
  if (op.max_axis() >= Dim) throw ValidationError("operator differentiates along an axis the domain lacks");
  T out(0);
  for (const auto& t : op.terms()) {
    T v(0);
    switch (t.kind) {
      case OpKind::Identity: v = u.value; break;
      case OpKind::Derivative: v = t.order == 1 ? u.grad[t.axis] : u.hess(t.axis, t.axis); break;
      case OpKind::Laplacian: v = u.hess.trace(); break;
      case OpKind::NormalDerivative:
        if (!normal) throw ValidationError("normal derivative requested at a point without an outward normal");
        v = u.grad.dot(cast_point<T, Dim>(*normal));
        break;
    }
    out += T(t.coef) * v;
  }
  return out;
}

/// Jet of x -> phi(|x - center|) at x, to the given order (<= 2).
template <typename T, int Dim>
FieldJet<T, Dim> kernel_jet(const RadialKernel<T>& kernel, const Point<Dim>& center, const Point<Dim>& x, int order) {
  using std::sqrt;
  if (order < 0 || order > 2) throw ValidationError("kernel jets are available to order 2");
  const Eigen::Matrix<T, Dim, 1> d = cast_point<T, Dim>(x) - cast_point<T, Dim>(center);
  const T r2 = d.squaredNorm();
  const T r = sqrt(r2);
  const std::span<const double> src(center.data(), Dim);
  const auto phi = kernel.radial_derivatives(r, order, src);

  FieldJet<T, Dim> out;
  out.order = order;
  out.value = phi[0];
  if (order == 0) return out;
  if (r == T(0)) {
    if (phi[1] != T(0)) throw SingularityError("kernel " + kernel.describe() + " has a cusp at its center; derivatives undefined at r = 0");
    if (order == 2) out.hess = phi[2] * Eigen::Matrix<T, Dim, Dim>::Identity();
    return out;
  }
  const T slope = phi[1] / r;
  for (int a = 0; a < Dim; ++a) out.grad[a] = slope * d[a];
  if (order == 2) {
    // phi'' d d^T / r^2 + (phi' / r) (I - d d^T / r^2)
    for (int a = 0; a < Dim; ++a) {
      for (int b = 0; b < Dim; ++b) {
        const T w = d[a] * d[b] / r2;
        out.hess(a, b) = phi[2] * w + slope * ((a == b ? T(1) : T(0)) - w);
      }
    }
  }
  return out;
}

/// (op phi_center)(x) with derivatives taken in x.
template <typename T, int Dim>
T apply_to_kernel(const LinearOperator& op, const RadialKernel<T>& kernel, const Point<Dim>& center, const Point<Dim>& x,
                  const Point<Dim>* normal = nullptr) {
  return apply(op, kernel_jet<T, Dim>(kernel, center, x, op.order()), normal);
}

/// phi, phi', ..., phi^(max_order) at r.
template <typename T>
std::vector<T> radial_derivatives(const RadialKernel<T>& kernel, const T& r, int max_order, std::span<const double> source = {}) {
  if (r < T(0)) throw ValidationError("r must be nonnegative");
  return kernel.radial_derivatives(r, max_order, source);
}

/// (p u)(x) * (q u)(x).
template <typename T, int Dim>
T apply_product_to_field(const LinearOperator& p, const LinearOperator& q, const FieldJet<T, Dim>& u,
                         const Point<Dim>* normal = nullptr) {
  return apply(p, u, normal) * apply(q, u, normal);
}

template <typename T, int Dim>
using ScalarField = std::function<T(const Point<Dim>&)>;

template <typename T, int Dim>
using JetField = std::function<FieldJet<T, Dim>(const Point<Dim>&)>;

/// p(u) q(u) + R(u) = f in the domain, u = dirichlet on the Dirichlet faces,
/// du/dn = neumann on the Neumann faces.
template <typename T, int Dim>
struct ProblemSpec {
  LinearOperator p;
  LinearOperator q;
  LinearOperator R;
  ScalarField<T, Dim> f;
  ScalarField<T, Dim> dirichlet;
  ScalarField<T, Dim> neumann;
  Domain<Dim> domain;
  BoundaryPartition partition;

  void validate() const {
    if (R.order() < 1) throw ValidationError("R must have positive differential order");
    for (const auto* op : {&p, &q, &R}) {
      if (op->max_axis() >= Dim) throw ValidationError("operator differentiates along an axis the domain lacks");
      if (op->uses_normal()) throw ValidationError("normal derivatives are boundary operators, not field operators");
    }
    if (!f) throw ValidationError("source term f is missing");
    if (!partition.dirichlet.empty() && !dirichlet) throw ValidationError("Dirichlet data missing");
    if (!partition.neumann.empty() && !neumann) throw ValidationError("Neumann data missing");
    partition.validate(domain);
  }

  int field_order() const { return std::max({p.order(), q.order(), R.order()}); }
};

/// Checks that a boundary-data or source value is finite.
template <typename T>
T checked(const T& v, const char* what) {
  if (!is_finite(v)) throw ValidationError(std::string(what) + " is not finite at a collocation point");
  return v;
}

}  // namespace dlm
