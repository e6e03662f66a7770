#pragma once

// Manufactured solutions: pick u*, derive f, boundary data and v* = (p u*)(q u*).

#include "dlm/errors.hpp"
#include "dlm/geometry.hpp"
#include "dlm/linear_operator.hpp"
#include "dlm/operators.hpp"
#include "dlm/scalar.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dlm::bench {

template <typename T, int Dim>
struct ExactField {
  std::string name;
  JetField<T, Dim> jet;

  T operator()(const Point<Dim>& x) const { return jet(x).value; }
};

/// Names accepted by exact_field<T, Dim>().
inline std::vector<std::string> exact_field_names(int dim) {
  if (dim == 1) return {"x^2", "sin(pi*x)", "exp(x)"};
  return {"x+y", "x^2+y^2", "sin(pi*x)*sin(pi*y)"};
}

template <typename T, int Dim>
ExactField<T, Dim> exact_field(const std::string& name) {
  using std::cos;
  using std::exp;
  using std::sin;
  const T P = pi<T>();
  if constexpr (Dim == 1) {
    if (name == "x^2") {
      return {name, [](const Point<1>& p) {
                const T x(p[0]);
                FieldJet<T, 1> j;
                j.value = x * x;
                j.grad[0] = T(2) * x;
                j.hess(0, 0) = T(2);
                return j;
              }};
    }
    if (name == "sin(pi*x)") {
      return {name, [P](const Point<1>& p) {
                const T x(p[0]);
                FieldJet<T, 1> j;
                j.value = sin(P * x);
                j.grad[0] = P * cos(P * x);
                j.hess(0, 0) = -P * P * sin(P * x);
                return j;
              }};
    }
    if (name == "exp(x)") {
      return {name, [](const Point<1>& p) {
                const T e = exp(T(p[0]));
                FieldJet<T, 1> j;
                j.value = e;
                j.grad[0] = e;
                j.hess(0, 0) = e;
                return j;
              }};
    }
  } else {
    if (name == "x+y") {
      return {name, [](const Point<2>& p) {
                FieldJet<T, 2> j;
                j.value = T(p[0]) + T(p[1]);
                j.grad << T(1), T(1);
                return j;
              }};
    }
    if (name == "x^2+y^2") {
      return {name, [](const Point<2>& p) {
                const T x(p[0]), y(p[1]);
                FieldJet<T, 2> j;
                j.value = x * x + y * y;
                j.grad << T(2) * x, T(2) * y;
                j.hess << T(2), T(0), T(0), T(2);
                return j;
              }};
    }
    if (name == "sin(pi*x)*sin(pi*y)") {
      return {name, [P](const Point<2>& p) {
                const T sx = sin(P * T(p[0])), cx = cos(P * T(p[0]));
                const T sy = sin(P * T(p[1])), cy = cos(P * T(p[1]));
                FieldJet<T, 2> j;
                j.value = sx * sy;
                j.grad << P * cx * sy, P * sx * cy;
                j.hess << -P * P * sx * sy, P * P * cx * cy, P * P * cx * cy, -P * P * sx * sy;
                return j;
              }};
    }
  }
  throw ValidationError("unknown exact field '" + name + "' for a " + std::to_string(Dim) + "D domain");
}

template <typename T, int Dim>
struct ManufacturedCase {
  std::string name;
  ProblemSpec<T, Dim> problem;
  ExactField<T, Dim> u_exact;
  ScalarField<T, Dim> v_exact;
};

template <typename T, int Dim>
ManufacturedCase<T, Dim> manufacture(const LinearOperator& p, const LinearOperator& q, const LinearOperator& R,
                                     const ExactField<T, Dim>& u, const Domain<Dim>& domain,
                                     const BoundaryPartition& partition, std::string name = "custom") {
  partition.validate(domain);
  auto jet = u.jet;
  auto f = [p, q, R, jet](const Point<Dim>& x) {
    const auto j = jet(x);
    return apply_product_to_field<T, Dim>(p, q, j) + apply(R, j);
  };
  auto ubar = [jet](const Point<Dim>& x) { return jet(x).value; };
  auto qbar = [jet, domain](const Point<Dim>& x) {
    const auto face = domain.locate_face(x);
    if (!face) throw ValidationError("Neumann data requested away from the boundary");
    const Point<Dim> n = outward_normal(domain, x, *face);
    return apply(LinearOperator::normal_derivative(), jet(x), &n);
  };
  auto v = [p, q, jet](const Point<Dim>& x) { return apply_product_to_field<T, Dim>(p, q, jet(x)); };
  ManufacturedCase<T, Dim> c{std::move(name), ProblemSpec<T, Dim>{p, q, R, f, ubar, qbar, domain, partition}, u, v};
  c.problem.validate();
  return c;
}

/// B1: u'' = f with u* = x^2 on [0, 1], nonlinearity switched off (p = 0).
template <typename T>
ManufacturedCase<T, 1> case_b1() {
  const auto I = Domain<1>::interval(0, 1);
  return manufacture<T, 1>(LinearOperator::scale(0.0), LinearOperator::identity(), LinearOperator::d(0, 2),
                           exact_field<T, 1>("x^2"), I, BoundaryPartition::all_dirichlet(I), "B1");
}

/// B2: lambda u u' + u'' = f with u* = sin(pi x) on [0, 1], Dirichlet at both ends.
template <typename T>
ManufacturedCase<T, 1> case_b2(double lambda = 1.0) {
  const auto I = Domain<1>::interval(0, 1);
  return manufacture<T, 1>(LinearOperator::scale(lambda), LinearOperator::d(0, 1), LinearOperator::d(0, 2),
                           exact_field<T, 1>("sin(pi*x)"), I, BoundaryPartition::all_dirichlet(I), "B2");
}

/// B3: lambda u^2 + lap u = f with u* = x + y on [0, 1]^2; Neumann on top, Dirichlet elsewhere.
template <typename T>
ManufacturedCase<T, 2> case_b3(double lambda = 1.0) {
  const auto sq = Domain<2>::rectangle(0, 1, 0, 1);
  BoundaryPartition part;
  part.dirichlet = {Face::Left, Face::Right, Face::Bottom};
  part.neumann = {Face::Top};
  return manufacture<T, 2>(LinearOperator::scale(lambda), LinearOperator::identity(), LinearOperator::laplacian(),
                           exact_field<T, 2>("x+y"), sq, part, "B3");
}

}  // namespace dlm::bench
