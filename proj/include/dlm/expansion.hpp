#pragma once

// u(x) = sum_k coeffs[k] * phi(|x - centers[k]|)  [+ a0 + a . x when a tail is attached]

#include "dlm/geometry.hpp"
#include "dlm/kernels.hpp"
#include "dlm/operators.hpp"
#include "dlm/scalar.hpp"

#include <vector>

namespace dlm {

/// Jet of the k-th degree-1 polynomial basis function (1, x, y, ...).
template <typename T, int Dim>
FieldJet<T, Dim> polynomial_jet(int k, const Point<Dim>& x) {
  FieldJet<T, Dim> j;
  if (k == 0) {
    j.value = T(1);
  } else {
    j.value = T(x[k - 1]);
    j.grad[k - 1] = T(1);
  }
  return j;
}

template <typename T, int Dim>
struct Expansion {
  RadialKernel<T> kernel;
  std::vector<Point<Dim>> centers;
  Vector<T> coeffs;
  Vector<T> tail;  // empty or 1 + Dim polynomial coefficients

  FieldJet<T, Dim> jet(const Point<Dim>& x, int order) const {
    FieldJet<T, Dim> out;
    out.order = order;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (coeffs[k] == T(0)) continue;
      auto j = kernel_jet<T, Dim>(kernel, centers[k], x, order);
      j *= coeffs[k];
      out += j;
    }
    for (Eigen::Index k = 0; k < tail.size(); ++k) {
      auto j = polynomial_jet<T, Dim>(static_cast<int>(k), x);
      j.order = order;
      j *= tail[k];
      out += j;
    }
    out.order = order;
    return out;
  }

  T value(const Point<Dim>& x) const { return jet(x, 0).value; }

  T apply(const LinearOperator& op, const Point<Dim>& x, const Point<Dim>* normal = nullptr) const {
    return dlm::apply(op, jet(x, op.order()), normal);
  }
};

}  // namespace dlm
