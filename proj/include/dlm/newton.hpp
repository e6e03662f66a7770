#pragma once

// Single-field collocation of p(u) q(u) + R(u) = f solved by damped Newton,
// and the plain linear collocation of R(u) = f used as a reference solver.
//
// Centers are set_u; rows are the field equation at interior_u followed by one
// boundary row per boundary point, so the system is square.

#include "dlm/errors.hpp"
#include "dlm/expansion.hpp"
#include "dlm/geometry.hpp"
#include "dlm/kernels.hpp"
#include "dlm/linalg.hpp"
#include "dlm/operators.hpp"
#include "dlm/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dlm {

enum class Damping { None, Backtracking };
enum class InitialGuess { Zeros, Field };

template <typename T, int Dim>
struct NewtonConfig {
  int max_iterations = 50;
  double residual_tolerance = 1e-10;
  /// Stop when ||step|| <= step_tolerance * max(1, ||coeffs||).
  double step_tolerance = 1e-12;
  Damping damping = Damping::Backtracking;
  double backtrack_factor = 0.5;
  int max_halvings = 20;
  InitialGuess initial_guess = InitialGuess::Zeros;
  /// Field interpolated at the centers for InitialGuess::Field.
  ScalarField<T, Dim> guess_field;

  void validate() const {
    if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
    if (!(residual_tolerance > 0) || !(step_tolerance > 0)) throw ValidationError("Newton tolerances must be positive");
    if (!(backtrack_factor > 0 && backtrack_factor < 1)) throw ValidationError("backtracking factor must lie in (0, 1)");
    if (max_halvings < 0) throw ValidationError("max_halvings must be nonnegative");
    if (initial_guess == InitialGuess::Field && !guess_field) throw ValidationError("field initial guess selected without a field");
  }
};

template <typename T>
struct NewtonReport {
  int iterations = 0;
  /// ||F||_2 at the initial guess followed by one entry per iteration.
  std::vector<double> residual_history;
  bool converged = false;
  Vector<T> coefficients;
  double condition_estimate = 0.0;
  int factorizations = 0;
};

/// Basis matrices over the collocation rows, precomputed once per solve.
template <typename T, int Dim>
struct CollocationBasis {
  int n_interior = 0;
  Matrix<T> P, Q, R;  // interior rows: p, q, R applied to each basis function
  Matrix<T> B;        // boundary rows
  Vector<T> f;        // interior right-hand side
  Vector<T> g;        // boundary data
  std::vector<Point<Dim>> centers;

  int size() const { return static_cast<int>(centers.size()); }
};

template <typename T, int Dim>
CollocationBasis<T, Dim> build_basis(const ProblemSpec<T, Dim>& problem, const RadialKernel<T>& kernel,
                                     const CollocationSet<Dim>& points) {
  problem.validate();
  CollocationBasis<T, Dim> cb;
  cb.centers = points.set_u();
  const int n = cb.size();
  const int ni = static_cast<int>(points.interior_u.size());
  const int nb = static_cast<int>(points.boundary.size());
  if (ni + nb != n) throw ValidationError("single-field collocation needs as many rows as centers");
  cb.n_interior = ni;
  cb.P.resize(ni, n);
  cb.Q.resize(ni, n);
  cb.R.resize(ni, n);
  cb.f.resize(ni);
  cb.B.resize(nb, n);
  cb.g.resize(nb);
  const int order = problem.field_order();
  for (int i = 0; i < ni; ++i) {
    const auto& x = points.interior_u[i];
    for (int k = 0; k < n; ++k) {
      const auto j = kernel_jet<T, Dim>(kernel, cb.centers[k], x, order);
      cb.P(i, k) = apply(problem.p, j);
      cb.Q(i, k) = apply(problem.q, j);
      cb.R(i, k) = apply(problem.R, j);
    }
    cb.f[i] = checked(problem.f(x), "source term f");
  }
  for (int i = 0; i < nb; ++i) {
    const auto& bp = points.boundary[i];
    const bool dir = problem.partition.is_dirichlet(bp.face);
    const LinearOperator op = dir ? LinearOperator::identity() : LinearOperator::normal_derivative();
    for (int k = 0; k < n; ++k) cb.B(i, k) = apply_to_kernel<T, Dim>(op, kernel, cb.centers[k], bp.x, &bp.normal);
    cb.g[i] = checked(dir ? problem.dirichlet(bp.x) : problem.neumann(bp.x), "boundary data");
  }
  for (const auto* M : {&cb.P, &cb.Q, &cb.R, &cb.B}) {
    for (Eigen::Index i = 0; i < M->size(); ++i) {
      if (!is_finite(M->data()[i])) throw SingularityError("non-finite collocation matrix entry");
    }
  }
  return cb;
}

template <typename T, int Dim>
Vector<T> residual(const CollocationBasis<T, Dim>& cb, const Vector<T>& a) {
  Vector<T> F(cb.size());
  F.head(cb.n_interior) = (cb.P * a).cwiseProduct(cb.Q * a) + cb.R * a - cb.f;
  F.tail(cb.size() - cb.n_interior) = cb.B * a - cb.g;
  return F;
}

template <typename T, int Dim>
Matrix<T> jacobian(const CollocationBasis<T, Dim>& cb, const Vector<T>& a) {
  Matrix<T> J(cb.size(), cb.size());
  const Vector<T> pa = cb.P * a;
  const Vector<T> qa = cb.Q * a;
  J.topRows(cb.n_interior) = qa.asDiagonal() * cb.P + pa.asDiagonal() * cb.Q + cb.R;
  J.bottomRows(cb.size() - cb.n_interior) = cb.B;
  return J;
}

template <typename T, int Dim>
Vector<T> assemble_residual(const ProblemSpec<T, Dim>& problem, const Vector<T>& coeffs, const RadialKernel<T>& kernel,
                            const CollocationSet<Dim>& points) {
  const auto cb = build_basis(problem, kernel, points);
  if (coeffs.size() != cb.size()) throw ValidationError("coefficient vector length must equal the number of centers");
  return residual(cb, coeffs);
}

template <typename T, int Dim>
Matrix<T> assemble_jacobian(const ProblemSpec<T, Dim>& problem, const Vector<T>& coeffs, const RadialKernel<T>& kernel,
                            const CollocationSet<Dim>& points) {
  const auto cb = build_basis(problem, kernel, points);
  if (coeffs.size() != cb.size()) throw ValidationError("coefficient vector length must equal the number of centers");
  return jacobian(cb, coeffs);
}

/// Coefficients interpolating `field` at the centers.
template <typename T, int Dim>
Vector<T> interpolate(const RadialKernel<T>& kernel, const std::vector<Point<Dim>>& centers, const ScalarField<T, Dim>& field) {
  const int n = static_cast<int>(centers.size());
  Matrix<T> A(n, n);
  Vector<T> b(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) A(i, k) = apply_to_kernel<T, Dim>(LinearOperator::identity(), kernel, centers[k], centers[i]);
    b[i] = field(centers[i]);
  }
  return solve_square<T>(A, b).x;
}

template <typename T, int Dim>
struct NewtonSolution {
  Expansion<T, Dim> u;
  NewtonReport<T> report;
};

/// Newton iteration over a prebuilt basis.
template <typename T, int Dim>
NewtonSolution<T, Dim> newton_iterate(const CollocationBasis<T, Dim>& cb, const RadialKernel<T>& kernel,
                                      const NewtonConfig<T, Dim>& config = {}) {
  config.validate();
  const int n = cb.size();

  NewtonReport<T> rep;
  Vector<T> a = config.initial_guess == InitialGuess::Zeros ? Vector<T>(Vector<T>::Zero(n))
                                                            : interpolate<T, Dim>(kernel, cb.centers, config.guess_field);
  Vector<T> F = residual(cb, a);
  T fn = F.norm();
  rep.residual_history.push_back(to_double(fn));

  const T tol = T(config.residual_tolerance);
  for (int it = 1; it <= config.max_iterations && !(fn <= tol); ++it) {
    const Matrix<T> J = jacobian(cb, a);
    const auto lin = solve_square<T>(J, -F, it);
    ++rep.factorizations;
    rep.condition_estimate = lin.condition_estimate;
    const Vector<T>& step = lin.x;

    T lambda(1);
    Vector<T> trial = a + step;
    Vector<T> Ft = residual(cb, trial);
    bool exhausted = false;
    if (config.damping == Damping::Backtracking) {
      int h = 0;
      while (!(Ft.norm() < fn) && h < config.max_halvings) {
        lambda *= T(config.backtrack_factor);
        trial = a + lambda * step;
        Ft = residual(cb, trial);
        ++h;
      }
      exhausted = !(Ft.norm() < fn);
    } else {
      exhausted = true;
    }

    a = trial;
    F = Ft;
    fn = F.norm();
    rep.iterations = it;
    rep.residual_history.push_back(to_double(fn));
    if (!is_finite(fn)) throw DivergenceError("residual became non-finite", it);

    const std::size_t k = rep.residual_history.size() - 1;
    if (exhausted && k >= 5 && rep.residual_history[k] > 10.0 * rep.residual_history[k - 5]) {
      throw DivergenceError("residual grew tenfold over five iterations with damping exhausted", it);
    }
    if (fn <= tol) break;
    using std::max;
    const T scale = max(T(1), a.norm());
    if (lambda * step.norm() <= T(config.step_tolerance) * scale) break;
  }
  rep.converged = fn <= tol;
  rep.coefficients = a;
  NewtonSolution<T, Dim> out{{kernel, cb.centers, a, Vector<T>()}, rep};
  return out;
}

template <typename T, int Dim>
NewtonSolution<T, Dim> newton_solve(const ProblemSpec<T, Dim>& problem, const RadialKernel<T>& kernel,
                                    const CollocationSet<Dim>& points, const NewtonConfig<T, Dim>& config = {}) {
  config.validate();
  return newton_iterate(build_basis(problem, kernel, points), kernel, config);
}

/// Single-field collocation of the linear problem R(u) = f (p and q ignored).
template <typename T, int Dim>
Expansion<T, Dim> linear_collocation(const ProblemSpec<T, Dim>& problem, const RadialKernel<T>& kernel,
                                     const CollocationSet<Dim>& points, double* condition = nullptr) {
  const auto cb = build_basis(problem, kernel, points);
  Matrix<T> A(cb.size(), cb.size());
  A.topRows(cb.n_interior) = cb.R;
  A.bottomRows(cb.size() - cb.n_interior) = cb.B;
  Vector<T> b(cb.size());
  b << cb.f, cb.g;
  const auto res = solve_square<T>(A, b);
  if (condition) *condition = res.condition_estimate;
  return {kernel, cb.centers, res.x, Vector<T>()};
}

}  // namespace dlm
