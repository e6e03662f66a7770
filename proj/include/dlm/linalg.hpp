#pragma once

// Dense solves used by the collocation solvers. Every factorization goes
// through here so it can be counted.

#include "dlm/errors.hpp"
#include "dlm/scalar.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <limits>
#include <string>

namespace dlm {

/// Process-wide count of dense factorizations performed by this module.
inline std::atomic<long>& factorization_counter() {
  static std::atomic<long> counter{0};
  return counter;
}

/// Relative rank tolerance for the column-pivoted QR.
inline constexpr double kRankTolerance = 1e-12;
/// Condition estimates above this trigger a warning, not an error.
inline constexpr double kConditionWarning = 1e12;

enum class SolveMode { Square, LeastSquares };

inline std::string_view to_string(SolveMode m) { return m == SolveMode::Square ? "square" : "least_squares"; }

template <typename T>
struct LinearSolveResult {
  Vector<T> x;
  double condition_estimate = 0.0;
  int rank = 0;
};

/// 1-norm condition estimate of a square matrix from an LU factorization: the
/// reciprocal of Eigen's rcond estimate, raised to the pivot growth ratio
/// max|U_ii| / min|U_ii| when that is larger (rcond can miss an exactly
/// repeated row). For diagonal matrices it is exact.
template <typename T>
double condition_estimate_1norm(const Eigen::PartialPivLU<Matrix<T>>& lu) {
  using std::abs;
  const T rc = lu.rcond();
  if (!(rc > T(0))) return std::numeric_limits<double>::infinity();
  const auto& U = lu.matrixLU();
  T lo = abs(U(0, 0)), hi = lo;
  for (Eigen::Index i = 1; i < U.rows(); ++i) {
    const T d = abs(U(i, i));
    if (d < lo) lo = d;
    if (d > hi) hi = d;
  }
  if (!(lo > T(0))) return std::numeric_limits<double>::infinity();
  const T ratio = hi / lo;
  const T inv = T(1) / rc;
  return to_double(ratio > inv ? ratio : inv);
}

/// |r_11| / |r_kk| from a column-pivoted QR, k the numerical rank.
template <typename T>
double condition_estimate_qr(const Eigen::ColPivHouseholderQR<Matrix<T>>& qr) {
  using std::abs;
  const auto& R = qr.matrixQR();
  const int k = static_cast<int>(qr.rank());
  if (k == 0) return std::numeric_limits<double>::infinity();
  const T lo = abs(R(k - 1, k - 1));
  if (!(lo > T(0))) return std::numeric_limits<double>::infinity();
  return to_double(abs(R(0, 0)) / lo);
}

/// Square solve by partial-pivoting LU. Throws SingularSystemError when the
/// reciprocal condition estimate is below machine epsilon.
template <typename T>
LinearSolveResult<T> solve_square(const Matrix<T>& A, const Vector<T>& b, int iteration = -1) {
  if (A.rows() != A.cols()) throw ValidationError("square solve needs a square matrix");
  factorization_counter().fetch_add(1);
  Eigen::PartialPivLU<Matrix<T>> lu(A);
  LinearSolveResult<T> out;
  out.condition_estimate = condition_estimate_1norm(lu);
  out.rank = static_cast<int>(A.cols());
  const double eps = to_double(std::numeric_limits<T>::epsilon());
  if (!(out.condition_estimate * eps < 1.0)) {
    throw SingularSystemError("matrix is singular to working precision (condition estimate " +
                                  std::to_string(out.condition_estimate) + ")",
                              out.condition_estimate, iteration);
  }
  out.x = lu.solve(b);
  for (Eigen::Index i = 0; i < out.x.size(); ++i) {
    if (!is_finite(out.x[i])) throw SolverError("non-finite entry in the solution vector");
  }
  return out;
}

/// Least-squares solve by column-pivoted Householder QR with relative rank
/// tolerance kRankTolerance. Rank deficiency is an error.
template <typename T>
LinearSolveResult<T> solve_least_squares(const Matrix<T>& A, const Vector<T>& b) {
  if (A.rows() < A.cols()) throw ValidationError("least-squares solve needs at least as many rows as columns");
  factorization_counter().fetch_add(1);
  Eigen::ColPivHouseholderQR<Matrix<T>> qr;
  qr.setThreshold(T(kRankTolerance));
  qr.compute(A);
  LinearSolveResult<T> out;
  out.rank = static_cast<int>(qr.rank());
  out.condition_estimate = condition_estimate_qr(qr);
  if (out.rank < A.cols()) {
    throw SingularSystemError("rank " + std::to_string(out.rank) + " < " + std::to_string(A.cols()) +
                                  " columns at relative tolerance 1e-12",
                              std::numeric_limits<double>::infinity());
  }
  out.x = qr.solve(b);
  for (Eigen::Index i = 0; i < out.x.size(); ++i) {
    if (!is_finite(out.x[i])) throw SolverError("non-finite entry in the solution vector");
  }
  return out;
}

template <typename T>
double norm2(const Vector<T>& v) {
  return to_double(v.norm());
}

}  // namespace dlm
