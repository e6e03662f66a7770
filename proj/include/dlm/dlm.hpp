#pragma once

// Two-field collocation of  v + R(u) = f  with v standing in for p(u) q(u).
// One assembly, one factorization, one solve.
//
// Column layout: [alpha (n_u) | beta (n_v) | polynomial tail (0 or 1 + Dim)].
// Row layout, first block then second block:
//   first:  field equation at interior_u, then u boundary rows (Dirichlet, Neumann),
//       then moment rows when the tail is on;
//   second: field equation at interior_v, then one v row per boundary point,
//       then extra over-posed field-equation rows.

#include "dlm/errors.hpp"
#include "dlm/expansion.hpp"
#include "dlm/geometry.hpp"
#include "dlm/kernels.hpp"
#include "dlm/linalg.hpp"
#include "dlm/operators.hpp"
#include "dlm/scalar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dlm {

enum class RowTag {
  Interior,
  DirichletU,
  NeumannU,
  MomentCondition,
  DirichletV,
  DirichletVSubstituted,
  NeumannVSubstituted,
  ExtraOverposed,
};

inline std::string_view to_string(RowTag t) {
  switch (t) {
    case RowTag::Interior: return "interior";
    case RowTag::DirichletU: return "dirichlet_u";
    case RowTag::NeumannU: return "neumann_u";
    case RowTag::MomentCondition: return "moment";
    case RowTag::DirichletV: return "dirichlet_v";
    case RowTag::DirichletVSubstituted: return "dirichlet_v_substituted";
    case RowTag::NeumannVSubstituted: return "neumann_v_substituted";
    case RowTag::ExtraOverposed: return "extra";
  }
  return "?";
}

inline bool is_u_boundary(RowTag t) { return t == RowTag::DirichletU || t == RowTag::NeumannU; }
inline bool is_v_boundary(RowTag t) {
  return t == RowTag::DirichletV || t == RowTag::DirichletVSubstituted || t == RowTag::NeumannVSubstituted;
}

enum class VBoundarySource { ExactField, GoverningEquation };

inline std::string_view to_string(VBoundarySource s) { return s == VBoundarySource::ExactField ? "exact" : "governing"; }

template <typename T, int Dim>
struct DlmOptions {
  SolveMode mode = SolveMode::Square;
  /// Additional field-equation rows for LeastSquares mode.
  std::vector<Point<Dim>> extra_points;
  VBoundarySource v_source = VBoundarySource::GoverningEquation;
  /// Dirichlet values of v for VBoundarySource::ExactField.
  ScalarField<T, Dim> v_exact;
  bool polynomial_tail = false;
  /// Where the consistency residual is measured; empty selects every collocation point.
  std::vector<Point<Dim>> consistency_points;
};

template <typename T, int Dim>
struct BlockSystem {
  Matrix<T> A;
  Vector<T> b;
  std::vector<RowTag> row_tags;
  int rows_first = 0;
  int n_u = 0;
  int n_v = 0;
  int n_tail = 0;
  SolveMode mode = SolveMode::Square;
  VBoundarySource v_source = VBoundarySource::GoverningEquation;

  RadialKernel<T> psi_u;
  RadialKernel<T> psi_v;
  std::vector<Point<Dim>> centers_u;
  std::vector<Point<Dim>> centers_v;
  LinearOperator p;
  LinearOperator q;
  std::vector<Point<Dim>> consistency_points;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }

  Matrix<T> A1() const { return A.topLeftCorner(rows_first, n_u); }
  Matrix<T> A2() const { return A.block(0, n_u, rows_first, n_v); }
  Matrix<T> C1() const { return A.bottomLeftCorner(rows() - rows_first, n_u); }
  Matrix<T> C2() const { return A.block(rows_first, n_u, rows() - rows_first, n_v); }
  Vector<T> b1() const { return b.head(rows_first); }
  Vector<T> b2() const { return b.tail(rows() - rows_first); }
};

struct SolveDiagnostics {
  double algebraic_residual = 0.0;
  double boundary_residual_u = 0.0;
  double boundary_residual_v = 0.0;
  double consistency_residual = 0.0;
  double condition_estimate = 0.0;
  SolveMode mode = SolveMode::Square;
  bool ill_conditioned = false;
  bool polynomial_tail = false;
  int factorizations = 0;
  int rank = 0;
  /// Wall time of the factorization and solve alone.
  double solve_ms = 0.0;
};

template <typename T, int Dim>
struct DlmSolution {
  Expansion<T, Dim> u;
  Expansion<T, Dim> v;
  SolveDiagnostics diagnostics;

  const Vector<T>& alpha() const { return u.coeffs; }
  const Vector<T>& beta() const { return v.coeffs; }
};

namespace detail {

template <typename T, int Dim>
class RowWriter {
 public:
  RowWriter(BlockSystem<T, Dim>& sys, const ProblemSpec<T, Dim>& problem) : sys_(sys), problem_(problem) {}

  /// v + R u = f at x.
  void equation(const Point<Dim>& x, RowTag tag) {
    auto row = next(tag);
    for (int k = 0; k < sys_.n_u; ++k) row[k] = apply_to_kernel<T, Dim>(problem_.R, sys_.psi_u, sys_.centers_u[k], x);
    for (int j = 0; j < sys_.n_v; ++j) row[sys_.n_u + j] = apply_to_kernel<T, Dim>(LinearOperator::identity(), sys_.psi_v, sys_.centers_v[j], x);
    tail(row, problem_.R, x, nullptr);
    sys_.b[cur_] = checked(problem_.f(x), "source term f");
    finish();
  }

  /// op u = value at x (u-only row).
  void u_row(const LinearOperator& op, const Point<Dim>& x, const Point<Dim>* normal, const T& value, RowTag tag) {
    auto row = next(tag);
    for (int k = 0; k < sys_.n_u; ++k) row[k] = apply_to_kernel<T, Dim>(op, sys_.psi_u, sys_.centers_u[k], x, normal);
    tail(row, op, x, normal);
    sys_.b[cur_] = checked(value, "boundary data");
    finish();
  }

  /// v = value at x (v-only row).
  void v_row(const Point<Dim>& x, const T& value, RowTag tag) {
    auto row = next(tag);
    for (int j = 0; j < sys_.n_v; ++j) row[sys_.n_u + j] = apply_to_kernel<T, Dim>(LinearOperator::identity(), sys_.psi_v, sys_.centers_v[j], x);
    sys_.b[cur_] = checked(value, "v boundary data");
    finish();
  }

  /// sum_k alpha_k * P_t(x_k) = 0 for polynomial basis function t.
  void moment(int t) {
    auto row = next(RowTag::MomentCondition);
    for (int k = 0; k < sys_.n_u; ++k) row[k] = polynomial_jet<T, Dim>(t, sys_.centers_u[k]).value;
    sys_.b[cur_] = T(0);
    finish();
  }

  int written() const { return cur_; }

 private:
  auto next(RowTag tag) {
    if (cur_ >= sys_.A.rows()) throw ValidationError("row budget exceeded during assembly");
    sys_.row_tags.push_back(tag);
    return sys_.A.row(cur_);
  }

  template <typename Row>
  void tail(Row& row, const LinearOperator& op, const Point<Dim>& x, const Point<Dim>* normal) {
    for (int t = 0; t < sys_.n_tail; ++t) row[sys_.n_u + sys_.n_v + t] = dlm::apply(op, polynomial_jet<T, Dim>(t, x), normal);
  }

  void finish() {
    for (Eigen::Index c = 0; c < sys_.A.cols(); ++c) {
      if (!is_finite(sys_.A(cur_, c))) throw SingularityError("non-finite collocation matrix entry in row " + std::to_string(cur_));
    }
    ++cur_;
  }

  BlockSystem<T, Dim>& sys_;
  const ProblemSpec<T, Dim>& problem_;
  int cur_ = 0;
};

}  // namespace detail

template <typename T, int Dim>
BlockSystem<T, Dim> assemble_dlm(const ProblemSpec<T, Dim>& problem, const CollocationSet<Dim>& points,
                                 const RadialKernel<T>& psi_u, const RadialKernel<T>& psi_v,
                                 const DlmOptions<T, Dim>& options = {}) {
  problem.validate();
  if (options.v_source == VBoundarySource::ExactField && !options.v_exact) {
    throw ValidationError("exact v boundary source selected without a v field");
  }
  if (options.mode == SolveMode::LeastSquares && options.extra_points.empty()) {
    throw ValidationError("least-squares mode needs at least one extra collocation point");
  }
  if (options.mode == SolveMode::Square && !options.extra_points.empty()) {
    throw ValidationError("extra collocation points make the system over-posed; select least-squares mode");
  }

  BlockSystem<T, Dim> sys;
  sys.mode = options.mode;
  sys.v_source = options.v_source;
  sys.psi_u = psi_u;
  sys.psi_v = psi_v;
  sys.centers_u = points.set_u();
  sys.centers_v = points.set_v();
  sys.n_u = static_cast<int>(sys.centers_u.size());
  sys.n_v = static_cast<int>(sys.centers_v.size());
  sys.n_tail = options.polynomial_tail ? 1 + Dim : 0;
  sys.p = problem.p;
  sys.q = problem.q;
  if (sys.n_u != sys.n_v) throw ValidationError("staggered sets must have equal size");

  const int n_b = static_cast<int>(points.boundary.size());
  const int rows_first = static_cast<int>(points.interior_u.size()) + n_b + sys.n_tail;
  const int rows_second = static_cast<int>(points.interior_v.size()) + n_b + static_cast<int>(options.extra_points.size());
  const int cols = sys.n_u + sys.n_v + sys.n_tail;
  if (options.mode == SolveMode::Square && rows_first + rows_second != cols) {
    throw ValidationError("square mode needs " + std::to_string(cols) + " rows but the point sets give " +
                          std::to_string(rows_first + rows_second));
  }
  sys.rows_first = rows_first;
  sys.A = Matrix<T>::Zero(rows_first + rows_second, cols);
  sys.b = Vector<T>::Zero(rows_first + rows_second);

  detail::RowWriter<T, Dim> w(sys, problem);
  for (const auto& x : points.interior_u) w.equation(x, RowTag::Interior);
  for (const auto& bp : points.boundary) {
    if (problem.partition.is_dirichlet(bp.face)) {
      w.u_row(LinearOperator::identity(), bp.x, nullptr, problem.dirichlet(bp.x), RowTag::DirichletU);
    } else {
      w.u_row(LinearOperator::normal_derivative(), bp.x, &bp.normal, problem.neumann(bp.x), RowTag::NeumannU);
    }
  }
  for (int t = 0; t < sys.n_tail; ++t) w.moment(t);

  for (const auto& x : points.interior_v) w.equation(x, RowTag::Interior);
  for (const auto& bp : points.boundary) {
    if (problem.partition.is_neumann(bp.face)) {
      w.equation(bp.x, RowTag::NeumannVSubstituted);
    } else if (options.v_source == VBoundarySource::ExactField) {
      w.v_row(bp.x, options.v_exact(bp.x), RowTag::DirichletV);
    } else {
      w.equation(bp.x, RowTag::DirichletVSubstituted);
    }
  }
  for (const auto& x : options.extra_points) {
    if (!problem.domain.contains(x)) throw ValidationError("extra collocation point outside the domain");
    w.equation(x, RowTag::ExtraOverposed);
  }

  if (!options.consistency_points.empty()) {
    sys.consistency_points = options.consistency_points;
  } else {
    sys.consistency_points = sys.centers_u;
    sys.consistency_points.insert(sys.consistency_points.end(), sys.centers_v.begin(), sys.centers_v.end());
  }
  return sys;
}

/// 1-norm condition estimate (LU) for square systems; |r11|/|rkk| of the
/// column-pivoted QR for over-posed ones.
template <typename T, int Dim>
double condition_estimate(const BlockSystem<T, Dim>& sys) {
  if (sys.mode == SolveMode::Square && sys.rows() == sys.cols()) {
    Eigen::PartialPivLU<Matrix<T>> lu(sys.A);
    return condition_estimate_1norm(lu);
  }
  Eigen::ColPivHouseholderQR<Matrix<T>> qr;
  qr.setThreshold(T(kRankTolerance));
  qr.compute(sys.A);
  return condition_estimate_qr(qr);
}

template <typename T, int Dim>
std::pair<std::vector<T>, std::vector<T>> evaluate_solution(const DlmSolution<T, Dim>& sol, const std::vector<Point<Dim>>& points) {
  std::vector<T> u, v;
  u.reserve(points.size());
  v.reserve(points.size());
  for (const auto& x : points) {
    u.push_back(sol.u.value(x));
    v.push_back(sol.v.value(x));
  }
  return {u, v};
}

/// max over test points of |v - (p u)(q u)|; 0 for an empty set.
template <typename T, int Dim>
double consistency_residual(const DlmSolution<T, Dim>& sol, const LinearOperator& p, const LinearOperator& q,
                            const std::vector<Point<Dim>>& test_points) {
  using std::abs;
  const int order = std::max(p.order(), q.order());
  T worst(0);
  for (const auto& x : test_points) {
    const auto uj = sol.u.jet(x, order);
    const T d = abs(sol.v.value(x) - apply_product_to_field<T, Dim>(p, q, uj));
    if (d > worst) worst = d;
  }
  return to_double(worst);
}

template <typename T, int Dim>
DlmSolution<T, Dim> solve_dlm(const BlockSystem<T, Dim>& sys) {
  using std::abs;
  if (sys.rows() < sys.cols()) throw ValidationError("system has fewer rows than unknowns");
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = sys.mode == SolveMode::Square ? solve_square<T>(sys.A, sys.b) : solve_least_squares<T>(sys.A, sys.b);
  const double solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  DlmSolution<T, Dim> sol;
  sol.u = {sys.psi_u, sys.centers_u, res.x.head(sys.n_u), res.x.tail(sys.n_tail)};
  sol.v = {sys.psi_v, sys.centers_v, res.x.segment(sys.n_u, sys.n_v), Vector<T>()};

  auto& d = sol.diagnostics;
  d.mode = sys.mode;
  d.factorizations = 1;
  d.solve_ms = solve_ms;
  d.rank = res.rank;
  d.condition_estimate = res.condition_estimate;
  d.ill_conditioned = res.condition_estimate > kConditionWarning;
  d.polynomial_tail = sys.n_tail > 0;

  const Vector<T> r = sys.A * res.x - sys.b;
  d.algebraic_residual = to_double(r.norm());
  for (int i = 0; i < sys.rows(); ++i) {
    const double ri = to_double(abs(r[i]));
    if (is_u_boundary(sys.row_tags[i])) d.boundary_residual_u = std::max(d.boundary_residual_u, ri);
    if (is_v_boundary(sys.row_tags[i])) d.boundary_residual_v = std::max(d.boundary_residual_v, ri);
  }
  d.consistency_residual = consistency_residual(sol, sys.p, sys.q, sys.consistency_points);
  return sol;
}

}  // namespace dlm
