#pragma once

// Convergence sweeps, DLM-vs-Newton comparisons and CSV output, driven by a Config.

#include "dlm/bench/config.hpp"
#include "dlm/bench/manufactured.hpp"
#include "dlm/dlm.hpp"
#include "dlm/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace dlm::bench {

struct ConvergenceRecord {
  std::string case_name;
  std::string solver;
  std::string kernel;
  int N = 0;
  std::string mode;
  double max_error_u = std::numeric_limits<double>::quiet_NaN();
  double l2_error_u = std::numeric_limits<double>::quiet_NaN();
  double consistency_residual = std::numeric_limits<double>::quiet_NaN();
  double condition_estimate = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double wall_time_ms = std::numeric_limits<double>::quiet_NaN();
  /// "ok", "not_converged" or "failed"; failures carry the error text in `message`.
  std::string status = "ok";
  std::string message;

  bool ok() const { return status == "ok"; }
};

struct Comparison {
  ConvergenceRecord dlm;
  ConvergenceRecord newton;
  /// max |u_dlm - u_newton| over the evaluation grid; nan if either solve failed.
  double u_difference = std::numeric_limits<double>::quiet_NaN();
};

enum class KernelRole { U, V };

// ---------------------------------------------------------------------------
// Problem and kernel construction

template <typename T, int Dim>
ManufacturedCase<T, Dim> make_case(const Config& cfg) {
  if (cfg.dim() != Dim) throw ValidationError("case dimension does not match the requested instantiation");
  if constexpr (Dim == 1) {
    if (cfg.case_name == "B1") return case_b1<T>();
    if (cfg.case_name == "B2") return case_b2<T>(cfg.lambda);
  } else {
    if (cfg.case_name == "B3") return case_b3<T>(cfg.lambda);
  }
  if (cfg.case_name != "custom") throw ValidationError("unknown case '" + cfg.case_name + "'");
  Point<Dim> lo, hi;
  for (int a = 0; a < Dim; ++a) {
    lo[a] = cfg.lower[a];
    hi[a] = cfg.upper[a];
  }
  const Domain<Dim> domain(lo, hi);
  BoundaryPartition part;
  if (cfg.dirichlet.empty() && cfg.neumann.empty()) {
    part = BoundaryPartition::all_dirichlet(domain);
  } else {
    for (const auto& f : cfg.dirichlet) part.dirichlet.insert(face_from_string(f));
    for (const auto& f : cfg.neumann) part.neumann.insert(face_from_string(f));
  }
  const auto p = cfg.p.empty() ? LinearOperator::scale(0.0) : LinearOperator::parse(cfg.p);
  const auto q = cfg.q.empty() ? LinearOperator::identity() : LinearOperator::parse(cfg.q);
  return manufacture<T, Dim>(p, q, LinearOperator::parse(cfg.R), exact_field<T, Dim>(cfg.exact), domain, part, "custom");
}

namespace detail {

inline std::optional<FsKind> resolve_base(const std::string& sel, const LinearOperator* op, int dim, const char* what) {
  if (sel == "none") return std::nullopt;
  if (!sel.empty()) return fs_kind_from_string(sel);
  if (!op) throw ValidationError(std::string(what) + " must be named explicitly when no problem is given");
  return fundamental_solution_for(*op, dim);
}

inline FsKind required(const std::optional<FsKind>& k, const char* what) {
  if (!k) throw CatalogueMissError(std::string(what) + " needs a fundamental solution; got the factor 1");
  return *k;
}

}  // namespace detail

/// Builds a kernel from its spec. `h` is the point spacing used by the "spacing"
/// scale; `problem` supplies default catalogue bases and the operators of the
/// composed and single kernels (may be null for families that need neither).
template <typename T, int Dim>
RadialKernel<T> build_kernel(const KernelSpec& spec, KernelRole role, const ProblemSpec<T, Dim>* problem, double h,
                             const RadialKernel<T>* psi_u = nullptr) {
  const bool scaled = spec.scale == "spacing";
  if (scaled && !(h > 0)) throw ValidationError("spacing-scaled kernel needs a positive point spacing");
  const double c = scaled ? spec.c * h : spec.c;
  const double eps = scaled ? spec.epsilon / h : spec.epsilon;
  const std::string& fam = spec.family;
  auto base = [&] {
    return detail::required(detail::resolve_base(spec.base, problem ? &problem->R : nullptr, Dim, "base"), "base");
  };
  auto p_base = [&] { return detail::resolve_base(spec.p_base, problem ? &problem->p : nullptr, Dim, "p_base"); };
  auto q_base = [&] { return detail::resolve_base(spec.q_base, problem ? &problem->q : nullptr, Dim, "q_base"); };

  if (fam == "mq") return multiquadric<T>(c);
  if (fam == "imq") return inverse_multiquadric<T>(c);
  if (fam == "gaussian") return gaussian<T>(eps);
  if (fam == "polyharmonic") return polyharmonic<T>(spec.k);
  if (fam == "power") return radial_power<T>(spec.k);
  if (fam == "tps") return thin_plate_spline<T>(spec.k);
  if (fam == "fundamental") return fundamental_solution<T>(base(), spec.order);
  if (fam == "eak") return eak_kernel<T>(spec.f, spec.m, base());
  if (fam == "product") return psi_v_product<T>(spec.n, base(), p_base(), q_base());
  if (fam == "hsk") {
    auto pair = hsk_kernels<T>(spec.m, spec.n, base(), p_base(), q_base());
    return role == KernelRole::U ? pair.first : pair.second;
  }
  if (fam == "spk") {
    auto pair = spk_kernels<T>(c, base(), p_base(), q_base(), spec.order);
    return role == KernelRole::U ? pair.first : pair.second;
  }
  if (fam == "composed") {
    if (!problem && (spec.p_op.empty() || spec.q_op.empty())) {
      throw ValidationError("composed kernel needs p_op and q_op when no problem is given");
    }
    if (!psi_u) throw ValidationError("composed kernel needs a psi_u to compose");
    const auto p = spec.p_op.empty() ? problem->p : LinearOperator::parse(spec.p_op);
    const auto q = spec.q_op.empty() ? problem->q : LinearOperator::parse(spec.q_op);
    return psi_v_composed<T>(spec.s, p, q, *psi_u, Dim);
  }
  if (fam == "single") {
    if (!problem) throw ValidationError("single kernels need a problem for p, q, R and f");
    SingleStyle style;
    if (spec.style == "eak") {
      style = SingleStyle::EAK;
    } else if (spec.style == "hsk") {
      style = SingleStyle::HSK;
    } else if (spec.style == "spk") {
      style = SingleStyle::SPK;
    } else {
      throw ValidationError("unknown single-kernel style '" + spec.style + "'");
    }
    KernelParams kp;
    kp.m = spec.m;
    kp.c = c;
    kp.order = spec.order;
    auto f = problem->f;
    SourceWeight w = [f](std::span<const double> x) {
      Point<Dim> pt;
      for (int a = 0; a < Dim; ++a) pt[a] = x[a];
      return to_double(f(pt));
    };
    return single_rbf<T>(style, problem->p, problem->q, problem->R, std::move(w), kp, Dim);
  }
  throw ValidationError("unknown kernel family '" + fam + "'");
}

// ---------------------------------------------------------------------------
// Evaluation

template <int Dim>
std::vector<Point<Dim>> evaluation_grid(const Domain<Dim>& domain, int per_axis) {
  if (per_axis < 10) throw ValidationError("evaluation grid needs at least 10 points per axis");
  std::vector<Point<Dim>> out;
  const auto lo = domain.lower();
  const auto hi = domain.upper();
  auto coord = [&](int a, int i) { return i == per_axis - 1 ? hi[a] : lo[a] + (hi[a] - lo[a]) * i / (per_axis - 1); };
  if constexpr (Dim == 1) {
    for (int i = 0; i < per_axis; ++i) out.push_back(Point<1>(coord(0, i)));
  } else {
    for (int i = 0; i < per_axis; ++i) {
      for (int j = 0; j < per_axis; ++j) out.push_back(Point<2>(coord(0, i), coord(1, j)));
    }
  }
  return out;
}

/// Extra interior rows for the over-posed mode: a Halton run (bases 3, 5) started at index 101.
template <int Dim>
std::vector<Point<Dim>> extra_collocation_points(const Domain<Dim>& domain, int count) {
  static constexpr int bases[2] = {3, 5};
  std::vector<Point<Dim>> out;
  for (int i = 0; i < count; ++i) {
    Point<Dim> x;
    for (int a = 0; a < Dim; ++a) {
      x[a] = domain.lower()[a] + domain.extent(a) * radical_inverse(101 + i, bases[a]);
    }
    out.push_back(x);
  }
  return out;
}

template <typename T, int Dim>
std::pair<double, double> field_errors(const Expansion<T, Dim>& u, const ExactField<T, Dim>& exact,
                                       const std::vector<Point<Dim>>& grid) {
  using std::abs;
  T worst(0), sq(0);
  for (const auto& x : grid) {
    const T e = abs(u.value(x) - exact(x));
    if (!is_finite(e)) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    worst = std::max(worst, e);
    sq += e * e;
  }
  using std::sqrt;
  return {to_double(worst), to_double(sqrt(sq / T(grid.size())))};
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename T, int Dim>
NewtonConfig<T, Dim> newton_config(const Config& cfg, const ManufacturedCase<T, Dim>& mc) {
  NewtonConfig<T, Dim> nc;
  nc.max_iterations = cfg.newton.max_iterations;
  nc.residual_tolerance = cfg.newton.tolerance;
  nc.step_tolerance = cfg.newton.step_tolerance;
  nc.damping = cfg.newton.damping == "none" ? Damping::None : Damping::Backtracking;
  if (cfg.newton.initial_guess == "exact") {
    nc.initial_guess = InitialGuess::Field;
    nc.guess_field = mc.u_exact;
  }
  return nc;
}

}  // namespace detail

/// One solve at one N. Solver failures are captured in the record; validation
/// and catalogue errors propagate. The fitted u-field is returned through `u_out`.
template <typename T, int Dim>
ConvergenceRecord run_single(const Config& cfg, const ManufacturedCase<T, Dim>& mc, const std::string& solver, int N,
                             Expansion<T, Dim>* u_out = nullptr) {
  ConvergenceRecord rec;
  rec.case_name = mc.name;
  rec.solver = solver;
  rec.N = N;
  rec.mode = solver == "dlm" ? cfg.mode : "square";

  const auto& pr = mc.problem;
  const auto [n_int, n_b] = split_center_count<Dim>(N);
  const auto strategy = cfg.points == "halton" ? PointStrategy::Halton : PointStrategy::Equispaced;
  const auto pts = generate_collocation(pr.domain, pr.partition, n_int, n_b, strategy, cfg.stagger_offset);
  const double h = pts.characteristic_spacing();
  const auto grid = evaluation_grid(pr.domain, cfg.eval_points());
  const bool total = cfg.timing == "total";

  try {
    Expansion<T, Dim> u;
    if (solver == "dlm") {
      const auto psi_u = build_kernel<T, Dim>(cfg.psi_u, KernelRole::U, &pr, h);
      const auto psi_v = build_kernel<T, Dim>(cfg.psi_v, KernelRole::V, &pr, h, &psi_u);
      rec.kernel = "u=" + psi_u.describe() + " v=" + psi_v.describe();
      DlmOptions<T, Dim> opt;
      opt.mode = cfg.mode == "least_squares" ? SolveMode::LeastSquares : SolveMode::Square;
      if (cfg.extra_points > 0) opt.extra_points = extra_collocation_points(pr.domain, cfg.extra_points);
      opt.v_source = cfg.v_boundary == "exact" ? VBoundarySource::ExactField : VBoundarySource::GoverningEquation;
      opt.v_exact = mc.v_exact;
      opt.polynomial_tail = cfg.polynomial_tail;
      opt.consistency_points = grid;
      const auto t0 = detail::Clock::now();
      const auto sys = assemble_dlm(pr, pts, psi_u, psi_v, opt);
      const double assembly_ms = detail::ms_since(t0);
      const auto sol = solve_dlm(sys);
      rec.wall_time_ms = sol.diagnostics.solve_ms + (total ? assembly_ms : 0.0);
      rec.consistency_residual = sol.diagnostics.consistency_residual;
      rec.condition_estimate = sol.diagnostics.condition_estimate;
      rec.iterations = 1;
      u = sol.u;
    } else if (solver == "newton") {
      const auto kernel = build_kernel<T, Dim>(cfg.newton.kernel, KernelRole::U, &pr, h);
      rec.kernel = kernel.describe();
      const auto nc = detail::newton_config(cfg, mc);
      const auto t0 = detail::Clock::now();
      const auto cb = build_basis(pr, kernel, pts);
      const auto t1 = detail::Clock::now();
      const auto sol = newton_iterate(cb, kernel, nc);
      rec.wall_time_ms = detail::ms_since(total ? t0 : t1);
      rec.condition_estimate = sol.report.condition_estimate;
      rec.iterations = sol.report.iterations;
      if (!sol.report.converged) {
        rec.status = "not_converged";
        rec.message = "Newton stopped after " + std::to_string(sol.report.iterations) + " iterations with ||F|| = " +
                      std::to_string(sol.report.residual_history.back());
      }
      u = sol.u;
    } else {
      throw ValidationError("unknown solver '" + solver + "'");
    }
    const auto [emax, el2] = field_errors(u, mc.u_exact, grid);
    rec.max_error_u = emax;
    rec.l2_error_u = el2;
    if (u_out) *u_out = u;
  } catch (const SolverError& e) {
    rec.status = "failed";
    rec.message = e.what();
  } catch (const SingularityError& e) {
    rec.status = "failed";
    rec.message = e.what();
  }
  return rec;
}

template <typename T, int Dim>
std::vector<ConvergenceRecord> run_convergence(const Config& cfg, const ManufacturedCase<T, Dim>& mc,
                                               const std::string& solver, const std::vector<int>& N_list) {
  if (N_list.empty()) throw ValidationError("N_list must not be empty");
  for (std::size_t i = 1; i < N_list.size(); ++i) {
    if (N_list[i] <= N_list[i - 1]) throw ValidationError("N_list must be strictly increasing");
  }
  if (cfg.eval_points() < 10) throw ValidationError("eval_grid must be >= 10");
  std::vector<ConvergenceRecord> out;
  for (int N : N_list) out.push_back(run_single(cfg, mc, solver, N));
  const bool any = std::any_of(out.begin(), out.end(), [](const auto& r) { return r.status != "failed"; });
  if (!any) throw SolverError("every N in the sweep failed; first failure: " + out.front().message);
  return out;
}

template <typename T, int Dim>
Comparison compare_solvers(const Config& cfg, const ManufacturedCase<T, Dim>& mc, int N) {
  Comparison c;
  Expansion<T, Dim> ud, un;
  c.dlm = run_single(cfg, mc, "dlm", N, &ud);
  c.newton = run_single(cfg, mc, "newton", N, &un);
  if (c.dlm.status != "failed" && c.newton.status != "failed") {
    using std::abs;
    T worst(0);
    for (const auto& x : evaluation_grid(mc.problem.domain, cfg.eval_points())) {
      worst = std::max(worst, T(abs(ud.value(x) - un.value(x))));
    }
    c.u_difference = to_double(worst);
  }
  return c;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "case,solver,kernel,N,mode,max_error_u,l2_error_u,consistency_residual,condition_estimate,iterations,wall_time_ms";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_csv(std::vector<ConvergenceRecord> records) {
  if (records.empty()) throw ValidationError("no records to write");
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.case_name, a.solver, a.N) < std::tie(b.case_name, b.solver, b.N);
  });
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.case_name << ',' << r.solver << ',' << r.kernel << ',' << r.N << ',' << r.mode << ','
       << format_double(r.max_error_u) << ',' << format_double(r.l2_error_u) << ','
       << format_double(r.consistency_residual) << ',' << format_double(r.condition_estimate) << ',' << r.iterations
       << ',' << format_double(r.wall_time_ms) << '\n';
  }
  return os.str();
}

inline void emit_csv(const std::vector<ConvergenceRecord>& records, const std::string& path) {
  const std::string text = format_csv(records);
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV to '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw Error("failed while writing CSV to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Precision / dimension dispatch

/// Calls f(std::type_identity<T>{}, std::integral_constant<int, Dim>{}) for the
/// scalar type and dimension the config selects.
template <typename F>
decltype(auto) dispatch(const Config& cfg, F&& f) {
  const bool q = cfg.precision == "quad";
  switch (cfg.dim()) {
    case 1:
      return q ? f(std::type_identity<quad>{}, std::integral_constant<int, 1>{})
               : f(std::type_identity<double>{}, std::integral_constant<int, 1>{});
    case 2:
      return q ? f(std::type_identity<quad>{}, std::integral_constant<int, 2>{})
               : f(std::type_identity<double>{}, std::integral_constant<int, 2>{});
    default: throw ValidationError("only 1D and 2D problems are supported");
  }
}

}  // namespace dlm::bench
