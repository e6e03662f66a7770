#pragma once

// Command-line front end: solve, converge, compare, kernels.
// Exit codes: 0 success, 1 validation / usage, 2 solver failure.

#include "dlm/bench/config.hpp"
#include "dlm/bench/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace dlm::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitSolver = 2;

namespace detail {

struct Overrides {
  std::string config_path;
  std::string out;
  std::optional<int> n;
  std::optional<double> c;
  std::optional<std::string> mode;
  std::optional<std::string> solver;
  std::optional<std::string> precision;
  std::optional<long> seed;  // reserved; all point strategies are deterministic
};

inline void add_run_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON config file")->required();
  sub->add_option("--out", o.out, "CSV output path (default: config output, else stdout)");
  sub->add_option("--n", o.n, "Center count N (converge: a one-entry sweep)");
  sub->add_option("--c", o.c, "Shape parameter for psi_u and the Newton kernel");
  sub->add_option("--mode", o.mode, "square or least_squares");
  sub->add_option("--solver", o.solver, "dlm or newton");
  sub->add_option("--precision", o.precision, "double or quad");
  sub->add_option("--seed", o.seed, "Reserved; currently ignored");
}

inline Config load_with_overrides(const Overrides& o, bool sweep) {
  Config cfg = load_config(o.config_path);
  if (o.n) {
    cfg.N = *o.n;
    if (sweep) cfg.N_list = {*o.n};
  }
  if (o.c) {
    cfg.psi_u.c = *o.c;
    cfg.newton.kernel.c = *o.c;
  }
  if (o.mode) cfg.mode = *o.mode;
  if (o.solver) cfg.solver = *o.solver;
  if (o.precision) cfg.precision = *o.precision;
  if (!o.out.empty()) cfg.output = o.out;
  cfg.validate();
  return cfg;
}

inline void write_csv(const std::vector<ConvergenceRecord>& recs, const Config& cfg, std::ostream& out) {
  if (cfg.output.empty()) {
    out << format_csv(recs);
  } else {
    emit_csv(recs, cfg.output);
  }
}

/// Reports non-ok records on `err`; returns the exit code they imply.
inline int report_status(const std::vector<ConvergenceRecord>& recs, std::ostream& err) {
  int code = kExitOk;
  for (const auto& r : recs) {
    if (r.ok()) continue;
    err << "error: " << r.case_name << " " << r.solver << " N=" << r.N << " " << r.status << ": " << r.message << '\n';
    code = kExitSolver;
  }
  return code;
}

inline void print_record(const ConvergenceRecord& r, std::ostream& out) {
  out << "case: " << r.case_name << '\n'
      << "solver: " << r.solver << '\n'
      << "kernel: " << r.kernel << '\n'
      << "N: " << r.N << '\n'
      << "mode: " << r.mode << '\n'
      << "status: " << r.status << '\n'
      << "max_error_u: " << format_double(r.max_error_u) << '\n'
      << "l2_error_u: " << format_double(r.l2_error_u) << '\n'
      << "consistency_residual: " << format_double(r.consistency_residual) << '\n'
      << "condition_estimate: " << format_double(r.condition_estimate) << '\n'
      << "iterations: " << r.iterations << '\n'
      << "wall_time_ms: " << format_double(r.wall_time_ms) << '\n';
}

struct KernelArgs {
  std::string family;
  std::string base;
  std::string p_base = "none";
  std::string q_base = "none";
  double c = 1.0;
  double epsilon = 1.0;
  int m = 1;
  int n = 1;
  int k = 3;
  int order = 1;
  double f = 1.0;
  double rmax = 1.0;
  int steps = 10;
  bool v_part = false;
  std::string out;
};

template <typename T>
std::string kernel_table(const KernelArgs& a) {
  if (!(a.rmax > 0) || a.steps < 1) throw ValidationError("--rmax must be positive and --steps at least 1");
  KernelSpec spec;
  spec.family = a.family;
  spec.base = a.base;
  spec.p_base = a.p_base;
  spec.q_base = a.q_base;
  spec.c = a.c;
  spec.epsilon = a.epsilon;
  spec.m = a.m;
  spec.n = a.n;
  spec.k = a.k;
  spec.order = a.order;
  spec.f = a.f;
  const auto role = a.v_part ? KernelRole::V : KernelRole::U;
  const auto kernel = build_kernel<T, 1>(spec, role, nullptr, 0.0);
  std::ostringstream os;
  os << "r,value\n";
  for (int i = 0; i <= a.steps; ++i) {
    const double r = a.rmax * i / a.steps;
    double v;
    try {
      v = to_double(kernel(T(r)));
    } catch (const SingularityError&) {
      v = std::numeric_limits<double>::quiet_NaN();
    }
    os << format_double(r) << ',' << format_double(v) << '\n';
  }
  return os.str();
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Direct linearization and Newton collocation benchmarks", "dlm"};
  app.require_subcommand(1);

  detail::Overrides solve_o, conv_o, cmp_o;
  auto* solve = app.add_subcommand("solve", "Solve one case with one solver and print diagnostics");
  detail::add_run_options(solve, solve_o);
  auto* conv = app.add_subcommand("converge", "Sweep N_list and write a CSV");
  detail::add_run_options(conv, conv_o);
  auto* cmp = app.add_subcommand("compare", "Run DLM and Newton at N and write a CSV");
  detail::add_run_options(cmp, cmp_o);

  detail::KernelArgs ka;
  bool list = false;
  auto* kern = app.add_subcommand("kernels", "List kernel families or tabulate one on a radial grid");
  kern->add_flag("--list", list, "List kernel families");
  kern->add_option("--family", ka.family, "Kernel family");
  kern->add_option("--base", ka.base, "Fundamental solution: laplace1d, laplace2d, laplace3d");
  kern->add_option("--p-base", ka.p_base, "Fundamental solution of p (or none)");
  kern->add_option("--q-base", ka.q_base, "Fundamental solution of q (or none)");
  kern->add_option("--c", ka.c, "Shape parameter");
  kern->add_option("--epsilon", ka.epsilon, "Gaussian epsilon");
  kern->add_option("--m", ka.m, "Augmentation / order m");
  kern->add_option("--n", ka.n, "Augmentation / order n");
  kern->add_option("--k", ka.k, "Polyharmonic / TPS degree");
  kern->add_option("--order", ka.order, "Fundamental-solution order");
  kern->add_option("--f", ka.f, "EAK source weight");
  kern->add_option("--rmax", ka.rmax, "Largest radius");
  kern->add_option("--steps", ka.steps, "Number of radial steps");
  kern->add_flag("--v", ka.v_part, "Tabulate the psi_v member of a pair (hsk, spk)");
  kern->add_option("--out", ka.out, "CSV output path (default stdout)");
  std::optional<long> kseed;
  kern->add_option("--seed", kseed, "Reserved; currently ignored");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (kern->parsed()) {
      if (list || ka.family.empty()) {
        for (const auto& f : kernel_family_names()) out << f << '\n';
        return kExitOk;
      }
      const std::string table = detail::kernel_table<double>(ka);
      if (ka.out.empty()) {
        out << table;
      } else {
        std::ofstream f(ka.out);
        if (!f) throw Error("cannot write CSV to '" + ka.out + "'");
        f << table;
      }
      return kExitOk;
    }

    if (solve->parsed()) {
      const Config cfg = detail::load_with_overrides(solve_o, false);
      return dispatch(cfg, [&](auto t, auto d) {
        using T = typename decltype(t)::type;
        constexpr int Dim = decltype(d)::value;
        const auto mc = make_case<T, Dim>(cfg);
        const auto rec = run_single(cfg, mc, cfg.solver, cfg.N);
        detail::print_record(rec, out);
        if (!solve_o.out.empty()) emit_csv({rec}, solve_o.out);
        return detail::report_status({rec}, err);
      });
    }

    if (conv->parsed()) {
      const Config cfg = detail::load_with_overrides(conv_o, true);
      return dispatch(cfg, [&](auto t, auto d) {
        using T = typename decltype(t)::type;
        constexpr int Dim = decltype(d)::value;
        const auto mc = make_case<T, Dim>(cfg);
        const auto recs = run_convergence(cfg, mc, cfg.solver, cfg.N_list);
        detail::write_csv(recs, cfg, out);
        return detail::report_status(recs, err);
      });
    }

    if (cmp->parsed()) {
      const Config cfg = detail::load_with_overrides(cmp_o, false);
      return dispatch(cfg, [&](auto t, auto d) {
        using T = typename decltype(t)::type;
        constexpr int Dim = decltype(d)::value;
        const auto mc = make_case<T, Dim>(cfg);
        const auto c = compare_solvers(cfg, mc, cfg.N);
        const std::vector<ConvergenceRecord> recs{c.dlm, c.newton};
        detail::write_csv(recs, cfg, out);
        err << "u_difference: " << format_double(c.u_difference) << '\n';
        return detail::report_status(recs, err);
      });
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CatalogueMissError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SingularityError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}

}  // namespace dlm::bench
