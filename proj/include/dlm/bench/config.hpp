#pragma once

// Run configuration (JSON). Schema is documented in README.md; every committed
// example lives in configs/.

#include "dlm/errors.hpp"
#include "dlm/geometry.hpp"
#include "dlm/linear_operator.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dlm::bench {

using nlohmann::json;

struct KernelSpec {
  std::string family = "mq";
  double c = 1.0;
  double epsilon = 1.0;
  int m = 1;
  int n = 1;
  int s = 0;
  int k = 3;
  int order = 1;
  double f = 1.0;  // eak source weight
  /// Fundamental-solution selectors: "" derives from the problem, "none" is the factor 1.
  std::string base;
  std::string p_base;
  std::string q_base;
  /// Operators for the composed kernel; "" takes the problem's p / q.
  std::string p_op;
  std::string q_op;
  std::string style = "eak";  // single kernels
  /// "absolute" or "spacing": with "spacing", c is multiplied and epsilon divided by the point spacing.
  std::string scale = "absolute";

  bool operator==(const KernelSpec&) const = default;
};

struct NewtonSpec {
  int max_iterations = 50;
  double tolerance = 1e-10;
  double step_tolerance = 1e-12;
  std::string damping = "backtracking";
  std::string initial_guess = "zeros";
  KernelSpec kernel;

  bool operator==(const NewtonSpec&) const = default;
};

struct Config {
  std::string case_name = "B1";  // B1, B2, B3 or custom
  double lambda = 1.0;           // nonlinearity scale for B2 / B3

  // custom problems
  std::string p;
  std::string q;
  std::string R;
  std::string exact;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> dirichlet;
  std::vector<std::string> neumann;

  std::string solver = "dlm";  // dlm or newton
  std::string mode = "square";  // square or least_squares
  int extra_points = 0;
  std::string v_boundary = "exact";  // exact or governing
  bool polynomial_tail = false;
  KernelSpec psi_u;
  KernelSpec psi_v{"gaussian", 1.0, 10.0, 1, 1, 0, 3, 1, 1.0, "", "", "", "", "", "eak", "spacing"};
  NewtonSpec newton;

  int N = 9;
  std::vector<int> N_list = {5, 9, 17};
  std::string points = "equispaced";  // equispaced or halton
  double stagger_offset = 0.5;
  std::string precision = "double";  // double or quad
  int eval_grid = 0;                 // points per axis; 0 selects 101 (1D) or 21 (2D)
  std::string timing = "solve";      // solve or total
  std::string output;

  bool operator==(const Config&) const = default;

  int dim() const {
    if (case_name == "B1" || case_name == "B2") return 1;
    if (case_name == "B3") return 2;
    return static_cast<int>(lower.size());
  }

  int eval_points() const { return eval_grid > 0 ? eval_grid : (dim() == 1 ? 101 : 21); }

  void validate() const {
    auto one_of = [](const std::string& v, std::initializer_list<const char*> allowed, const char* what) {
      for (const char* a : allowed) {
        if (v == a) return;
      }
      throw ValidationError(std::string("invalid ") + what + " '" + v + "'");
    };
    one_of(case_name, {"B1", "B2", "B3", "custom"}, "case");
    one_of(solver, {"dlm", "newton"}, "solver");
    one_of(mode, {"square", "least_squares"}, "mode");
    one_of(v_boundary, {"exact", "governing"}, "v_boundary");
    one_of(points, {"equispaced", "halton"}, "points");
    one_of(precision, {"double", "quad"}, "precision");
    one_of(timing, {"solve", "total"}, "timing");
    one_of(newton.damping, {"none", "backtracking"}, "newton.damping");
    one_of(newton.initial_guess, {"zeros", "exact"}, "newton.initial_guess");
    for (const auto* k : {&psi_u, &psi_v, &newton.kernel}) one_of(k->scale, {"absolute", "spacing"}, "kernel scale");
    if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
    if (!(stagger_offset > 0 && stagger_offset < 1)) throw ValidationError("stagger_offset must lie in (0, 1)");
    if (eval_grid != 0 && eval_grid < 10) throw ValidationError("eval_grid must be >= 10");
    if (mode == "least_squares" && extra_points < 1) throw ValidationError("least_squares mode needs extra_points >= 1");
    if (mode == "square" && extra_points != 0) throw ValidationError("extra_points requires least_squares mode");
    if (N_list.empty()) throw ValidationError("N_list must not be empty");
    for (std::size_t i = 1; i < N_list.size(); ++i) {
      if (N_list[i] <= N_list[i - 1]) throw ValidationError("N_list must be strictly increasing");
    }
    if (newton.max_iterations < 1) throw ValidationError("newton.max_iterations must be >= 1");
    if (!(newton.tolerance > 0) || !(newton.step_tolerance > 0)) throw ValidationError("Newton tolerances must be positive");
    if (case_name == "custom") {
      if (lower.size() != upper.size() || (lower.size() != 1 && lower.size() != 2)) {
        throw ValidationError("custom domains need lower/upper of equal length 1 or 2");
      }
      if (R.empty() || exact.empty()) throw ValidationError("custom problems need R and exact");
      for (const auto& s : {p, q, R}) {
        if (!s.empty()) LinearOperator::parse(s);
      }
      for (const auto& f : dirichlet) face_from_string(f);
      for (const auto& f : neumann) face_from_string(f);
    }
  }
};

inline void to_json(json& j, const KernelSpec& k) {
  j = json{{"family", k.family}, {"c", k.c},       {"epsilon", k.epsilon}, {"m", k.m},         {"n", k.n},
           {"s", k.s},           {"k", k.k},       {"order", k.order},     {"f", k.f},         {"base", k.base},
           {"p_base", k.p_base}, {"q_base", k.q_base}, {"p_op", k.p_op}, {"q_op", k.q_op}, {"style", k.style},
           {"scale", k.scale}};
}

inline void to_json(json& j, const NewtonSpec& n) {
  j = json{{"max_iterations", n.max_iterations}, {"tolerance", n.tolerance}, {"step_tolerance", n.step_tolerance},
           {"damping", n.damping}, {"initial_guess", n.initial_guess}, {"kernel", n.kernel}};
}

inline void to_json(json& j, const Config& c) {
  j = json{{"case", c.case_name},
           {"lambda", c.lambda},
           {"p", c.p},
           {"q", c.q},
           {"R", c.R},
           {"exact", c.exact},
           {"lower", c.lower},
           {"upper", c.upper},
           {"dirichlet", c.dirichlet},
           {"neumann", c.neumann},
           {"solver", c.solver},
           {"mode", c.mode},
           {"extra_points", c.extra_points},
           {"v_boundary", c.v_boundary},
           {"polynomial_tail", c.polynomial_tail},
           {"psi_u", c.psi_u},
           {"psi_v", c.psi_v},
           {"newton", c.newton},
           {"N", c.N},
           {"N_list", c.N_list},
           {"points", c.points},
           {"stagger_offset", c.stagger_offset},
           {"precision", c.precision},
           {"eval_grid", c.eval_grid},
           {"timing", c.timing},
           {"output", c.output}};
}

namespace detail {

/// Reads optional keys into `out`, rejecting keys it does not know.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ValidationError(where_ + " must be a JSON object");
  }

  template <typename V>
  void get(const char* key, V& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<V>();
    } catch (const json::exception& e) {
      throw ValidationError(where_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ValidationError("unknown key '" + k + "' in " + where_);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline KernelSpec kernel_from_json(const json& j, const std::string& where, KernelSpec k = {}) {
  Reader r(j, where);
  r.get("family", k.family);
  r.get("c", k.c);
  r.get("epsilon", k.epsilon);
  r.get("m", k.m);
  r.get("n", k.n);
  r.get("s", k.s);
  r.get("k", k.k);
  r.get("order", k.order);
  r.get("f", k.f);
  r.get("base", k.base);
  r.get("p_base", k.p_base);
  r.get("q_base", k.q_base);
  r.get("p_op", k.p_op);
  r.get("q_op", k.q_op);
  r.get("style", k.style);
  r.get("scale", k.scale);
  r.finish();
  return k;
}

}  // namespace detail

inline Config config_from_json(const json& j) {
  Config c;
  detail::Reader r(j, "config");
  r.get("case", c.case_name);
  r.get("lambda", c.lambda);
  r.get("p", c.p);
  r.get("q", c.q);
  r.get("R", c.R);
  r.get("exact", c.exact);
  r.get("lower", c.lower);
  r.get("upper", c.upper);
  r.get("dirichlet", c.dirichlet);
  r.get("neumann", c.neumann);
  r.get("solver", c.solver);
  r.get("mode", c.mode);
  r.get("extra_points", c.extra_points);
  r.get("v_boundary", c.v_boundary);
  r.get("polynomial_tail", c.polynomial_tail);
  json psi_u, psi_v, newton;
  r.get("psi_u", psi_u);
  r.get("psi_v", psi_v);
  r.get("newton", newton);
  r.get("N", c.N);
  r.get("N_list", c.N_list);
  r.get("points", c.points);
  r.get("stagger_offset", c.stagger_offset);
  r.get("precision", c.precision);
  r.get("eval_grid", c.eval_grid);
  r.get("timing", c.timing);
  r.get("output", c.output);
  r.finish();
  if (!psi_u.is_null()) c.psi_u = detail::kernel_from_json(psi_u, "psi_u", c.psi_u);
  if (!psi_v.is_null()) c.psi_v = detail::kernel_from_json(psi_v, "psi_v", c.psi_v);
  if (!newton.is_null()) {
    detail::Reader nr(newton, "newton");
    nr.get("max_iterations", c.newton.max_iterations);
    nr.get("tolerance", c.newton.tolerance);
    nr.get("step_tolerance", c.newton.step_tolerance);
    nr.get("damping", c.newton.damping);
    nr.get("initial_guess", c.newton.initial_guess);
    json nk;
    nr.get("kernel", nk);
    nr.finish();
    if (!nk.is_null()) c.newton.kernel = detail::kernel_from_json(nk, "newton.kernel", c.newton.kernel);
  }
  c.validate();
  return c;
}

inline std::string serialize(const Config& c) { return json(c).dump(2); }

inline Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace dlm::bench
