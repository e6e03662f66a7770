#include "fd_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dlm;
using namespace testing_support;

namespace {

const auto I01 = Domain<1>::interval(0, 1);
const double kInterpolantDefectPin = 0.0033188190509791937;
const double kBurgersErrorPin = 3.8351760973881664e-07;

ProblemSpec<double, 1> square_problem(double f_value) {
  return {LinearOperator::identity(), LinearOperator::identity(), LinearOperator::d(0, 2),
          [f_value](const Point<1>&) { return f_value; }, [](const Point<1>&) { return 0.0; }, nullptr, I01,
          BoundaryPartition::all_dirichlet(I01)};
}

template <typename T, int Dim>
Matrix<T> fd_jacobian(const CollocationBasis<T, Dim>& cb, const Vector<T>& a, double step) {
  Matrix<T> J(cb.size(), cb.size());
  for (int k = 0; k < cb.size(); ++k) {
    Vector<T> ap = a, am = a;
    ap[k] += T(step);
    am[k] -= T(step);
    J.col(k) = (residual(cb, ap) - residual(cb, am)) / T(2 * step);
  }
  return J;
}

template <typename T, int Dim>
void expect_jacobian_matches_fd(const CollocationBasis<T, Dim>& cb, int trials, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < trials; ++t) {
    Vector<T> a(cb.size());
    for (auto& e : a) e = T(U(rng));
    const Matrix<T> J = jacobian(cb, a);
    const Matrix<T> Jfd = fd_jacobian(cb, a, 1e-6);
    const double scale = std::max(1.0, to_double(J.cwiseAbs().maxCoeff()));
    EXPECT_LE(to_double((J - Jfd).cwiseAbs().maxCoeff()), 1e-5 * scale) << "trial " << t;
  }
}

// B2 at N = 17 with MQ c = 1 needs quad: in double the Jacobian is singular to working precision.
NewtonSolution<quad, 1> b2_newton(const bench::ManufacturedCase<quad, 1>& mc) {
  return newton_solve(mc.problem, multiquadric<quad>(1.0), points_for(mc, 17));
}

}  // namespace

TEST(NewtonConfig, Validation) {
  NewtonConfig<double, 1> c;
  EXPECT_NO_THROW(c.validate());
  c.max_iterations = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.residual_tolerance = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.initial_guess = InitialGuess::Field;
  EXPECT_THROW(c.validate(), ValidationError);
  auto mc = bench::case_b1<double>();
  NewtonConfig<double, 1> bad;
  bad.max_iterations = 0;
  EXPECT_THROW(newton_solve(mc.problem, multiquadric<double>(0.3), points_for(mc, 9), bad), ValidationError);
}

TEST(Residual, ZeroDataGivesZero) {
  const auto pts = points_for(I01, BoundaryPartition::all_dirichlet(I01), 5);
  const auto F = assemble_residual(square_problem(0.0), Vector<double>(Vector<double>::Zero(5)), multiquadric<double>(0.5), pts);
  EXPECT_EQ(F, Vector<double>(Vector<double>::Zero(5)));
}

TEST(Residual, UnitSourceGivesMinusOneOnInteriorRows) {
  const auto pts = points_for(I01, BoundaryPartition::all_dirichlet(I01), 5);
  const auto F = assemble_residual(square_problem(1.0), Vector<double>(Vector<double>::Zero(5)), multiquadric<double>(0.5), pts);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(F[i], -1.0);
  EXPECT_EQ(F[3], 0.0);
  EXPECT_EQ(F[4], 0.0);
}

TEST(Residual, InterpolantOfExactFieldRegression) {
  // Defect of the MQ (c = 0.5) interpolant of sin(pi x) under the B2 operator at N = 17,
  // pinned at first computation and recomputed here from the interpolant directly.
  auto mc = bench::case_b2<double>(1.0);
  const auto pts = points_for(mc, 17);
  const auto k = multiquadric<double>(0.5);
  const Vector<double> a = interpolate<double, 1>(k, pts.set_u(), mc.u_exact);
  const auto F = assemble_residual(mc.problem, a, k, pts);
  const Expansion<double, 1> u{k, pts.set_u(), a, {}};
  double direct = 0;
  for (const auto& x : pts.interior_u) {
    const auto j = u.jet(x, 2);
    direct = std::max(direct, std::abs(j.value * j.grad[0] + j.hess(0, 0) - mc.problem.f(x)));
  }
  EXPECT_NEAR(F.lpNorm<Eigen::Infinity>(), direct, 1e-9 * direct);
  EXPECT_NEAR(F.lpNorm<Eigen::Infinity>(), kInterpolantDefectPin, 1e-6 * kInterpolantDefectPin);
}

TEST(Jacobian, ProductRuleForSquareTerm) {
  const auto pts = points_for(I01, BoundaryPartition::all_dirichlet(I01), 6);
  const auto k = multiquadric<double>(0.4);
  const auto pr = square_problem(0.0);
  Vector<double> a(6);
  a << 0.3, -0.1, 0.7, 0.2, -0.5, 0.05;
  const auto J = assemble_jacobian(pr, a, k, pts);
  const auto centers = pts.set_u();
  const Expansion<double, 1> u{k, centers, a, {}};
  for (int i = 0; i < 4; ++i) {
    const auto& x = pts.interior_u[i];
    for (int c = 0; c < 6; ++c) {
      const auto phi = kernel_jet<double, 1>(k, centers[c], x, 2);
      EXPECT_NEAR(J(i, c), 2 * u.value(x) * phi.value + phi.hess(0, 0), 1e-12);
    }
  }
  // Zero coefficients: interior rows reduce to the collocation matrix of R alone.
  const auto J0 = assemble_jacobian(pr, Vector<double>(Vector<double>::Zero(6)), k, pts);
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 6; ++c) {
      EXPECT_EQ(J0(i, c), (apply_to_kernel<double, 1>(LinearOperator::d(0, 2), k, centers[c], pts.interior_u[i])));
    }
  }
}

TEST(Jacobian, MatchesFiniteDifferencesSmall) {
  const auto pts = points_for(I01, BoundaryPartition::all_dirichlet(I01), 6);
  expect_jacobian_matches_fd(build_basis(square_problem(1.0), multiquadric<double>(0.4), pts), 10, 1);
}

TEST(Jacobian, MatchesFiniteDifferencesOnBenchmarks) {
  {
    auto mc = bench::case_b1<double>();
    expect_jacobian_matches_fd(build_basis(mc.problem, multiquadric<double>(0.3), points_for(mc, 9)), 10, 2);
  }
  {
    auto mc = bench::case_b2<double>();
    expect_jacobian_matches_fd(build_basis(mc.problem, multiquadric<double>(0.3), points_for(mc, 17)), 10, 3);
  }
  {
    auto mc = bench::case_b3<double>();
    expect_jacobian_matches_fd(build_basis(mc.problem, multiquadric<double>(0.3), points_for(mc, 12)), 10, 4);
  }
}

TEST(Newton, LinearProblemTakesOneIteration) {
  auto mc = bench::case_b1<double>();
  const auto pts = points_for(mc, 9);
  const auto k = multiquadric<double>(0.3);
  const auto s = newton_solve(mc.problem, k, pts);
  EXPECT_TRUE(s.report.converged);
  EXPECT_EQ(s.report.iterations, 1);
  NewtonConfig<double, 1> c;
  c.initial_guess = InitialGuess::Field;
  c.guess_field = [](const Point<1>& x) { return std::cos(3 * x[0]) + 4; };
  const auto s2 = newton_solve(mc.problem, k, pts, c);
  EXPECT_TRUE(s2.report.converged);
  EXPECT_EQ(s2.report.iterations, 1);
}

TEST(Newton, BurgersCaseConverges) {
  auto mc = bench::case_b2<quad>(1.0);
  const auto s = b2_newton(mc);
  EXPECT_TRUE(s.report.converged);
  EXPECT_GE(s.report.iterations, 2);
  EXPECT_LE(s.report.iterations, 15);
  EXPECT_LE(s.report.residual_history.back(), 1e-10);
  EXPECT_EQ(s.report.factorizations, s.report.iterations);
  const double err = max_error(s.u, mc.u_exact, line_grid(101));
  EXPECT_NEAR(err, kBurgersErrorPin, 1e-3 * kBurgersErrorPin);

  // Damped and converged: the residual never increases.
  const auto& h = s.report.residual_history;
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);

  // Local quadratic convergence: r_{k+1} <= C r_k^2 over the last three steps, C finite.
  ASSERT_GE(h.size(), 4u);
  double C = 0;
  for (std::size_t i = h.size() - 3; i + 1 < h.size(); ++i) C = std::max(C, h[i + 1] / (h[i] * h[i]));
  EXPECT_TRUE(std::isfinite(C));
  EXPECT_LT(C, 1.0);
}

TEST(Newton, BurgersCaseAgreesWithFiniteDifferences) {
  auto mc = bench::case_b2<quad>(1.0);
  const auto s = b2_newton(mc);
  auto f = [&](double x) { return to_double(mc.problem.f(Point<1>(x))); };
  const auto fd = fd_oracle::solve_burgers(1.0, 16, f, 0.0, 0.0);
  double fd_err = 0, gap = 0;
  for (std::size_t i = 0; i < fd.x.size(); ++i) {
    fd_err = std::max(fd_err, std::abs(fd.u[i] - std::sin(M_PI * fd.x[i])));
    gap = std::max(gap, std::abs(fd.u[i] - to_double(s.u.value(Point<1>(fd.x[i])))));
  }
  const double err = max_error(s.u, mc.u_exact, line_grid(101));
  EXPECT_GT(fd_err, 0.0);
  EXPECT_LE(err, 10 * fd_err);
  EXPECT_LE(gap, 10 * fd_err);
}

TEST(Newton, SingularJacobianCarriesIteration) {
  auto mc = bench::case_b2<double>(1.0);
  try {
    newton_solve(mc.problem, multiquadric<double>(1.0), points_for(mc, 17));
    FAIL() << "expected a singular Jacobian in double";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.iteration(), 1);
  }
}

TEST(Newton, DivergenceWithoutDamping) {
  // u^2 + u'' = -100 with zero ends has no solution the iteration can reach.
  const auto pts = points_for(I01, BoundaryPartition::all_dirichlet(I01), 9);
  NewtonConfig<double, 1> c;
  c.damping = Damping::None;
  try {
    newton_solve(square_problem(-100.0), multiquadric<double>(0.2), pts, c);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.iteration(), 5);
  }
  // With damping the same problem stalls and the report says so.
  const auto s = newton_solve(square_problem(-100.0), multiquadric<double>(0.2), pts);
  EXPECT_FALSE(s.report.converged);
  EXPECT_EQ(s.report.iterations, 50);
}

TEST(Newton, Deterministic) {
  auto mc = bench::case_b3<double>();
  const auto pts = points_for(mc, 21);
  const auto k = multiquadric<double>(2 * pts.characteristic_spacing());
  const auto a = newton_solve(mc.problem, k, pts);
  const auto b = newton_solve(mc.problem, k, pts);
  EXPECT_EQ(a.report.coefficients, b.report.coefficients);
  EXPECT_EQ(a.report.residual_history, b.report.residual_history);
  EXPECT_TRUE(a.report.converged);
}

TEST(LinearCollocation, ReproducesQuadraticOnB1) {
  auto mc = bench::case_b1<quad>();
  const auto pts = points_for(mc, 9);
  const auto u = linear_collocation(mc.problem, multiquadric<quad>(48 * pts.characteristic_spacing()), pts);
  EXPECT_LE(max_error(u, mc.u_exact, line_grid(101)), 1e-8);
}
