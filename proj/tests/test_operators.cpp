#include "dlm/operators.hpp"
#include "operator_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dlm;
using namespace operator_oracle;

TEST(ApplyToKernel, Examples) {
  const auto r2 = radial_power<double>(2);
  EXPECT_DOUBLE_EQ((apply_to_kernel<double, 2>(LinearOperator::laplacian(), r2, Point<2>(0.1, 0.2), Point<2>(0.7, -0.4))), 4.0);
  EXPECT_DOUBLE_EQ((apply_to_kernel<double, 2>(LinearOperator::laplacian(), r2, Point<2>(0.1, 0.2), Point<2>(0.1, 0.2))), 4.0);
  const auto mq = multiquadric<double>(1.0);
  EXPECT_EQ((apply_to_kernel<double, 2>(LinearOperator::d(0, 1), mq, Point<2>(0.3, 0.3), Point<2>(0.3, 0.3))), 0.0);

  // r^4 in 2D at r = 0.5: 16 r^2 = 4, cross-checked with central differences at h = 1e-4.
  const auto r4 = radial_power<double>(4);
  const Point<2> c(0, 0), x(0.3, 0.4);
  const double an = apply_to_kernel<double, 2>(LinearOperator::laplacian(), r4, c, x);
  EXPECT_NEAR(an, 4.0, 1e-13);
  EXPECT_NEAR(fd_apply<2>(LinearOperator::laplacian(), r4, c, x, nullptr, 1e-4), 4.0, 1e-6);
}

TEST(ApplyToKernel, SingularCasesRaise) {
  const auto cone = fundamental_solution<double>(FsKind::Laplace1D, 1);
  EXPECT_THROW((apply_to_kernel<double, 1>(LinearOperator::d(0, 1), cone, Point<1>(0.5), Point<1>(0.5))), SingularityError);
  const auto ln = fundamental_solution<double>(FsKind::Laplace2D, 1);
  EXPECT_THROW((apply_to_kernel<double, 2>(LinearOperator::identity(), ln, Point<2>(0, 0), Point<2>(0, 0))), SingularityError);
  const auto tps = thin_plate_spline<double>(1);
  EXPECT_NO_THROW((apply_to_kernel<double, 2>(LinearOperator::d(0, 1), tps, Point<2>(0, 0), Point<2>(0, 0))));
  EXPECT_THROW((apply_to_kernel<double, 2>(LinearOperator::laplacian(), tps, Point<2>(0, 0), Point<2>(0, 0))), SingularityError);
  EXPECT_THROW((apply_to_kernel<double, 1>(LinearOperator::d(1, 1), cone, Point<1>(0.5), Point<1>(0.2))), ValidationError);
  EXPECT_THROW((apply_to_kernel<double, 2>(LinearOperator::normal_derivative(), cone, Point<2>(0, 0), Point<2>(1, 0))), ValidationError);
}

TEST(ApplyToKernel, OriginLimitOfLaplacianIsDimTimesSecondDerivative) {
  const auto g = gaussian<double>(2.0);  // phi''(0) = -2 eps^2 = -8
  EXPECT_NEAR((apply_to_kernel<double, 2>(LinearOperator::laplacian(), g, Point<2>(0.2, 0.1), Point<2>(0.2, 0.1))), -16.0, 1e-13);
  EXPECT_NEAR((apply_to_kernel<double, 1>(LinearOperator::laplacian(), g, Point<1>(0.2), Point<1>(0.2))), -8.0, 1e-13);
}

// Every catalogued operator on every kernel family against central differences.
TEST(ApplyToKernel, MatchesFiniteDifferences2D) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double h = 1e-4 * std::sqrt(8.0);  // scaled by the diameter of [-1, 1]^2
  for (const auto& k : catalogue(2)) {
    for (const auto& op : operators_2d()) {
      int done = 0;
      while (done < 20) {
        const Point<2> c(U(rng), U(rng));
        const Point<2> x(U(rng), U(rng));
        if ((x - c).norm() <= 0.1) continue;
        Point<2> n(U(rng), U(rng));
        n.normalize();
        const double an = apply_to_kernel<double, 2>(op, k, c, x, &n);
        const double fd = fd_apply<2>(op, k, c, x, &n, h);
        EXPECT_TRUE(close(an, fd, 1e-5, 1.0)) << k.describe() << " " << op.to_string() << " analytic " << an << " fd " << fd;
        ++done;
      }
    }
  }
}

TEST(ApplyToKernel, MatchesFiniteDifferences1D) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<LinearOperator> ops = {LinearOperator::identity(), LinearOperator::d(0, 1), LinearOperator::d(0, 2),
                                           LinearOperator::laplacian(), LinearOperator::normal_derivative()};
  for (const auto& k : catalogue(1)) {
    for (const auto& op : ops) {
      int done = 0;
      while (done < 20) {
        const Point<1> c(U(rng)), x(U(rng));
        if ((x - c).norm() <= 0.1) continue;
        const Point<1> n(U(rng) < 0.5 ? -1.0 : 1.0);
        const double an = apply_to_kernel<double, 1>(op, k, c, x, &n);
        const double fd = fd_apply<1>(op, k, c, x, &n, 1e-4);
        EXPECT_TRUE(close(an, fd, 1e-5, 1.0)) << k.describe() << " " << op.to_string() << " analytic " << an << " fd " << fd;
        ++done;
      }
    }
  }
}

TEST(ApplyToKernel, Linearity) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto ops = operators_2d();
  for (const auto& k : catalogue(2)) {
    for (int trial = 0; trial < 10; ++trial) {
      const Point<2> c(U(rng), U(rng)), x(U(rng), U(rng));
      const Point<2> n(0.6, 0.8);
      const auto& o1 = ops[trial % ops.size()];
      const auto& o2 = ops[(trial * 3 + 1) % ops.size()];
      const double a = U(rng), b = U(rng);
      const double lhs = apply_to_kernel<double, 2>(a * o1 + b * o2, k, c, x, &n);
      const double rhs = a * apply_to_kernel<double, 2>(o1, k, c, x, &n) + b * apply_to_kernel<double, 2>(o2, k, c, x, &n);
      EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(rhs))) << k.describe();
    }
  }
}

TEST(ApplyProduct, Examples) {
  FieldJet<double, 1> three;
  three.value = 3;
  EXPECT_DOUBLE_EQ((apply_product_to_field<double, 1>(LinearOperator::identity(), LinearOperator::identity(), three)), 9.0);

  FieldJet<double, 1> sq;  // x^2 at x = 2
  sq.value = 4;
  sq.grad[0] = 4;
  sq.hess(0, 0) = 2;
  EXPECT_DOUBLE_EQ((apply_product_to_field<double, 1>(LinearOperator::identity(), LinearOperator::d(0, 1), sq)), 16.0);

  FieldJet<double, 2> bowl;  // x^2 + y^2 at (1, 1)
  bowl.value = 2;
  bowl.grad << 2, 2;
  bowl.hess << 2, 0, 0, 2;
  EXPECT_DOUBLE_EQ((apply_product_to_field<double, 2>(LinearOperator::laplacian(), LinearOperator::identity(), bowl)), 8.0);
}

TEST(ApplyProduct, CommutesAndNeedsDerivatives) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const auto ops = operators_2d();
  const Point<2> n(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    FieldJet<double, 2> u;
    u.value = U(rng);
    u.grad << U(rng), U(rng);
    u.hess << U(rng), U(rng), U(rng), U(rng);
    const auto& p = ops[t % ops.size()];
    const auto& q = ops[(t * 5 + 2) % ops.size()];
    EXPECT_EQ((apply_product_to_field<double, 2>(p, q, u, &n)), (apply_product_to_field<double, 2>(q, p, u, &n)));
  }
  FieldJet<double, 1> only_value;
  only_value.order = 0;
  EXPECT_THROW((apply_product_to_field<double, 1>(LinearOperator::identity(), LinearOperator::d(0, 1), only_value)), ValidationError);
}

TEST(LinearOperatorText, RoundTripAndErrors) {
  for (const char* s : {"I", "0*I", "0.01*I", "Dx", "Dxx", "Dyy + 2*Dx", "lap", "dn", "1e-05*I + -3*Dy", "-Dxx"}) {
    const auto op = LinearOperator::parse(s);
    EXPECT_EQ(LinearOperator::parse(op.to_string()), op) << s;
  }
  EXPECT_EQ(LinearOperator::parse("1e+2*I").terms()[0].coef, 100.0);
  EXPECT_EQ(LinearOperator::parse("Dxx").order(), 2);
  EXPECT_THROW(LinearOperator::parse("Dxxx"), ValidationError);
  EXPECT_THROW(LinearOperator::parse(""), ValidationError);
  EXPECT_THROW(LinearOperator::parse("abc*I"), ValidationError);
  EXPECT_THROW(LinearOperator::d(0, 3), ValidationError);
  EXPECT_THROW(LinearOperator::scale(std::nan("")), ValidationError);
}

TEST(ProblemSpecValidation, RejectsZeroOrderR) {
  ProblemSpec<double, 1> ps{LinearOperator::identity(), LinearOperator::identity(), LinearOperator::scale(2.0),
                            [](const Point<1>&) { return 0.0; }, [](const Point<1>&) { return 0.0; }, nullptr,
                            Domain<1>::interval(0, 1), BoundaryPartition::all_dirichlet(Domain<1>::interval(0, 1))};
  EXPECT_THROW(ps.validate(), ValidationError);
  ps.R = LinearOperator::d(0, 2);
  EXPECT_NO_THROW(ps.validate());
  ps.p = LinearOperator::d(1, 1);
  EXPECT_THROW(ps.validate(), ValidationError);
}
