#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ccdist/optimize.hpp"

using namespace ccdist;

namespace {
double rosenbrock(const VecX& x, VecX* g) {
  double f = 0.0;
  if (g) g->setZero(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i), b = 1.0 - x(i);
    f += 100.0 * a * a + b * b;
    if (g) {
      (*g)(i) += -400.0 * a * x(i) - 2.0 * b;
      (*g)(i + 1) += 200.0 * a;
    }
  }
  return f;
}
}  // namespace

TEST(Optimize, LbfgsSolvesRosenbrock) {
  VecX x0 = VecX::Constant(6, -1.2);
  const auto r = minimize_lbfgs(rosenbrock, x0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - VecX::Ones(6)).norm(), 1e-6);
}

TEST(Optimize, LbfgsRespectsInfeasibleRegion) {
  // Minimum of (x-2)^2 restricted to x < 1 by +inf.
  const auto obj = [](const VecX& x, VecX* g) -> double {
    if (x(0) >= 1.0) return std::numeric_limits<double>::infinity();
    if (g) *g = VecX::Constant(1, 2.0 * (x(0) - 2.0));
    return (x(0) - 2.0) * (x(0) - 2.0);
  };
  const auto r = minimize_lbfgs(obj, VecX::Zero(1));
  EXPECT_LT(r.x(0), 1.0);
  EXPECT_GT(r.x(0), 0.9);
}

TEST(Optimize, SimplexSolvesQuadratic) {
  const auto r = minimize_simplex([](const VecX& x) { return (x - VecX::Constant(3, 0.5)).squaredNorm(); },
                                  VecX::Zero(3));
  EXPECT_LT((r.x - VecX::Constant(3, 0.5)).norm(), 1e-4);
}

TEST(Optimize, GoldenSection) {
  double best = 0.0;
  const double x = golden_section([](double t) { return std::cos(t); }, 2.0, 4.0, 1e-10, &best);
  EXPECT_NEAR(x, M_PI, 1e-6);
  EXPECT_NEAR(best, -1.0, 1e-12);
}
