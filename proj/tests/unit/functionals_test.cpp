#include <gtest/gtest.h>

#include <cmath>

#include "ccdist/functionals.hpp"
#include "ccdist/rng.hpp"
#include "ccdist/scenarios.hpp"
#include "oracles.hpp"

using namespace ccdist;

TEST(Functionals, EnergyAndLengthOfNonUniformSpeed) {
  const PiecewiseConstantControl u({make_vec({1, 0}), make_vec({0, 3})});
  const auto t = endpoint(Vec::Zero(2), identity_structure(2), u);
  const auto n = VaryingNorm::euclidean(2);
  EXPECT_NEAR(length(t, n), 2.0, 1e-14);
  EXPECT_NEAR(energy(t, n), 3.0, 1e-14);
}

TEST(Functionals, ReparametrizationKeepsCurve) {
  const auto f = heisenberg_horizontal();
  const auto n = VaryingNorm::euclidean(2);
  const PiecewiseConstantControl u({make_vec({2, 0}), make_vec({0, 0.2}), make_vec({-0.5, 1})});
  const auto before = endpoint(Vec::Zero(3), f, u);
  const auto r = reparametrize_constant_speed(Vec::Zero(3), f, u, n, 24);
  EXPECT_LT((r.trajectory.end() - before.end()).norm(), 1e-9);
  EXPECT_NEAR(length(r.trajectory, n), length(before, n), 1e-6);
  EXPECT_LE(energy(r.trajectory, n), energy(before, n));
  EXPECT_NEAR(energy(r.trajectory, n), length(r.trajectory, n), 1e-6);
}

TEST(Functionals, ReparametrizationOfZeroControlIsDegenerate) {
  const auto u = PiecewiseConstantControl::zero(2, 3);
  const auto r = reparametrize_constant_speed(Vec::Zero(2), identity_structure(2), u, VaryingNorm::euclidean(2), 4);
  EXPECT_TRUE(r.degenerate);
}

TEST(Fiber, EuclideanMatchesLeastNorm) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    Mat a(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = rng.normal();
    const Vec v = make_vec({rng.normal(), rng.normal()});
    const auto f = constant_structure(a);
    const auto r = fiber_metric(Vec::Zero(2), v, f, VaryingNorm::euclidean(3));
    ASSERT_TRUE(r.finite);
    EXPECT_NEAR(r.value, oracle::least_norm(a, v), 1e-8);
  }
}

TEST(Fiber, OutsideRangeIsInfinite) {
  const auto r = fiber_metric(Vec::Zero(3), make_vec({0, 0, 1}), heisenberg_horizontal(), VaryingNorm::euclidean(2));
  EXPECT_FALSE(r.finite);
}

TEST(Fiber, L1MatchesBruteForce) {
  Rng rng(12);
  const auto l1 = VaryingNorm::weighted_lp(make_vec({1, 2, 0.5}), 1.0);
  for (int t = 0; t < 10; ++t) {
    Mat a(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = rng.normal();
    const Vec v = make_vec({rng.normal(), rng.normal()});
    const auto r = fiber_metric(Vec::Zero(2), v, constant_structure(a), l1);
    const double brute = oracle::brute_force_fiber(a, v, [&](const Vec& u) { return l1(Vec::Zero(2), u); }, 20.0);
    EXPECT_NEAR(r.value, brute, 1e-3);
  }
}

TEST(Fiber, IllConditionedIsFlagged) {
  Mat a(2, 2);
  a << 1, 1, 1, 1 + 2e-12;
  const auto r = fiber_metric(Vec::Zero(2), make_vec({1, 1}), constant_structure(a), VaryingNorm::euclidean(2));
  EXPECT_TRUE(r.finite);
  EXPECT_TRUE(r.ill_conditioned);
}
