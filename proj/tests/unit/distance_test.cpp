#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ccdist/convergence.hpp"
#include "ccdist/distance.hpp"
#include "ccdist/errors.hpp"
#include "ccdist/functionals.hpp"
#include "ccdist/rng.hpp"
#include "ccdist/scenarios.hpp"
#include "oracles.hpp"

using namespace ccdist;

namespace {
DistanceOptions heisenberg_opts() {
  DistanceOptions o;
  o.box = ChartBox::cube(3, 1.0);
  o.seed = 5;
  return o;
}
}  // namespace

TEST(HeisenbergOracle, KnownValues) {
  EXPECT_NEAR(oracle::heisenberg_distance(Vec::Zero(3), make_vec({0, 0, 0.25})), std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(oracle::heisenberg_distance(Vec::Zero(3), make_vec({0.3, 0.4, 0})), 0.5, 1e-15);
  // Left translation invariance.
  const Vec p = make_vec({0.2, -0.1, 0.05}), q = make_vec({-0.4, 0.3, 0.2});
  const Vec zero = Vec::Zero(3);
  EXPECT_NEAR(oracle::heisenberg_distance(p, q), oracle::heisenberg_distance(zero, oracle::heisenberg_difference(p, q)),
              1e-15);
}

TEST(DistanceOpt, EuclideanChord) {
  DistanceOptions o;
  o.box = ChartBox::cube(2, 1.0);
  const auto e = cc_distance_opt(make_vec({-0.5, 0.2}), make_vec({0.4, -0.3}), identity_structure(2),
                                 VaryingNorm::euclidean(2), o);
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.value, std::hypot(0.9, 0.5), 1e-6);
}

TEST(DistanceOpt, SamePointIsZero) {
  const auto e = cc_distance_opt(make_vec({0.1, 0.1}), make_vec({0.1, 0.1}), identity_structure(2),
                                 VaryingNorm::euclidean(2));
  EXPECT_EQ(e.value, 0.0);
  EXPECT_TRUE(e.converged);
}

TEST(DistanceOpt, RejectsDimensionMismatch) {
  EXPECT_THROW(cc_distance_opt(make_vec({0, 0}), make_vec({0, 0, 1}), heisenberg_horizontal(),
                               VaryingNorm::euclidean(2)),
               DimensionMismatch);
}

TEST(DistanceOpt, HeisenbergMatchesExactDistance) {
  const auto f = heisenberg_horizontal();
  const auto n = VaryingNorm::euclidean(2);
  const std::vector<std::pair<Vec, Vec>> pairs = {
      {Vec::Zero(3), make_vec({1, 0, 0})},
      {Vec::Zero(3), make_vec({0, 0, 0.25})},
      {make_vec({0, 0.5, 0.1}), make_vec({-0.3, 0.4, -0.1})},
      {make_vec({0.6, 0, 0}), make_vec({0, 0.5, 0.1})}};
  for (const auto& [p, q] : pairs) {
    const auto e = cc_distance_opt(p, q, f, n, heisenberg_opts());
    ASSERT_TRUE(e.converged);
    const double exact = oracle::heisenberg_distance(p, q);
    EXPECT_GE(e.value, exact * (1 - 1e-6));  // upper bound on the infimum
    EXPECT_LE(e.value, exact * 1.01);
  }
}

TEST(DistanceOpt, DeterministicUnderThreads) {
  auto o = heisenberg_opts();
  const auto a = cc_distance_opt(Vec::Zero(3), make_vec({0.3, 0.2, 0.15}), heisenberg_horizontal(),
                                 VaryingNorm::euclidean(2), o);
  o.threads = 3;
  const auto b = cc_distance_opt(Vec::Zero(3), make_vec({0.3, 0.2, 0.15}), heisenberg_horizontal(),
                                 VaryingNorm::euclidean(2), o);
  EXPECT_EQ(a.value, b.value);
}

TEST(Geodesic, HomotheticAndLengthsAgree) {
  const auto f = heisenberg_horizontal();
  const auto n = VaryingNorm::euclidean(2);
  const auto g = geodesic(Vec::Zero(3), make_vec({0.3, 0, 0.1}), f, n, heisenberg_opts());
  const double l = g.estimate.value;
  const double h = homothety_residual(g.trajectory, l, f, n, {{0.0, 0.5}, {0.25, 1.0}}, heisenberg_opts());
  EXPECT_LT(h, 0.05);
  const auto integral = integral_length(g.trajectory, f, n);
  ASSERT_TRUE(integral.has_value());
  EXPECT_NEAR(*integral, l, 0.02 * l);
  const double poly = polygonal_length(g.trajectory, f, n, {0.0, 0.25, 0.5, 0.75, 1.0}, heisenberg_opts());
  EXPECT_NEAR(poly, l, 0.02 * l);
}

TEST(Table, SymmetricWithZeroDiagonal) {
  TableOptions t;
  t.opt.box = ChartBox::cube(2, 1.0);
  const auto fam = euclidean_family(2);
  const std::vector<Vec> pts = {make_vec({0, 0}), make_vec({0.5, 0}), make_vec({0, 0.5})};
  const auto table = family_distance_table(fam, fam.limit_param(), pts, t);
  ASSERT_TRUE(table.all_found());
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(table.values(i, i), 0.0);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(table.values(i, j), table.values(j, i));
  }
  EXPECT_NEAR(table.values(1, 2), std::sqrt(0.5), 1e-6);
}
