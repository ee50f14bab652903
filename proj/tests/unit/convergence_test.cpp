#include <gtest/gtest.h>

#include <cmath>

#include "ccdist/convergence.hpp"
#include "ccdist/scenarios.hpp"

using namespace ccdist;

namespace {
ReportOptions heisenberg_report() {
  ReportOptions r;
  r.table.opt.box = ChartBox::cube(3, 1.0);
  r.table.opt.seed = 2;
  return r;
}
}  // namespace

TEST(Convergence, HeisenbergDistancesDecreaseTowardLimit) {
  const auto fam = heisenberg_family({1.0, 0.25});
  const std::vector<Vec> pts = {Vec::Zero(3), make_vec({0.6, 0, 0}), make_vec({0, 0, 0.25})};
  const auto rep = uniform_convergence_report(fam, pts, heisenberg_report());
  ASSERT_EQ(rep.ordering.size(), 3u);
  EXPECT_EQ(rep.ordering.back(), 0.0);
  EXPECT_EQ(rep.sup_deviation.back(), 0.0);
  EXPECT_TRUE(rep.monotone);
  // Every (f_0, N)-control is an (f_eps, N)-control of equal cost.
  for (const auto& d : rep.pairs) EXPECT_LE(d.d_lambda, d.d_limit * 1.02);
  EXPECT_GE(rep.sup_for(1.0), rep.sup_for(0.25));
}

TEST(Convergence, GhBounds) {
  MatX a(3, 3), b(3, 3);
  a << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  b << 0, 1, 1.5, 1, 0, 1, 1.5, 1, 0;
  DistanceTable ta, tb;
  ta.values = a;
  tb.values = b;
  EXPECT_DOUBLE_EQ(gh_upper_bound(ta, tb), 0.25);
  EXPECT_LE(gh_bijection_bound(a, b), 0.25);
  MatX c(3, 3);  // a relabelled copy of a
  c << 0, 2, 1, 2, 0, 1, 1, 1, 0;
  EXPECT_DOUBLE_EQ(gh_bijection_bound(a, c), 0.0);
}

TEST(Convergence, DilationsScaleCoordinates) {
  const auto d = dilation_family(perturbed_heisenberg(1.0), VaryingNorm::euclidean(2), {1, 1, 2}, {1.0, 0.5},
                                 heisenberg_horizontal(), VaryingNorm::euclidean(2));
  const Vec x = d.dilate(0.5, make_vec({1, 2, 4}));
  EXPECT_EQ(x, make_vec({0.5, 1, 1}));
}

TEST(Convergence, IsometryIdentityOnHeisenberg) {
  const auto fam = heisenberg_family({1.0, 0.5});
  DistanceOptions o;
  o.box = ChartBox::cube(3, 1.0);
  const auto r = isometry_identity_check(fam, {0.5}, {{Vec::Zero(3), make_vec({0.8, 0, 0.2})}}, o);
  EXPECT_LT(r.max_relative_residual, 0.02);
}

TEST(Convergence, RelaxationConsistentOnHorizontalPair) {
  // d_eps = d_0 along X for every eps, so the probe sees no gap.
  const auto fam = heisenberg_family({0.5});
  DistanceOptions o;
  o.box = ChartBox::cube(3, 1.0);
  const auto r = relaxation_probe(fam, Vec::Zero(3), make_vec({0.5, 0, 0}), 0.0, 2, o);
  EXPECT_TRUE(r.consistent);
  EXPECT_NEAR(r.min_neighbor_value, r.limit_value, 1e-6);
}
