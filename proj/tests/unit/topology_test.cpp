#include <gtest/gtest.h>

#include <cmath>

#include "ccdist/errors.hpp"
#include "ccdist/scenarios.hpp"
#include "ccdist/topology.hpp"

using namespace ccdist;
using V2 = Eigen::Vector2d;

TEST(Winding, StandardMaps) {
  const V2 c(0, 0);
  EXPECT_EQ(winding_number([](const V2& x) { return x; }, c, 1.0, 128).winding, 1);
  EXPECT_EQ(winding_number([](const V2& x) { return V2(x.x() * x.x() - x.y() * x.y(), 2 * x.x() * x.y()); }, c,
                           1.0, 128)
                .winding,
            2);
  EXPECT_EQ(winding_number([](const V2& x) { return V2(x.x(), -x.y()); }, c, 1.0, 128).winding, -1);
  const auto k = winding_number([](const V2&) { return V2(1, 1); }, c, 1.0, 128);
  EXPECT_EQ(k.winding, 0);
  EXPECT_FALSE(k.reliable);
}

TEST(Winding, ReliableForIdentity) {
  const auto r = winding_number([](const V2& x) { return x; }, V2(0.3, -0.2), 0.5, 256);
  EXPECT_TRUE(r.reliable);
  EXPECT_NEAR(r.min_boundary_gap, 0.5, 1e-12);
}

TEST(Openness, IdentityFlowsAreOpen) {
  const auto probe = essential_openness_probe(Vec::Zero(2), identity_structure(2), {0, 1}, Vec::Zero(2), 0.1, 64);
  EXPECT_TRUE(probe.open_at_scale);
  EXPECT_EQ(std::abs(probe.degree.winding), 1);
}

TEST(Openness, DuplicatedLineFieldIsNotOpen) {
  const Mat a = (Mat(2, 2) << 1, 1, 0, 0).finished();
  const auto probe = essential_openness_probe(Vec::Zero(2), constant_structure(a), {0, 1}, Vec::Zero(2), 0.1, 64);
  EXPECT_FALSE(probe.open_at_scale);
  EXPECT_EQ(probe.degree.winding, 0);
}

TEST(Openness, PlanarOnly) {
  EXPECT_THROW(essential_openness_probe(Vec::Zero(3), heisenberg_horizontal(), {0, 1}, Vec::Zero(2), 0.1, 64),
               DimensionMismatch);
}

TEST(Brackets, HeisenbergGeneratesAtDepthTwo) {
  const auto f = heisenberg_horizontal();
  const Vec p = make_vec({0.2, -0.3, 0.1});
  EXPECT_EQ(bracket_span_rank(f, p, 1), 2);
  EXPECT_EQ(bracket_span_rank(f, p, 2), 3);
  // [X, Y] = Z.
  const auto v = bracket_vectors(f, p, 2);
  bool found_z = false;
  for (const Vec& b : v) found_z = found_z || (std::abs(std::abs(b(2)) - 1.0) < 1e-6 && b.head(2).norm() < 1e-6);
  EXPECT_TRUE(found_z);
}

TEST(Brackets, RejectsBadStep) {
  BracketOptions o;
  o.h = 0.1;
  EXPECT_THROW(bracket_span_rank(heisenberg_horizontal(), Vec::Zero(3), 2, o), InvalidArgument);
}

TEST(Openness, RadiiFormula) {
  const auto r = openness_radii(2.0, 4.0);
  EXPECT_DOUBLE_EQ(r.c1, 0.25);
  EXPECT_DOUBLE_EQ(r.c2, 1.0 / 16.0);
}
