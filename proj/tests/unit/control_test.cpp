#include <gtest/gtest.h>

#include "ccdist/control.hpp"
#include "ccdist/errors.hpp"

using namespace ccdist;

TEST(Control, UniformKnotsAndLookup) {
  PiecewiseConstantControl u({make_vec({1, 0}), make_vec({0, 2}), make_vec({3, 3})});
  EXPECT_TRUE(u.is_uniform());
  EXPECT_EQ(u.segments(), 3);
  EXPECT_DOUBLE_EQ(u.knot(1), 1.0 / 3.0);
  EXPECT_EQ(u.segment_at(0.0), 0);
  EXPECT_EQ(u.segment_at(0.5), 1);
  EXPECT_EQ(u.segment_at(1.0), 2);
  EXPECT_EQ(u.at(0.9), make_vec({3, 3}));
}

TEST(Control, PackRoundTrip) {
  PiecewiseConstantControl u({make_vec({1, -1}), make_vec({0.5, 2})});
  const auto v = PiecewiseConstantControl::from_packed(u.packed(), 2);
  EXPECT_TRUE(u == v);
}

TEST(Control, AveragingPreservesIntegral) {
  PiecewiseConstantControl u({0.0, 0.2, 0.7, 1.0}, {make_vec({1}), make_vec({-2}), make_vec({4})});
  const auto a = u.averaged_uniform(5);
  double before = 0.0, after = 0.0;
  for (int j = 0; j < u.segments(); ++j) before += u.duration(j) * u.value(j)(0);
  for (int j = 0; j < a.segments(); ++j) after += a.duration(j) * a.value(j)(0);
  EXPECT_NEAR(before, after, 1e-14);
}

TEST(Control, ConcatenateCompressesTime) {
  const auto a = PiecewiseConstantControl::constant(make_vec({1, 0}));
  const auto b = PiecewiseConstantControl::constant(make_vec({0, 1}));
  const auto c = PiecewiseConstantControl::concatenate({a, b});
  EXPECT_EQ(c.segments(), 2);
  EXPECT_EQ(c.value(0), make_vec({2, 0}));
  EXPECT_EQ(c.value(1), make_vec({0, 2}));
}

TEST(Control, RestrictionRescales) {
  PiecewiseConstantControl u({make_vec({1}), make_vec({3})});
  const auto r = u.restricted(0.25, 0.75);
  EXPECT_NEAR(r.at(0.1)(0), 0.5, 1e-15);
  EXPECT_NEAR(r.at(0.9)(0), 1.5, 1e-15);
}

TEST(Control, RejectsBadKnots) {
  EXPECT_THROW(PiecewiseConstantControl({0.0, 0.6, 0.5, 1.0}, {make_vec({1}), make_vec({1}), make_vec({1})}),
               Error);
}
