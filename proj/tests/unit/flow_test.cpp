#include <gtest/gtest.h>

#include <cmath>

#include "ccdist/errors.hpp"
#include "ccdist/flow.hpp"
#include "ccdist/scenarios.hpp"
#include "oracles.hpp"

using namespace ccdist;

TEST(Flow, ConstantFrameIsTranslation) {
  const auto f = identity_structure(2);
  const PiecewiseConstantControl u({make_vec({1, 0}), make_vec({0, 3})});
  const Vec end = end_point(make_vec({0.5, 0.5}), f, u);
  EXPECT_NEAR(end(0), 1.0, 1e-15);
  EXPECT_NEAR(end(1), 2.0, 1e-15);
}

TEST(Flow, HeisenbergSquareLoopEndsAtEnclosedArea) {
  // X, Y, -X, -Y with side a encloses area a^2, which is the z gain.
  const double a = 0.4;
  FlowWord w{{{0, a}, {1, a}, {0, -a}, {1, -a}}};
  const Vec end = end_point(Vec::Zero(3), heisenberg_horizontal(), concat_control(w, 2));
  EXPECT_NEAR(end(0), 0.0, 1e-14);
  EXPECT_NEAR(end(1), 0.0, 1e-14);
  EXPECT_NEAR(end(2), a * a, 1e-14);
}

TEST(Flow, ConcatFormsAgree) {
  FlowWord w{{{0, 0.3}, {1, -0.7}, {0, 0.2}}};
  const auto f = heisenberg_horizontal();
  const Vec a = end_point(Vec::Zero(3), f, concat_control(w, 2));
  const Vec b = end_point(Vec::Zero(3), f, concat_control_unit_speed(w, 2));
  const Vec c = flow_composition(Vec::Zero(3), f, {0, 1, 0}, make_vec({0.3, -0.7, 0.2}));
  EXPECT_LT((a - b).norm(), 1e-12);
  EXPECT_LT((a - c).norm(), 1e-12);
}

TEST(Flow, RotationFieldIsIntegratedAccurately) {
  // X = (-y, x): the flow is rotation by angle t.
  VectorFieldStructure f(2, 1, [](const Vec& p) {
    Mat m(2, 1);
    m << -p(1), p(0);
    return m;
  });
  const auto u = PiecewiseConstantControl::constant(make_vec({M_PI}), 4);
  const Vec end = end_point(make_vec({1, 0}), f, u);
  EXPECT_NEAR(end(0), -1.0, 1e-6);  // RK4, 64 steps over angle pi
  EXPECT_NEAR(end(1), 0.0, 1e-6);
}

TEST(Flow, LeavingTheBoxThrows) {
  EndpointOptions o;
  o.box = ChartBox::cube(2, 1.0);
  o.inflation = 0.0;
  const auto u = PiecewiseConstantControl::constant(make_vec({3, 0}), 2);
  try {
    end_point(Vec::Zero(2), identity_structure(2), u, o);
    FAIL() << "expected BoxExit";
  } catch (const BoxExit& e) {
    EXPECT_NEAR(e.time(), 1.0 / 3.0, 1.0 / 32.0);
  }
}

TEST(Flow, GronwallBoundIsRespected) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = oracle::random_sine_field(2, 2, s, 0.5);
    const Mat shift = 0.05 * Mat::Identity(2, 2);
    const VectorFieldStructure g(2, 2, [&a, shift](const Vec& p) { return Mat(a.f(p) + shift); });
    const auto u = PiecewiseConstantControl({make_vec({0.5, -0.2}), make_vec({-0.3, 0.8})});
    const double sup_u = u.sup_norm();
    const double dev = (end_point(Vec::Zero(2), a.f, u) - end_point(Vec::Zero(2), g, u)).norm();
    EXPECT_LE(dev, gronwall_bound(0.05 * sup_u, a.lipschitz * sup_u, 1.0) + 1e-10);
  }
}

TEST(Flow, GronwallBoundLimits) {
  EXPECT_DOUBLE_EQ(gronwall_bound(2.0, 0.0, 3.0), 6.0);
  EXPECT_NEAR(gronwall_bound(1.0, 1.0, 1.0), std::exp(1.0) - 1.0, 1e-15);
}
