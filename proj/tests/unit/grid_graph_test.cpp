#include <gtest/gtest.h>

#include <cmath>

#include "ccdist/distance.hpp"
#include "ccdist/errors.hpp"
#include "ccdist/scenarios.hpp"

using namespace ccdist;

namespace {
GridGraphSpec unit_lattice(int moves_radius) {
  GridGraphSpec g;
  g.resolution = {11, 11};
  g.tau = 0.1;
  g.moves = moves_radius > 0 ? chord_moves(2, 0.1, moves_radius) : flow_word_moves(2, 0.1, 1);
  g.snap_tolerance = 1e-9;
  g.steps_per_move = 1;
  return g;
}
}  // namespace

TEST(GridGraph, AxisMovesGiveManhattanDistance) {
  const ChartBox box(make_vec({0, 0}), make_vec({1, 1}));
  const auto e = cc_distance_graph(make_vec({0, 0}), make_vec({0.5, 0.3}), identity_structure(2),
                                   VaryingNorm::euclidean(2), unit_lattice(0), box);
  ASSERT_TRUE(e.found);
  EXPECT_NEAR(e.value, 0.8, 1e-12);
}

TEST(GridGraph, ChordMovesRecoverStraightLines) {
  const ChartBox box(make_vec({0, 0}), make_vec({1, 1}));
  const auto e = cc_distance_graph(make_vec({0, 0}), make_vec({0.6, 0.3}), identity_structure(2),
                                   VaryingNorm::euclidean(2), unit_lattice(3), box);
  EXPECT_NEAR(e.value, std::hypot(0.6, 0.3), 1e-12);
  EXPECT_LT(e.endpoint_residual, 1e-9);
}

TEST(GridGraph, ChordMovesArePrimitive) {
  const auto moves = chord_moves(2, 0.1, 2);
  // Primitive vectors with max |c_i| <= 2: 8 with max 1, 8 with max 2.
  EXPECT_EQ(moves.size(), 16u);
}

TEST(GridGraph, UnreachableTargetIsNotFound) {
  // Single field d_x cannot change y.
  const Mat a = (Mat(2, 1) << 1, 0).finished();
  GridGraphSpec g = unit_lattice(0);
  g.moves = flow_word_moves(1, 0.1, 1);
  const auto e = cc_distance_graph(make_vec({0, 0}), make_vec({0, 0.5}), constant_structure(a),
                                   VaryingNorm::euclidean(1), g, ChartBox(make_vec({0, 0}), make_vec({1, 1})));
  EXPECT_FALSE(e.found);
  EXPECT_EQ(e.value, 0.0);
}

TEST(GridGraph, OffLatticePointIsRejected) {
  EXPECT_THROW(cc_distance_graph(make_vec({0.05, 0}), make_vec({0.5, 0.5}), identity_structure(2),
                                 VaryingNorm::euclidean(2), unit_lattice(1),
                                 ChartBox(make_vec({0, 0}), make_vec({1, 1}))),
               InvalidArgument);
}

TEST(GridGraph, MetricBallContainsCenterAndRespectsRadius) {
  const ChartBox box(make_vec({0, 0}), make_vec({1, 1}));
  const auto ball = metric_ball(make_vec({0.5, 0.5}), 0.2, identity_structure(2), VaryingNorm::euclidean(2),
                                unit_lattice(0), box);
  bool center = false;
  for (const auto& b : ball) {
    EXPECT_LE(b.value, 0.2 + 1e-12);
    if ((b.point - make_vec({0.5, 0.5})).norm() < 1e-12) center = b.value == 0.0;
  }
  EXPECT_TRUE(center);
  EXPECT_EQ(ball.size(), 13u);  // l1 ball of radius 2 cells
}

TEST(GridGraph, HeisenbergLatticeMatchesHorizontalSegment) {
  ScenarioSpec spec;
  spec.name = "heisenberg-eps";
  const Scenario s = build_scenario(spec);
  const auto& m = s.family.member(0.0);
  const auto e = cc_distance_graph(Vec::Zero(3), make_vec({0.5, 0, 0}), m.f, m.norm, s.graph, s.graph_box);
  ASSERT_TRUE(e.found);
  EXPECT_NEAR(e.value, 0.5, 1e-9);
}
