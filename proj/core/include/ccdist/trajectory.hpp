#pragma once

#include <vector>

#include "ccdist/control.hpp"
#include "ccdist/linalg.hpp"

namespace ccdist {

// Sampled integral curve gamma(t) = End(o, f, t u).
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> points;
  PiecewiseConstantControl control;
  // points[segment_start[j]] is the state at knot j; the last entry indexes
  // the final point, so segment j spans [segment_start[j], segment_start[j+1]].
  std::vector<std::size_t> segment_start;

  const Vec& start() const { return points.front(); }
  const Vec& end() const { return points.back(); }
  std::size_t size() const { return points.size(); }
  int dim_m() const { return static_cast<int>(points.front().size()); }

  // Linear interpolation in time between samples.
  Vec at(double t) const;
};

}  // namespace ccdist
