#pragma once

#include <vector>

#include "ccdist/linalg.hpp"

namespace ccdist {

// Piecewise-constant control u: [0,1] -> R^k. Segment j holds value(j) on
// [knot(j), knot(j+1)). Uniform controls have knots j/K; reparametrized
// controls carry explicit knots.
class PiecewiseConstantControl {
 public:
  // Uniform grid, one value per segment.
  explicit PiecewiseConstantControl(std::vector<Vec> values);
  PiecewiseConstantControl(std::vector<double> knots, std::vector<Vec> values);

  static PiecewiseConstantControl zero(int dim_k, int segments);
  static PiecewiseConstantControl constant(const Vec& value, int segments = 1);
  // Unpacks a stacked vector [u_0; u_1; ...] of length K*k on a uniform grid.
  static PiecewiseConstantControl from_packed(const VecX& packed, int dim_k);

  int dim_k() const { return static_cast<int>(values_.front().size()); }
  int segments() const { return static_cast<int>(values_.size()); }
  const Vec& value(int j) const { return values_[static_cast<std::size_t>(j)]; }
  const std::vector<Vec>& values() const { return values_; }
  const std::vector<double>& knots() const { return knots_; }
  double knot(int j) const { return knots_[static_cast<std::size_t>(j)]; }
  double duration(int j) const { return knot(j + 1) - knot(j); }
  bool is_uniform() const;

  // Value at time t in [0,1] (right-continuous, last segment closed).
  Vec at(double t) const;
  int segment_at(double t) const;

  // Max over segments of the Euclidean reference norm.
  double sup_norm() const;
  VecX packed() const;

  // Same control with every value multiplied by s.
  PiecewiseConstantControl scaled(double s) const;
  // Samples at the midpoints of a uniform K-grid (exact when knots refine it).
  PiecewiseConstantControl resampled_uniform(int segments) const;
  // Averages over each cell of a uniform K-grid, preserving the integral of u.
  PiecewiseConstantControl averaged_uniform(int segments) const;

  // Runs the parts one after another, each on an equal share of [0,1]
  // (time-compressed, values multiplied by the number of parts).
  static PiecewiseConstantControl concatenate(
      const std::vector<PiecewiseConstantControl>& parts);

  // Restriction to [a,b], rescaled back to [0,1] (values times (b-a)).
  PiecewiseConstantControl restricted(double a, double b) const;

  bool operator==(const PiecewiseConstantControl& other) const;

 private:
  void validate() const;

  std::vector<double> knots_;
  std::vector<Vec> values_;
};

}  // namespace ccdist
