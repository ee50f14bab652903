#pragma once

#include <vector>

#include "ccdist/flow.hpp"
#include "ccdist/structure.hpp"

namespace ccdist {

// Discretized optimal-control problem on a uniform grid of `segments`
// constant values (packed as [u_0; ...; u_{K-1}], length K*k):
//
//   action(u) = sum_j int_{seg j} N(gamma, u_j)^2 dt   (trapezoid per RK4 step)
//   residual(u) = End(u) - target
//
// For constant-speed controls action = length^2, and min action over
// feasible u equals d^2, so the smooth action replaces the esssup energy.
class ShootingProblem {
 public:
  ShootingProblem(const VectorFieldStructure& f, const VaryingNorm& norm,
                  Vec start, Vec target, int segments, int steps,
                  detail::BoxBounds bounds);

  int dimension() const { return segments_ * dim_k_; }
  int segments() const { return segments_; }
  int dim_k() const { return dim_k_; }
  int dim_m() const { return static_cast<int>(start_.size()); }
  const Vec& start() const { return start_; }
  const Vec& target() const { return target_; }

  struct Evaluation {
    bool feasible = false;  // integration stayed in the box and finite
    double action = 0.0;
    Vec residual;
  };

  Evaluation evaluate(const VecX& packed) const;

  // Augmented Lagrangian  action + lambda.r + (mu/2)|r|^2  and its exact
  // gradient (reverse-mode through the RK4 steps).
  double augmented(const VecX& packed, const Vec& multiplier, double mu,
                   VecX* grad, Evaluation* eval = nullptr) const;

  // d End / d u, an m x (K k) matrix, by reverse sweeps.
  bool endpoint_jacobian(const VecX& packed, MatX& jacobian,
                         Vec* residual = nullptr) const;

 private:
  // Reverse sweep: seeds the adjoint of the final state with `final_adjoint`
  // and accumulates into grad (size K*k). When `with_action` the running
  // cost contributes too.
  void reverse(const VecX& packed, const Vec& final_adjoint, bool with_action,
               VecX& grad) const;

  const VectorFieldStructure& f_;
  const VaryingNorm& norm_;
  Vec start_;
  Vec target_;
  int segments_;
  int steps_;
  int dim_k_;
  detail::BoxBounds bounds_;
  mutable std::vector<Vec> states_;
};

}  // namespace ccdist
