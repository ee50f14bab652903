#pragma once

#include <optional>

#include "ccdist/flow.hpp"
#include "ccdist/structure.hpp"
#include "ccdist/trajectory.hpp"

namespace ccdist {

// esssup_t N(gamma(t), u(t)), approximated by the max over every trajectory
// sample of each segment (exact when N(gamma, u) is constant per segment).
double energy(const Trajectory& traj, const VaryingNorm& norm);

// int_0^1 N(gamma(t), u(t)) dt by the trapezoid rule inside each segment.
double length(const Trajectory& traj, const VaryingNorm& norm);

struct ReparametrizeResult {
  PiecewiseConstantControl control;
  Trajectory trajectory;
  bool degenerate = false;  // input length below 1e-12; returned unchanged
};

// Constant-speed reparametrization psi(t) = (1/l) int_0^t N ds,
// v(s) = u(t) / psi'(t). Every input segment is split into pieces at
// trajectory samples; on each piece v is a positive multiple of the input
// value with the flow time preserved, so the traced curve is unchanged.
ReparametrizeResult reparametrize_constant_speed(
    const Vec& o, const VectorFieldStructure& f,
    const PiecewiseConstantControl& u, const VaryingNorm& norm,
    int out_segments, const EndpointOptions& options = {});

struct FiberSolveResult {
  bool finite = false;          // false: v is not in f(p)(E)
  double value = 0.0;           // meaningful only when finite
  std::optional<Vec> minimizer;
  double residual = 0.0;        // |A(p) u0 - v|
  double condition = 1.0;       // of A(p) restricted to its row space
  bool ill_conditioned = false; // condition > 1e12
};

struct FiberOptions {
  double tol = 1e-9;  // residual threshold, relative to max(1, |v|)
  int starts = 8;
};

// |v|_(f,N) = inf { N(p,u) : A(p) u = v }.
FiberSolveResult fiber_metric(const Vec& p, const Vec& v,
                              const VectorFieldStructure& f,
                              const VaryingNorm& norm,
                              const FiberOptions& options = {});

}  // namespace ccdist
