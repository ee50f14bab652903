#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccdist/chart_box.hpp"
#include "ccdist/control.hpp"
#include "ccdist/flow.hpp"
#include "ccdist/structure.hpp"
#include "ccdist/trajectory.hpp"

namespace ccdist {

enum class DistanceMethod { kControlOpt, kGridGraph };

const char* to_string(DistanceMethod method);

// Upper bound on d_(f,N)(p,q).
struct DistanceEstimate {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::kControlOpt;
  std::optional<PiecewiseConstantControl> best_control;
  double endpoint_residual = 0.0;
  long evaluations = 0;
  bool converged = false;
  // False when no candidate reached q (value is then the best infeasible
  // length, or 0 for the lattice method).
  bool found = true;
  double energy = 0.0;  // control-opt: energy of best_control
};

// A lattice move: a short control run over unit time. Word moves come from
// flow words; chord moves are single constant controls.
struct GraphMove {
  PiecewiseConstantControl control;
  std::string label;
};

// Single letters (i, +-tau) and, when max_letters == 2, ordered pairs of
// distinct fields (i, +-tau), (j, +-tau).
std::vector<GraphMove> flow_word_moves(int dim_k, double tau, int max_letters = 2);
// Constant controls tau * c for primitive integer vectors c with
// max |c_i| <= radius.
std::vector<GraphMove> chord_moves(int dim_k, double tau, int radius);

struct GridGraphSpec {
  std::vector<int> resolution;  // nodes per axis, >= 2
  double tau = 0.1;             // move time budget, in (0, 1]
  std::vector<GraphMove> moves;
  double snap_tolerance = 0.0;  // max |arrival - node|
  int steps_per_move = 8;       // RK4 steps per move segment

  void validate(int dim_m) const;
};

struct DistanceOptions {
  int segments = 32;
  int restarts = 4;
  double endpoint_tol = 1e-6;
  int steps_per_segment = 16;
  std::optional<ChartBox> box;
  double inflation = 0.1;
  std::uint64_t seed = 0;
  // Local optimizer for the penalized action.
  enum class Local { kQuasiNewton, kSimplex } local = Local::kQuasiNewton;
  int max_iterations = 400;  // per penalty stage (quasi-Newton)
  // Extra starting controls (e.g. a coarser solution), tried first.
  std::vector<PiecewiseConstantControl> warm_starts;
  // When set, a lattice shortest path seeds one start.
  std::optional<GridGraphSpec> graph_seed;
  // Segments of the constant-speed output control (0: 4 * segments).
  int output_segments = 0;
  int threads = 1;
};

// Minimizes the action of piecewise-constant controls steering p to q under
// an augmented penalty on the end point, escalating mu in {10, ..., 1e6}.
// Starts: warm starts, (a) fiber lift of the chord, (c) zero, (d) optional
// lattice path, (b) random flow words. The best feasible control is
// reparametrized to constant speed; its length is the estimate.
DistanceEstimate cc_distance_opt(const Vec& p, const Vec& q,
                                 const VectorFieldStructure& f,
                                 const VaryingNorm& norm,
                                 const DistanceOptions& options = {});

struct GraphPath {
  std::vector<std::size_t> nodes;
  std::vector<int> moves;  // move index per edge
};

// Shortest path on the lattice graph of `box`. Ties are broken by node
// index. p and q must lie within the snap tolerance of lattice nodes.
DistanceEstimate cc_distance_graph(const Vec& p, const Vec& q,
                                   const VectorFieldStructure& f,
                                   const VaryingNorm& norm,
                                   const GridGraphSpec& spec,
                                   const ChartBox& box,
                                   GraphPath* path = nullptr);

struct BallPoint {
  Vec point;
  double value = 0.0;
};

// Lattice nodes with graph distance <= r from p (p itself included).
std::vector<BallPoint> metric_ball(const Vec& p, double r,
                                   const VectorFieldStructure& f,
                                   const VaryingNorm& norm,
                                   const GridGraphSpec& spec,
                                   const ChartBox& box);

struct GeodesicResult {
  DistanceEstimate estimate;
  Trajectory trajectory;
};

// Constant-speed minimizer from cc_distance_opt. Throws Error when the
// optimizer did not converge.
GeodesicResult geodesic(const Vec& p, const Vec& q,
                        const VectorFieldStructure& f, const VaryingNorm& norm,
                        const DistanceOptions& options = {});

// max over sampled (s,t) of |d(gamma(s), gamma(t)) - L |t - s|| / (L |t - s|)
// with d estimated by cc_distance_opt.
double homothety_residual(const Trajectory& traj, double length,
                          const VectorFieldStructure& f,
                          const VaryingNorm& norm,
                          const std::vector<std::pair<double, double>>& times,
                          const DistanceOptions& options = {});

// sum_j d(gamma(t_j), gamma(t_{j+1})) over the partition.
double polygonal_length(const Trajectory& traj, const VectorFieldStructure& f,
                        const VaryingNorm& norm,
                        const std::vector<double>& partition,
                        const DistanceOptions& options = {});

// int |gamma'|_(f,N) dt with velocities from finite differences of the
// samples and the fiber metric at chord midpoints. Returns nullopt when a
// velocity is outside the range of f (infinite fiber metric).
std::optional<double> integral_length(const Trajectory& traj,
                                      const VectorFieldStructure& f,
                                      const VaryingNorm& norm,
                                      double fiber_tol = 1e-6);

}  // namespace ccdist
