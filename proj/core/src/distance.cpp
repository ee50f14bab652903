#include "ccdist/distance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ccdist/errors.hpp"
#include "ccdist/functionals.hpp"
#include "ccdist/optimize.hpp"
#include "ccdist/parallel.hpp"
#include "ccdist/rng.hpp"
#include "ccdist/shooting.hpp"

namespace ccdist {

const char* to_string(DistanceMethod method) {
  return method == DistanceMethod::kControlOpt ? "control-opt" : "grid-graph";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  bool attempted = false;
  bool feasible = false;  // endpoint residual within tolerance
  double value = kInf;
  double residual = kInf;
  double energy = 0.0;
  long evaluations = 0;
  bool converged_local = false;
  std::optional<PiecewiseConstantControl> control;
};

// Min-norm Gauss-Newton steps on the end-point residual.
void polish_endpoint(const ShootingProblem& problem, VecX& x, double tol, long& evaluations) {
  MatX jac;
  Vec residual;
  for (int iter = 0; iter < 25; ++iter) {
    if (!problem.endpoint_jacobian(x, jac, &residual)) return;
    ++evaluations;
    const double r0 = residual.norm();
    if (r0 <= 1e-3 * tol) return;
    const MatX jjt = jac * jac.transpose();
    const VecX step = -jac.transpose() *
                      (jjt + 1e-14 * (1.0 + jjt.trace()) * MatX::Identity(jjt.rows(), jjt.cols()))
                          .ldlt()
                          .solve(VecX(residual));
    double a = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 20; ++ls, a *= 0.5) {
      const VecX trial = x + a * step;
      const auto e = problem.evaluate(trial);
      ++evaluations;
      if (e.feasible && e.residual.norm() < r0) {
        x = trial;
        moved = true;
        break;
      }
    }
    if (!moved) return;
  }
}

VecX solve_from(const ShootingProblem& problem, VecX x, const DistanceOptions& options,
                long& evaluations, bool& local_ok) {
  const int m = problem.dim_m();
  Vec multiplier = Vec::Zero(m);
  local_ok = false;
  const int n = problem.dimension();
  // Skip the low penalties that would let the action win outright: below
  // them the minimizer can collapse onto a stationary point such as u = 0.
  double mu0 = 10.0;
  {
    const auto e0 = problem.evaluate(x);
    const double r2 = e0.feasible ? e0.residual.squaredNorm() : 0.0;
    const double d2 = (problem.target() - problem.start()).squaredNorm();
    if (r2 > 0.0) {
      const double scale = e0.action + d2;
      while (mu0 < 1e6 && 0.5 * mu0 * r2 < 50.0 * scale) mu0 *= 10.0;
    }
    // A start that nearly reaches q would otherwise shrink by about
    // 2A / (2A + mu |q-p|^2) in the first stage and lose its route.
    if (e0.feasible && d2 > 0.0) {
      while (mu0 < 1e6 && mu0 * d2 < 200.0 * e0.action) mu0 *= 10.0;
    }
  }
  for (double mu = mu0; mu <= 1e6 * 1.0001; mu *= 10.0) {
    MinimizeResult r;
    if (options.local == DistanceOptions::Local::kQuasiNewton) {
      LbfgsOptions lb;
      lb.max_iterations = options.max_iterations;
      r = minimize_lbfgs(
          [&](const VecX& u, VecX* g) { return problem.augmented(u, multiplier, mu, g); }, x, lb);
    } else {
      SimplexOptions so;
      so.max_evaluations = std::max(200, 2000 * n / 6);
      so.initial_step = 0.1 * std::max(1e-3, x.lpNorm<Eigen::Infinity>());
      r = minimize_simplex(
          [&](const VecX& u) { return problem.augmented(u, multiplier, mu, nullptr); }, x, so);
    }
    evaluations += r.evaluations;
    if (!std::isfinite(r.value)) return x;
    x = r.x;
    local_ok = r.converged;
    const auto e = problem.evaluate(x);
    ++evaluations;
    if (!e.feasible) return x;
    multiplier += mu * e.residual;
    if (e.residual.norm() <= 0.1 * options.endpoint_tol) break;
  }
  polish_endpoint(problem, x, options.endpoint_tol, evaluations);
  return x;
}

// Straight chord from p to q, lifted segment-wise through the fiber metric.
VecX chord_lift(const Vec& p, const Vec& q, const VectorFieldStructure& f, const VaryingNorm& norm,
                int segments) {
  const int k = f.dim_k();
  VecX x(static_cast<Eigen::Index>(segments) * k);
  const Vec v = q - p;
  FiberOptions fo;
  fo.tol = 1e-9;
  fo.starts = 2;
  for (int j = 0; j < segments; ++j) {
    const Vec c = p + ((j + 0.5) / segments) * v;
    const FiberSolveResult r = fiber_metric(c, v, f, norm, fo);
    Vec u;
    if (r.finite && r.minimizer) {
      u = *r.minimizer;
    } else {
      // Least-squares lift when the chord is not admissible.
      const Mat a = f(c);
      u = a.completeOrthogonalDecomposition().solve(v);
    }
    x.segment(static_cast<Eigen::Index>(j) * k, k) = u;
  }
  return x;
}

VecX random_word(int k, int segments, double scale, Rng& rng) {
  const int letters = std::max(1, std::min(segments, 2 * k + 2));
  FlowWord word;
  for (int l = 0; l < letters; ++l) {
    word.letters.push_back({rng.index(k), scale * rng.normal() / std::sqrt(letters)});
  }
  return concat_control(word, k).averaged_uniform(segments).packed();
}

Vec nearest_node(const Vec& x, const GridGraphSpec& spec, const ChartBox& box) {
  Vec node = box.clamp(x);
  for (int i = 0; i < box.dim(); ++i) {
    const double h = box.widths()(i) / (spec.resolution[static_cast<std::size_t>(i)] - 1);
    node(i) = box.lower()(i) + h * std::round((node(i) - box.lower()(i)) / h);
  }
  return node;
}

}  // namespace

DistanceEstimate cc_distance_opt(const Vec& p, const Vec& q, const VectorFieldStructure& f,
                                 const VaryingNorm& norm, const DistanceOptions& options) {
  if (p.size() != f.dim_m() || q.size() != f.dim_m()) {
    throw DimensionMismatch("end points must have dimension m");
  }
  if (norm.dim_k() != f.dim_k()) throw DimensionMismatch("norm and structure dimensions differ");
  if (options.segments < 1) throw InvalidArgument("segments must be >= 1");
  if (options.restarts < 0) throw InvalidArgument("restarts must be >= 0");
  if (!(options.endpoint_tol > 0.0)) throw InvalidArgument("endpoint_tol must be positive");
  if (options.box) {
    options.box->require_contains(p, "start point");
    options.box->require_contains(q, "target point");
  }
  const int k = f.dim_k();
  const int segments = options.segments;

  DistanceEstimate est;
  est.method = DistanceMethod::kControlOpt;
  if (p == q) {
    est.value = 0.0;
    est.best_control = PiecewiseConstantControl::zero(k, 1);
    est.converged = true;
    return est;
  }

  // Starting controls, in a fixed order.
  std::vector<VecX> starts;
  for (const auto& w : options.warm_starts) {
    if (w.dim_k() != k) throw DimensionMismatch("warm start control dimension differs from k");
    starts.push_back(w.is_uniform() && w.segments() <= segments && segments % w.segments() == 0
                         ? w.resampled_uniform(segments).packed()
                         : w.averaged_uniform(segments).packed());
  }
  starts.push_back(chord_lift(p, q, f, norm, segments));
  starts.push_back(VecX::Zero(static_cast<Eigen::Index>(segments) * k));
  long seed_evaluations = 0;
  if (options.graph_seed && options.box) {
    try {
      const DistanceEstimate g =
          cc_distance_graph(nearest_node(p, *options.graph_seed, *options.box),
                            nearest_node(q, *options.graph_seed, *options.box), f, norm,
                            *options.graph_seed, *options.box);
      seed_evaluations += g.evaluations;
      if (g.found && g.best_control) {
        // Lattice paths change speed from move to move; start from the
        // constant-speed version so the action equals the squared length.
        PiecewiseConstantControl c = *g.best_control;
        try {
          EndpointOptions plain;
          plain.steps_per_segment = options.steps_per_segment;
          c = reparametrize_constant_speed(nearest_node(p, *options.graph_seed, *options.box), f, c, norm,
                                           4 * segments, plain)
                  .control;
        } catch (const Error&) {
        }
        starts.push_back(c.averaged_uniform(segments).packed());
      }
    } catch (const Error&) {
      // No lattice seed; the other starts remain.
    }
  }
  const double scale = std::max(0.5, (q - p).norm());
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(r)));
    starts.push_back(random_word(k, segments, scale, rng));
  }

  const detail::BoxBounds bounds = detail::make_bounds(options.box, options.inflation);
  EndpointOptions eo;
  eo.steps_per_segment = options.steps_per_segment;
  eo.box = options.box;
  eo.inflation = options.inflation;
  const int out_segments = options.output_segments > 0 ? options.output_segments : 4 * segments;

  std::vector<Candidate> results(starts.size());
  parallel_for(
      starts.size(),
      [&](std::size_t i) {
        Candidate& c = results[i];
        ShootingProblem problem(f, norm, p, q, segments, options.steps_per_segment, bounds);
        if (!problem.evaluate(starts[i]).feasible) return;
        c.attempted = true;
        bool local_ok = false;
        const VecX x = solve_from(problem, starts[i], options, c.evaluations, local_ok);
        c.converged_local = local_ok;
        const auto e = problem.evaluate(x);
        if (!e.feasible) return;
        const PiecewiseConstantControl u = PiecewiseConstantControl::from_packed(x, k);
        try {
          ReparametrizeResult rep = reparametrize_constant_speed(p, f, u, norm, out_segments, eo);
          c.residual = (rep.trajectory.end() - q).norm();
          c.value = length(rep.trajectory, norm);
          c.energy = energy(rep.trajectory, norm);
          c.control = std::move(rep.control);
        } catch (const Error&) {
          return;
        }
        c.feasible = c.residual <= options.endpoint_tol;
      },
      options.threads);

  // Order-independent reduction: feasible first, then value, then index.
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < results.size(); ++i) {
    est.evaluations += results[i].evaluations;
    if (!results[i].control) continue;
    if (!best) {
      best = i;
      continue;
    }
    const Candidate& a = results[i];
    const Candidate& b = results[*best];
    if (a.feasible != b.feasible) {
      if (a.feasible) best = i;
    } else if (a.feasible ? a.value < b.value : a.residual < b.residual) {
      best = i;
    }
  }
  est.evaluations += seed_evaluations;
  if (!best) {
    est.found = false;
    est.converged = false;
    est.value = 0.0;
    est.endpoint_residual = kInf;
    return est;
  }
  const Candidate& b = results[*best];
  est.value = b.value;
  est.best_control = b.control;
  est.endpoint_residual = b.residual;
  est.energy = b.energy;
  est.found = b.feasible;
  est.converged = b.feasible;
  return est;
}

GeodesicResult geodesic(const Vec& p, const Vec& q, const VectorFieldStructure& f,
                        const VaryingNorm& norm, const DistanceOptions& options) {
  DistanceEstimate est = cc_distance_opt(p, q, f, norm, options);
  if (!est.converged || !est.best_control) {
    throw Error("geodesic: optimizer did not reach " + format_point(q) + " from " +
                format_point(p));
  }
  EndpointOptions eo;
  eo.steps_per_segment = options.steps_per_segment;
  Trajectory traj = endpoint(p, f, *est.best_control, eo);
  return {std::move(est), std::move(traj)};
}

namespace {

DistanceOptions covering(const DistanceOptions& options, const std::vector<Vec>& points) {
  DistanceOptions o = options;
  o.warm_starts.clear();
  if (!o.box) return o;
  Vec lo = o.box->lower(), hi = o.box->upper();
  for (const Vec& x : points) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  o.box = ChartBox(lo, hi);
  return o;
}

}  // namespace

double homothety_residual(const Trajectory& traj, double total_length,
                          const VectorFieldStructure& f, const VaryingNorm& norm,
                          const std::vector<std::pair<double, double>>& times,
                          const DistanceOptions& options) {
  if (!(total_length > 0.0)) throw InvalidArgument("homothety check needs a positive length");
  std::vector<Vec> pts;
  for (const auto& [s, t] : times) {
    pts.push_back(traj.at(s));
    pts.push_back(traj.at(t));
  }
  std::vector<double> residual(times.size(), 0.0);
  parallel_for(
      times.size(),
      [&](std::size_t i) {
        const auto [s, t] = times[i];
        const double expected = total_length * std::abs(t - s);
        if (expected <= 0.0) return;
        DistanceOptions o = covering(options, pts);
        o.seed = mix_seed(options.seed, i);
        o.threads = 1;
        const DistanceEstimate d = cc_distance_opt(pts[2 * i], pts[2 * i + 1], f, norm, o);
        residual[i] = d.found ? std::abs(d.value - expected) / expected : kInf;
      },
      options.threads);
  return residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
}

double polygonal_length(const Trajectory& traj, const VectorFieldStructure& f,
                        const VaryingNorm& norm, const std::vector<double>& partition,
                        const DistanceOptions& options) {
  if (partition.size() < 2) throw InvalidArgument("partition needs at least two times");
  for (std::size_t i = 1; i < partition.size(); ++i) {
    if (!(partition[i] > partition[i - 1])) throw InvalidArgument("partition must be increasing");
  }
  if (partition.front() < traj.times.front() - 1e-12 || partition.back() > traj.times.back() + 1e-12) {
    throw InvalidArgument("partition leaves the trajectory time range");
  }
  std::vector<Vec> pts;
  for (double t : partition) pts.push_back(traj.at(t));
  std::vector<double> gaps(partition.size() - 1, 0.0);
  std::vector<char> ok(gaps.size(), 1);
  parallel_for(
      gaps.size(),
      [&](std::size_t i) {
        DistanceOptions o = covering(options, pts);
        o.seed = mix_seed(options.seed, i);
        o.threads = 1;
        const DistanceEstimate d = cc_distance_opt(pts[i], pts[i + 1], f, norm, o);
        gaps[i] = d.value;
        ok[i] = d.found ? 1 : 0;
      },
      options.threads);
  double total = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!ok[i]) {
      throw Error("polygonal_length: no admissible curve found between partition points " +
                  std::to_string(i) + " and " + std::to_string(i + 1));
    }
    total += gaps[i];
  }
  return total;
}

std::optional<double> integral_length(const Trajectory& traj, const VectorFieldStructure& f,
                                      const VaryingNorm& norm, double fiber_tol) {
  FiberOptions fo;
  fo.tol = fiber_tol;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
    const double dt = traj.times[i + 1] - traj.times[i];
    if (dt <= 0.0) continue;
    const Vec delta = traj.points[i + 1] - traj.points[i];
    if (delta.isZero(0.0)) continue;
    const Vec mid = 0.5 * (traj.points[i] + traj.points[i + 1]);
    const FiberSolveResult r = fiber_metric(mid, Vec(delta / dt), f, norm, fo);
    if (!r.finite) return std::nullopt;
    total += r.value * dt;
  }
  return total;
}

}  // namespace ccdist
