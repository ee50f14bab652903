#include "ccdist/functionals.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "ccdist/errors.hpp"
#include "ccdist/optimize.hpp"
#include "ccdist/rng.hpp"

namespace ccdist {

namespace {

void check_dims(const Trajectory& traj, const VaryingNorm& norm) {
  if (traj.control.dim_k() != norm.dim_k()) {
    throw DimensionMismatch("trajectory control and norm dimensions differ");
  }
  if (traj.segment_start.size() != static_cast<std::size_t>(traj.control.segments()) + 1) {
    throw InvalidArgument("trajectory segment index is inconsistent with its control");
  }
}

}  // namespace

double energy(const Trajectory& traj, const VaryingNorm& norm) {
  check_dims(traj, norm);
  double best = 0.0;
  for (int j = 0; j < traj.control.segments(); ++j) {
    const Vec& u = traj.control.value(j);
    if (u.isZero(0.0)) continue;
    for (std::size_t i = traj.segment_start[static_cast<std::size_t>(j)];
         i <= traj.segment_start[static_cast<std::size_t>(j) + 1]; ++i) {
      best = std::max(best, norm(traj.points[i], u));
    }
  }
  return best;
}

double length(const Trajectory& traj, const VaryingNorm& norm) {
  check_dims(traj, norm);
  double total = 0.0;
  for (int j = 0; j < traj.control.segments(); ++j) {
    const Vec& u = traj.control.value(j);
    if (u.isZero(0.0)) continue;
    const std::size_t first = traj.segment_start[static_cast<std::size_t>(j)];
    const std::size_t last = traj.segment_start[static_cast<std::size_t>(j) + 1];
    double previous = norm(traj.points[first], u);
    for (std::size_t i = first + 1; i <= last; ++i) {
      const double current = norm(traj.points[i], u);
      total += 0.5 * (traj.times[i] - traj.times[i - 1]) * (previous + current);
      previous = current;
    }
  }
  return total;
}

ReparametrizeResult reparametrize_constant_speed(const Vec& o, const VectorFieldStructure& f,
                                                 const PiecewiseConstantControl& u,
                                                 const VaryingNorm& norm, int out_segments,
                                                 const EndpointOptions& options) {
  if (u.dim_k() != norm.dim_k()) throw DimensionMismatch("control and norm dimensions differ");
  Trajectory original = endpoint(o, f, u, options);
  const double total_length = length(original, norm);
  if (total_length < 1e-12) return {u, std::move(original), true};

  // Refine the knots: segment j is split into pieces[j] equal pieces.
  const int k_in = u.segments();
  const int target = std::max(out_segments, k_in);
  std::vector<double> knots{0.0};
  std::vector<Vec> values;
  for (int j = 0; j < k_in; ++j) {
    const int pieces = target / k_in + (j < target % k_in ? 1 : 0);
    for (int i = 1; i <= pieces; ++i) {
      knots.push_back(i == pieces ? u.knot(j + 1) : u.knot(j) + u.duration(j) * i / pieces);
      values.push_back(u.value(j));
    }
  }
  knots.back() = 1.0;

  // A piece keeps one control value, so its speed follows N along the
  // curve. Bisect pieces whose speed varies by more than 1% until the cap.
  constexpr double kSpeedTol = 0.01;
  const std::size_t cap = std::max<std::size_t>(4096, 4 * values.size());
  Trajectory fine = endpoint(o, f, PiecewiseConstantControl(knots, values), options);
  for (int round = 0; round < 16 && norm.position_dependent(); ++round) {
    std::vector<double> next_knots{0.0};
    std::vector<Vec> next_values;
    bool split = false;
    for (std::size_t j = 0; j < values.size(); ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      if (!values[j].isZero(0.0)) {
        for (std::size_t i = fine.segment_start[j]; i <= fine.segment_start[j + 1]; ++i) {
          const double speed = norm(fine.points[i], values[j]);
          lo = std::min(lo, speed);
          hi = std::max(hi, speed);
        }
      }
      if (hi > 0.0 && hi - lo > kSpeedTol * hi && values.size() + next_values.size() - j < cap) {
        next_knots.push_back(0.5 * (knots[j] + knots[j + 1]));
        next_values.push_back(values[j]);
        split = true;
      }
      next_knots.push_back(knots[j + 1]);
      next_values.push_back(values[j]);
    }
    if (!split) break;
    knots = std::move(next_knots);
    values = std::move(next_values);
    fine = endpoint(o, f, PiecewiseConstantControl(knots, values), options);
  }

  // Speed integral of every piece, i.e. the psi increments times l.
  std::vector<double> piece_length(values.size(), 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const Vec& value = values[j];
    if (value.isZero(0.0)) continue;
    double acc = 0.0;
    double previous = norm(fine.points[fine.segment_start[j]], value);
    for (std::size_t i = fine.segment_start[j] + 1; i <= fine.segment_start[j + 1]; ++i) {
      const double current = norm(fine.points[i], value);
      acc += 0.5 * (fine.times[i] - fine.times[i - 1]) * (previous + current);
      previous = current;
    }
    piece_length[j] = acc;
    sum += acc;
  }

  std::vector<double> out_knots{0.0};
  std::vector<Vec> out_values;
  double elapsed = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (piece_length[j] <= 1e-15 * sum) continue;
    const double ds = piece_length[j] / sum;
    const double dt = knots[j + 1] - knots[j];
    elapsed += ds;
    out_knots.push_back(elapsed);
    out_values.push_back(values[j] * (dt / ds));
  }
  out_knots.back() = 1.0;
  PiecewiseConstantControl v(std::move(out_knots), std::move(out_values));
  Trajectory traj = endpoint(o, f, v, options);
  return {std::move(v), std::move(traj), false};
}

namespace {

std::uint64_t hash_doubles(std::uint64_t h, const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::uint64_t bits = 0;
    const double d = x(i);
    std::memcpy(&bits, &d, sizeof bits);
    h = mix_seed(h, bits);
  }
  return h;
}

// Minimizes phi along w + t d by bracketing then golden section.
double line_minimize(const std::function<double(const VecX&)>& phi, VecX& w, double& value,
                     const VecX& d, double scale) {
  auto along = [&](double t) { return phi(w + t * d); };
  double step = scale;
  double lo = -step, hi = step;
  for (int i = 0; i < 60 && along(hi) < value; ++i) hi *= 2.0;
  for (int i = 0; i < 60 && along(lo) < value; ++i) lo *= 2.0;
  double best = value;
  const double t = golden_section(along, lo, hi, 1e-13 * std::max(1.0, hi - lo), &best);
  if (best < value) {
    w += t * d;
    value = best;
  }
  return value;
}

}  // namespace

FiberSolveResult fiber_metric(const Vec& p, const Vec& v, const VectorFieldStructure& f,
                              const VaryingNorm& norm, const FiberOptions& options) {
  if (p.size() != f.dim_m() || v.size() != f.dim_m() || norm.dim_k() != f.dim_k()) {
    throw DimensionMismatch("fiber_metric dimensions disagree");
  }
  const Mat a = f.checked(p);
  const int k = f.dim_k();
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sing = svd.singularValues();
  const double top = sing.size() ? sing(0) : 0.0;
  int rank = 0;
  const double cutoff = top * 1e-13 * std::max(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < sing.size(); ++i) {
    if (sing(i) > cutoff && sing(i) > 0.0) ++rank;
  }

  FiberSolveResult result;
  Vec u0 = Vec::Zero(k);
  if (rank > 0) {
    const Vec coeffs = svd.matrixU().leftCols(rank).transpose() * v;
    for (int i = 0; i < rank; ++i) {
      u0 += svd.matrixV().col(i) * (coeffs(i) / sing(i));
    }
    result.condition = top / sing(rank - 1);
  } else {
    result.condition = std::numeric_limits<double>::infinity();
  }
  result.ill_conditioned = result.condition > 1e12;
  result.residual = (a * u0 - v).norm();
  if (result.residual > options.tol * std::max(1.0, v.norm())) {
    result.finite = false;
    return result;
  }
  result.finite = true;

  const int nullity = k - rank;
  if (nullity == 0 || norm.is_scaled_euclidean()) {
    result.value = norm(p, u0);
    result.minimizer = u0;
    return result;
  }
  const MatX z = svd.matrixV().rightCols(nullity);

  if (norm.kind() == NormKind::kEllipsoid) {
    const MatX q = norm.q_matrix();
    const MatX zqz = z.transpose() * q * z;
    const VecX rhs = -(z.transpose() * (q * VecX(u0)));
    const VecX w = zqz.ldlt().solve(rhs);
    const Vec u = u0 + z * w;
    result.value = norm(p, u);
    result.minimizer = u;
    return result;
  }

  auto phi = [&](const VecX& w) { return norm(p, Vec(u0 + z * w)); };
  const double scale = std::max(1.0, VecX(u0).norm());
  Rng rng(hash_doubles(hash_doubles(0x5eedULL, p), v));

  double best = phi(VecX::Zero(nullity));
  VecX best_w = VecX::Zero(nullity);
  for (int start = 0; start < std::max(1, options.starts); ++start) {
    VecX w = VecX::Zero(nullity);
    if (start > 0) {
      for (int i = 0; i < nullity; ++i) w(i) = scale * rng.normal();
    }
    double value = phi(w);
    if (nullity >= 2) {
      SimplexOptions simplex;
      simplex.initial_step = 0.5 * scale;
      simplex.max_evaluations = 4000;
      simplex.value_tol = 1e-15;
      simplex.size_tol = 1e-13 * scale;
      MinimizeResult r = minimize_simplex(phi, w, simplex);
      w = r.x;
      value = r.value;
    }
    // Line-search sweeps over axes and random directions.
    for (int sweep = 0; sweep < 60; ++sweep) {
      const double before = value;
      for (int i = 0; i < nullity; ++i) {
        VecX d = VecX::Zero(nullity);
        d(i) = 1.0;
        line_minimize(phi, w, value, d, 0.25 * scale);
      }
      for (int r = 0; r < (nullity >= 2 ? 2 * nullity : 0); ++r) {
        VecX d(nullity);
        for (int i = 0; i < nullity; ++i) d(i) = rng.normal();
        d.normalize();
        line_minimize(phi, w, value, d, 0.25 * scale);
      }
      if (before - value <= 1e-15 * std::max(1.0, value)) break;
    }
    if (value < best) {
      best = value;
      best_w = w;
    }
  }
  result.value = best;
  result.minimizer = Vec(u0 + z * best_w);
  return result;
}

}  // namespace ccdist
