#include "ccdist/topology.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ccdist/errors.hpp"
#include "ccdist/parallel.hpp"

namespace ccdist {

DegreeReport winding_number(const PlanarMap& map, const Eigen::Vector2d& center, double radius,
                            int samples, double gap_tol) {
  if (samples < 16) throw InvalidArgument("winding_number needs samples >= 16");
  if (!(radius > 0.0)) throw InvalidArgument("winding_number needs radius > 0");
  const Eigen::Vector2d base = map(center);
  if (!base.allFinite()) throw EvaluationFailure("planar map is not finite at the center");

  std::vector<Eigen::Vector2d> image(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(s) / samples;
    image[s] = map(center + radius * Eigen::Vector2d(std::cos(theta), std::sin(theta))) - base;
  });

  DegreeReport report;
  report.samples = samples;
  report.min_boundary_gap = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::Vector2d& a = image[static_cast<std::size_t>(s)];
    const Eigen::Vector2d& b = image[static_cast<std::size_t>((s + 1) % samples)];
    if (!a.allFinite()) throw EvaluationFailure("planar map is not finite on the circle");
    report.min_boundary_gap = std::min(report.min_boundary_gap, a.norm());
    report.max_sample_jump = std::max(report.max_sample_jump, (b - a).norm());
    const double step = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    report.max_angle_step = std::max(report.max_angle_step, std::abs(step));
    total += step;
  }
  if (report.min_boundary_gap <= gap_tol) {
    report.winding = 0;
    report.reliable = false;
    return report;
  }
  report.winding = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
  report.reliable = report.min_boundary_gap > 3.0 * report.max_sample_jump &&
                    report.max_angle_step <= 0.5 * std::numbers::pi;
  return report;
}

OpennessProbe essential_openness_probe(const Vec& o, const VectorFieldStructure& f,
                                       const std::vector<int>& sigma, const Vec& t_center,
                                       double radius, int resolution,
                                       const EndpointOptions& options) {
  if (f.dim_m() != 2) throw DimensionMismatch("openness probe is planar only (m = 2)");
  if (sigma.size() != 2 || t_center.size() != 2) {
    throw DimensionMismatch("openness probe needs two flow indices and a 2-vector of times");
  }
  PlanarMap phi = [&](const Eigen::Vector2d& t) -> Eigen::Vector2d {
    const Vec x = flow_composition(o, f, sigma, make_vec({t.x(), t.y()}), options);
    return {x(0), x(1)};
  };
  OpennessProbe probe;
  probe.degree = winding_number(phi, Eigen::Vector2d(t_center(0), t_center(1)), radius, resolution);
  probe.margin = probe.degree.min_boundary_gap;
  probe.open_at_scale = probe.degree.winding != 0 && probe.degree.reliable;
  return probe;
}

namespace {

using Field = std::function<Vec(const Vec&)>;

// D V(p) w by central differences along w.
Vec directional(const Field& v, const Vec& p, const Vec& w, double h, bool richardson) {
  const double n = w.norm();
  if (n == 0.0) return Vec::Zero(p.size());
  const Vec dir = w / n;
  auto central = [&](double step) {
    return Vec((v(Vec(p + step * dir)) - v(Vec(p - step * dir))) / (2.0 * step));
  };
  Vec d = central(h);
  if (richardson) d = (4.0 * central(0.5 * h) - d) / 3.0;
  return n * d;
}

std::vector<std::vector<Field>> bracket_levels(const VectorFieldStructure& f, int depth,
                                               const BracketOptions& options) {
  if (!f.smooth()) throw InvalidArgument("bracket probes need a structure flagged smooth");
  if (depth < 1) throw InvalidArgument("bracket depth must be >= 1");
  if (!(options.h > 1e-6 && options.h < 1e-2)) {
    throw InvalidArgument("bracket step h must lie in (1e-6, 1e-2)");
  }
  std::vector<std::vector<Field>> levels(1);
  for (int i = 0; i < f.dim_k(); ++i) {
    levels[0].push_back([&f, i](const Vec& p) { return f.field(p, i); });
  }
  const double h = options.h;
  const bool rich = options.richardson;
  for (int d = 1; d < depth; ++d) {
    std::vector<Field> next;
    for (const Field& x : levels[0]) {
      for (const Field& y : levels[static_cast<std::size_t>(d) - 1]) {
        // [X, Y] = DY X - DX Y
        next.push_back([x, y, h, rich](const Vec& p) {
          return Vec(directional(y, p, x(p), h, rich) - directional(x, p, y(p), h, rich));
        });
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

}  // namespace

std::vector<Vec> bracket_vectors(const VectorFieldStructure& f, const Vec& p, int depth,
                                 const BracketOptions& options) {
  if (p.size() != f.dim_m()) throw DimensionMismatch("bracket point dimension differs from m");
  std::vector<Vec> out;
  for (const auto& level : bracket_levels(f, depth, options)) {
    for (const Field& v : level) out.push_back(v(p));
  }
  return out;
}

int bracket_span_rank(const VectorFieldStructure& f, const Vec& p, int depth,
                      const BracketOptions& options) {
  const std::vector<Vec> vectors = bracket_vectors(f, p, depth, options);
  MatX a(f.dim_m(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = vectors[i];
  const Eigen::JacobiSVD<MatX> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > options.relative_rank_tol * s(0)) ++rank;
  }
  return rank;
}

OpennessRadii openness_radii(double ell, double second_derivative_bound) {
  if (!(ell > 0.0)) throw InvalidArgument("openness radii need ell > 0");
  if (!(second_derivative_bound >= 0.0)) throw InvalidArgument("openness radii need L >= 0");
  OpennessRadii r;
  r.c1 = 1.0 / (2.0 * ell);
  r.c2 = second_derivative_bound > 0.0 ? 1.0 / (2.0 * ell * second_derivative_bound)
                                       : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace ccdist
