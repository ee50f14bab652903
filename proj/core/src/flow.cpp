#include "ccdist/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccdist/errors.hpp"

namespace ccdist {

Vec Trajectory::at(double t) const {
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[i - 1];
  const double t1 = times[i];
  const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
  return (1.0 - w) * points[i - 1] + w * points[i];
}

namespace detail {

BoxBounds make_bounds(const std::optional<ChartBox>& box, double inflation) {
  BoxBounds bounds;
  if (box) {
    // The slack keeps curves that run along a face from failing on rounding.
    const ChartBox grown = box->inflated(std::max(inflation, 1e-9));
    bounds.active = true;
    bounds.lower = grown.lower();
    bounds.upper = grown.upper();
  }
  return bounds;
}

namespace {

inline bool inside(const BoxBounds& b, const Vec& x) {
  if (!b.active) return true;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= b.lower(i) && x(i) <= b.upper(i))) return false;
  }
  return true;
}

}  // namespace

Vec rk4_step(const VectorFieldStructure& f, const Vec& x, const Vec& u, double h) {
  const Vec k1 = f(x) * u;
  const Vec k2 = f(Vec(x + 0.5 * h * k1)) * u;
  const Vec k3 = f(Vec(x + 0.5 * h * k2)) * u;
  const Vec k4 = f(Vec(x + h * k3)) * u;
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

IntegrationStatus integrate_uniform(const Vec& o, const VectorFieldStructure& f,
                                    const VecX& packed, int dim_k, int segments,
                                    int steps, const BoxBounds& bounds,
                                    std::vector<Vec>& states) {
  const auto total = static_cast<std::size_t>(segments) * static_cast<std::size_t>(steps) + 1;
  states.resize(total);
  states[0] = o;
  const double h = 1.0 / (static_cast<double>(segments) * steps);
  std::size_t s = 0;
  Vec u(dim_k);
  for (int j = 0; j < segments; ++j) {
    u = packed.segment(static_cast<Eigen::Index>(j) * dim_k, dim_k);
    const bool still = u.isZero(0.0);
    for (int i = 0; i < steps; ++i, ++s) {
      if (still) {
        states[s + 1] = states[s];
        continue;
      }
      states[s + 1] = rk4_step(f, states[s], u, h);
      if (!states[s + 1].allFinite()) return IntegrationStatus::kNonFinite;
      if (!inside(bounds, states[s + 1])) return IntegrationStatus::kBoxExit;
    }
  }
  return IntegrationStatus::kOk;
}

}  // namespace detail

Trajectory endpoint(const Vec& o, const VectorFieldStructure& f,
                    const PiecewiseConstantControl& u, const EndpointOptions& options) {
  if (options.steps_per_segment < 1) throw InvalidArgument("steps_per_segment must be >= 1");
  if (o.size() != f.dim_m()) throw DimensionMismatch("start point dimension differs from m");
  if (u.dim_k() != f.dim_k()) throw DimensionMismatch("control dimension differs from k");
  if (options.box) options.box->require_contains(o, "start point");
  const detail::BoxBounds bounds = detail::make_bounds(options.box, options.inflation);

  const int steps = options.steps_per_segment;
  Trajectory traj{{}, {}, u, {}};
  const auto total = static_cast<std::size_t>(u.segments()) * static_cast<std::size_t>(steps) + 1;
  traj.times.reserve(total);
  traj.points.reserve(total);
  traj.segment_start.reserve(static_cast<std::size_t>(u.segments()) + 1);
  traj.times.push_back(0.0);
  traj.points.push_back(o);

  Vec x = o;
  for (int j = 0; j < u.segments(); ++j) {
    traj.segment_start.push_back(traj.points.size() - 1);
    const double t0 = u.knot(j);
    const double h = u.duration(j) / steps;
    const Vec& value = u.value(j);
    for (int i = 1; i <= steps; ++i) {
      x = detail::rk4_step(f, x, value, h);
      const double t = i == steps ? u.knot(j + 1) : t0 + i * h;
      if (!x.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite state at t = " << t;
        throw NonFiniteState(msg.str());
      }
      if (bounds.active) {
        for (Eigen::Index c = 0; c < x.size(); ++c) {
          if (!(x(c) >= bounds.lower(c) && x(c) <= bounds.upper(c))) {
            std::ostringstream msg;
            msg << "trajectory left the chart box at t = " << t << ", x = " << format_point(x);
            throw BoxExit(msg.str(), t);
          }
        }
      }
      traj.times.push_back(t);
      traj.points.push_back(x);
    }
  }
  traj.segment_start.push_back(traj.points.size() - 1);
  return traj;
}

Vec end_point(const Vec& o, const VectorFieldStructure& f,
              const PiecewiseConstantControl& u, const EndpointOptions& options) {
  return endpoint(o, f, u, options).end();
}

double FlowWord::total_time() const {
  double total = 0.0;
  for (const auto& [index, t] : letters) total += std::abs(t);
  return total;
}

FlowWord FlowWord::scaled(double s) const {
  FlowWord out = *this;
  for (auto& letter : out.letters) letter.second *= s;
  return out;
}

namespace {

void validate_word(const FlowWord& word, int dim_k) {
  if (word.letters.empty()) throw InvalidArgument("flow word is empty");
  for (const auto& [index, t] : word.letters) {
    if (index < 0 || index >= dim_k) {
      throw InvalidArgument("flow word field index " + std::to_string(index) + " out of range");
    }
    if (!std::isfinite(t)) throw InvalidArgument("flow word times must be finite");
  }
}

}  // namespace

PiecewiseConstantControl concat_control(const FlowWord& word, int dim_k) {
  validate_word(word, dim_k);
  const auto j = static_cast<double>(word.letters.size());
  std::vector<Vec> values;
  values.reserve(word.letters.size());
  for (const auto& [index, t] : word.letters) {
    Vec v = Vec::Zero(dim_k);
    v(index) = j * t;
    values.push_back(v);
  }
  return PiecewiseConstantControl(std::move(values));
}

PiecewiseConstantControl concat_control_unit_speed(const FlowWord& word, int dim_k) {
  validate_word(word, dim_k);
  const double total = word.total_time();
  if (total == 0.0) return PiecewiseConstantControl::zero(dim_k, static_cast<int>(word.letters.size()));
  std::vector<double> knots{0.0};
  std::vector<Vec> values;
  double elapsed = 0.0;
  for (const auto& [index, t] : word.letters) {
    if (t == 0.0) continue;
    elapsed += std::abs(t);
    knots.push_back(elapsed / total);
    Vec v = Vec::Zero(dim_k);
    v(index) = t > 0.0 ? total : -total;
    values.push_back(v);
  }
  knots.back() = 1.0;
  return PiecewiseConstantControl(std::move(knots), std::move(values));
}

Vec flow_composition(const Vec& o, const VectorFieldStructure& f,
                     const std::vector<int>& sigma, const Vec& t,
                     const EndpointOptions& options) {
  if (static_cast<int>(sigma.size()) != f.dim_m() || t.size() != f.dim_m()) {
    throw DimensionMismatch("flow_composition needs |sigma| = |t| = m");
  }
  FlowWord word;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    word.letters.emplace_back(sigma[i], t(static_cast<Eigen::Index>(i)));
  }
  return end_point(o, f, concat_control(word, f.dim_k()), options);
}

double gronwall_bound(double e, double k, double t) {
  if (k < 1e-12) return e * t;
  return e * std::expm1(k * t) / k;
}

}  // namespace ccdist
