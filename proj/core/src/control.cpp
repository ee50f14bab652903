#include "ccdist/control.hpp"

#include <algorithm>
#include <cmath>

#include "ccdist/errors.hpp"

namespace ccdist {

namespace {

std::vector<double> uniform_knots(std::size_t segments) {
  std::vector<double> knots(segments + 1);
  for (std::size_t j = 0; j <= segments; ++j) {
    knots[j] = static_cast<double>(j) / static_cast<double>(segments);
  }
  knots.back() = 1.0;
  return knots;
}

}  // namespace

PiecewiseConstantControl::PiecewiseConstantControl(std::vector<Vec> values)
    : knots_(uniform_knots(values.size())), values_(std::move(values)) {
  validate();
}

PiecewiseConstantControl::PiecewiseConstantControl(std::vector<double> knots,
                                                   std::vector<Vec> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  validate();
}

void PiecewiseConstantControl::validate() const {
  if (values_.empty()) throw InvalidArgument("control needs at least one segment");
  if (knots_.size() != values_.size() + 1) {
    throw InvalidArgument("control knots must number segments + 1");
  }
  if (knots_.front() != 0.0 || knots_.back() != 1.0) {
    throw InvalidArgument("control knots must start at 0 and end at 1");
  }
  for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
    if (!(knots_[j] < knots_[j + 1])) {
      throw InvalidArgument("control knots must be strictly increasing");
    }
  }
  const auto k = values_.front().size();
  for (const Vec& v : values_) {
    if (v.size() != k || k == 0) throw DimensionMismatch("control values differ in dimension");
    if (!v.allFinite()) throw InvalidArgument("control values must be finite");
  }
}

PiecewiseConstantControl PiecewiseConstantControl::zero(int dim_k, int segments) {
  return PiecewiseConstantControl(
      std::vector<Vec>(static_cast<std::size_t>(segments), Vec::Zero(dim_k)));
}

PiecewiseConstantControl PiecewiseConstantControl::constant(const Vec& value,
                                                            int segments) {
  return PiecewiseConstantControl(
      std::vector<Vec>(static_cast<std::size_t>(segments), value));
}

PiecewiseConstantControl PiecewiseConstantControl::from_packed(const VecX& packed,
                                                               int dim_k) {
  if (dim_k <= 0 || packed.size() % dim_k != 0 || packed.size() == 0) {
    throw DimensionMismatch("packed control length is not a multiple of k");
  }
  const auto segments = packed.size() / dim_k;
  std::vector<Vec> values(static_cast<std::size_t>(segments));
  for (Eigen::Index j = 0; j < segments; ++j) {
    values[static_cast<std::size_t>(j)] = packed.segment(j * dim_k, dim_k);
  }
  return PiecewiseConstantControl(std::move(values));
}

bool PiecewiseConstantControl::is_uniform() const {
  const double k = static_cast<double>(values_.size());
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    if (std::abs(knots_[j] - static_cast<double>(j) / k) > 1e-15) return false;
  }
  return true;
}

int PiecewiseConstantControl::segment_at(double t) const {
  if (t <= 0.0) return 0;
  if (t >= 1.0) return segments() - 1;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  return std::clamp(static_cast<int>(it - knots_.begin()) - 1, 0, segments() - 1);
}

Vec PiecewiseConstantControl::at(double t) const { return value(segment_at(t)); }

double PiecewiseConstantControl::sup_norm() const {
  double best = 0.0;
  for (const Vec& v : values_) best = std::max(best, v.norm());
  return best;
}

VecX PiecewiseConstantControl::packed() const {
  const int k = dim_k();
  VecX out(static_cast<Eigen::Index>(values_.size()) * k);
  for (std::size_t j = 0; j < values_.size(); ++j) {
    out.segment(static_cast<Eigen::Index>(j) * k, k) = values_[j];
  }
  return out;
}

PiecewiseConstantControl PiecewiseConstantControl::scaled(double s) const {
  std::vector<Vec> values = values_;
  for (Vec& v : values) v *= s;
  return PiecewiseConstantControl(knots_, std::move(values));
}

PiecewiseConstantControl PiecewiseConstantControl::resampled_uniform(int segments) const {
  std::vector<Vec> values(static_cast<std::size_t>(segments));
  for (int j = 0; j < segments; ++j) {
    values[static_cast<std::size_t>(j)] = at((j + 0.5) / segments);
  }
  return PiecewiseConstantControl(std::move(values));
}

PiecewiseConstantControl PiecewiseConstantControl::averaged_uniform(int segments) const {
  std::vector<Vec> values(static_cast<std::size_t>(segments), Vec::Zero(dim_k()));
  for (int j = 0; j < segments; ++j) {
    const double a = static_cast<double>(j) / segments;
    const double b = static_cast<double>(j + 1) / segments;
    Vec acc = Vec::Zero(dim_k());
    for (int s = segment_at(a); s < this->segments(); ++s) {
      const double lo = std::max(a, knot(s));
      const double hi = std::min(b, knot(s + 1));
      if (lo >= b) break;
      if (hi > lo) acc += (hi - lo) * value(s);
    }
    values[static_cast<std::size_t>(j)] = acc * segments;
  }
  return PiecewiseConstantControl(std::move(values));
}

PiecewiseConstantControl PiecewiseConstantControl::concatenate(
    const std::vector<PiecewiseConstantControl>& parts) {
  if (parts.empty()) throw InvalidArgument("concatenate needs at least one part");
  const double n = static_cast<double>(parts.size());
  std::vector<double> knots{0.0};
  std::vector<Vec> values;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = parts[i];
    for (int j = 0; j < part.segments(); ++j) {
      const double end = (static_cast<double>(i) + part.knot(j + 1)) / n;
      knots.push_back(end);
      values.push_back(part.value(j) * n);
    }
  }
  knots.back() = 1.0;
  return PiecewiseConstantControl(std::move(knots), std::move(values));
}

PiecewiseConstantControl PiecewiseConstantControl::restricted(double a, double b) const {
  if (!(0.0 <= a && a < b && b <= 1.0)) {
    throw InvalidArgument("restricted: need 0 <= a < b <= 1");
  }
  const double width = b - a;
  std::vector<double> knots{0.0};
  std::vector<Vec> values;
  for (int s = 0; s < segments(); ++s) {
    const double lo = std::max(a, knot(s));
    const double hi = std::min(b, knot(s + 1));
    if (hi - lo <= 1e-15 * width) continue;
    knots.push_back((hi - a) / width);
    values.push_back(value(s) * width);
  }
  knots.back() = 1.0;
  return PiecewiseConstantControl(std::move(knots), std::move(values));
}

bool PiecewiseConstantControl::operator==(const PiecewiseConstantControl& other) const {
  if (knots_ != other.knots_ || values_.size() != other.values_.size()) return false;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (values_[j] != other.values_[j]) return false;
  }
  return true;
}

}  // namespace ccdist
