#pragma once

#include <string>

#include "ccdist/linalg.hpp"

namespace ccdist {

// Axis-aligned compact box in the single global chart.
class ChartBox {
 public:
  ChartBox(Vec lower, Vec upper);

  static ChartBox cube(int dim, double half_width);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  Vec center() const { return 0.5 * (lower_ + upper_); }
  Vec widths() const { return upper_ - lower_; }
  double diameter() const { return widths().norm(); }

  // Each side is pushed outwards by `factor` times the side width.
  ChartBox inflated(double factor) const;

  bool contains(const Vec& p) const;
  // Throws InvalidArgument naming `what` when p is outside.
  void require_contains(const Vec& p, const std::string& what) const;

  Vec clamp(const Vec& p) const;

 private:
  Vec lower_;
  Vec upper_;
};

std::string format_point(const Vec& p);

}  // namespace ccdist
