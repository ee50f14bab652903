#include "ccdist/chart_box.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "ccdist/errors.hpp"

namespace ccdist {

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.cols() == 1) return a.col(0).norm();
  if (a.rows() == 1) return a.row(0).norm();
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

ChartBox::ChartBox(Vec lower, Vec upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw InvalidArgument("ChartBox: lower/upper dimension mismatch");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_(i) < upper_(i))) {
      throw InvalidArgument("ChartBox: lower[" + std::to_string(i) +
                            "] must be below upper");
    }
  }
}

ChartBox ChartBox::cube(int dim, double half_width) {
  return ChartBox(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
}

ChartBox ChartBox::inflated(double factor) const {
  const Vec pad = factor * widths();
  return ChartBox(lower_ - pad, upper_ + pad);
}

bool ChartBox::contains(const Vec& p) const {
  if (p.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= lower_(i) && p(i) <= upper_(i))) return false;
  }
  return true;
}

void ChartBox::require_contains(const Vec& p, const std::string& what) const {
  if (p.size() != lower_.size()) {
    throw DimensionMismatch(what + " has dimension " + std::to_string(p.size()) +
                            ", box has " + std::to_string(lower_.size()));
  }
  if (!contains(p)) {
    throw InvalidArgument(what + " " + format_point(p) + " is outside the chart box");
  }
}

Vec ChartBox::clamp(const Vec& p) const {
  return p.cwiseMax(lower_).cwiseMin(upper_);
}

std::string format_point(const Vec& p) {
  std::ostringstream out;
  out.precision(10);
  out << '(';
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) out << ", ";
    out << p(i);
  }
  out << ')';
  return out.str();
}

}  // namespace ccdist
