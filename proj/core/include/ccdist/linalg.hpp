#pragma once

#include <Eigen/Core>

namespace ccdist {

// Largest manifold dimension / control rank supported by the small-vector
// types. Storage is inline so the integrator never touches the heap.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim,
                          kMaxDim>;

// Packed decision vectors (segment values stacked) can be large.
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

/// Largest singular value.
double operator_norm(const Mat& a);

}  // namespace ccdist
