#include "ccdist/structure.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ccdist/errors.hpp"
#include "ccdist/rng.hpp"

namespace ccdist {

VectorFieldStructure::VectorFieldStructure(int dim_m, int dim_k, Evaluator eval)
    : VectorFieldStructure(dim_m, dim_k, std::move(eval), Options{}) {}

VectorFieldStructure::VectorFieldStructure(int dim_m, int dim_k, Evaluator eval,
                                           Options options)
    : dim_m_(dim_m), dim_k_(dim_k), eval_(std::move(eval)), options_(std::move(options)) {
  if (dim_m < 1 || dim_k < 1 || dim_m > kMaxDim || dim_k > kMaxDim) {
    throw InvalidArgument("structure dimensions must lie in [1, " +
                          std::to_string(kMaxDim) + "]");
  }
  if (!eval_) throw InvalidArgument("structure needs an evaluator");
  if (options_.lipschitz_hint && *options_.lipschitz_hint < 0.0) {
    throw InvalidArgument("lipschitz_hint must be nonnegative");
  }
}

Mat VectorFieldStructure::control_jacobian(const Vec& p, const Vec& u) const {
  if (options_.jacobian) return options_.jacobian(p, u);
  Mat jac(dim_m_, dim_m_);
  Vec probe = p;
  for (int c = 0; c < dim_m_; ++c) {
    const double h = 1e-6 * std::max(1.0, std::abs(p(c)));
    probe(c) = p(c) + h;
    const Vec plus = eval_(probe) * u;
    probe(c) = p(c) - h;
    const Vec minus = eval_(probe) * u;
    probe(c) = p(c);
    jac.col(c) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

Mat VectorFieldStructure::checked(const Vec& p) const {
  if (p.size() != dim_m_) {
    throw DimensionMismatch("point " + format_point(p) + " has wrong dimension");
  }
  Mat a = eval_(p);
  if (a.rows() != dim_m_ || a.cols() != dim_k_) {
    throw DimensionMismatch("structure returned a matrix of the wrong shape at " +
                            format_point(p));
  }
  if (!a.allFinite()) {
    throw EvaluationFailure("non-finite structure value at " + format_point(p));
  }
  return a;
}

VectorFieldStructure VectorFieldStructure::with_options(Options options) const {
  return VectorFieldStructure(dim_m_, dim_k_, eval_, std::move(options));
}

VectorFieldStructure constant_structure(const Mat& a, std::string name) {
  const auto m = static_cast<int>(a.rows());
  VectorFieldStructure::Options options;
  options.lipschitz_hint = 0.0;
  options.name = std::move(name);
  options.jacobian = [m](const Vec&, const Vec&) -> Mat { return Mat::Zero(m, m); };
  return VectorFieldStructure(m, static_cast<int>(a.cols()),
                              [a](const Vec&) { return a; }, std::move(options));
}

VectorFieldStructure identity_structure(int dim, std::string name) {
  return constant_structure(Mat::Identity(dim, dim), std::move(name));
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::kEuclidean: return "euclidean";
    case NormKind::kWeightedLp: return "weighted-lp";
    case NormKind::kEllipsoid: return "ellipsoid";
    case NormKind::kCustom: return "custom";
  }
  return "unknown";
}

VaryingNorm VaryingNorm::euclidean(int dim_k) {
  if (dim_k < 1 || dim_k > kMaxDim) throw InvalidArgument("norm dimension out of range");
  VaryingNorm n(dim_k, NormKind::kEuclidean);
  n.name_ = "euclidean";
  return n;
}

VaryingNorm VaryingNorm::weighted_lp(Vec weights, double q) {
  const auto k = static_cast<int>(weights.size());
  if (k < 1 || k > kMaxDim) throw InvalidArgument("norm dimension out of range");
  if (!(q >= 1.0)) throw InvalidArgument("weighted-lp exponent must be >= 1");
  if ((weights.array() <= 0.0).any() || !weights.allFinite()) {
    throw InvalidArgument("weighted-lp weights must be positive and finite");
  }
  VaryingNorm n(k, NormKind::kWeightedLp);
  n.weights_ = std::move(weights);
  n.exponent_ = q;
  n.name_ = "weighted-lp";
  return n;
}

VaryingNorm VaryingNorm::ellipsoid(Mat q_matrix) {
  const auto k = static_cast<int>(q_matrix.rows());
  if (k < 1 || k > kMaxDim || q_matrix.cols() != k) {
    throw InvalidArgument("ellipsoid matrix must be square");
  }
  if (!q_matrix.isApprox(q_matrix.transpose(), 1e-12)) {
    throw InvalidArgument("ellipsoid matrix must be symmetric");
  }
  Eigen::LLT<Mat> llt(q_matrix);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("ellipsoid matrix must be positive definite");
  }
  VaryingNorm n(k, NormKind::kEllipsoid);
  n.q_matrix_ = std::move(q_matrix);
  n.name_ = "ellipsoid";
  return n;
}

VaryingNorm VaryingNorm::custom(int dim_k, Custom eval, std::string name) {
  if (dim_k < 1 || dim_k > kMaxDim) throw InvalidArgument("norm dimension out of range");
  if (!eval) throw InvalidArgument("custom norm needs an evaluator");
  VaryingNorm n(dim_k, NormKind::kCustom);
  n.custom_ = std::move(eval);
  n.name_ = std::move(name);
  return n;
}

VaryingNorm VaryingNorm::with_scale(Scale scale) const {
  VaryingNorm n = *this;
  if (scale_) {
    auto inner = scale_;
    n.scale_ = [inner, scale](const Vec& p) { return inner(p) * scale(p); };
  } else {
    n.scale_ = std::move(scale);
  }
  return n;
}

VaryingNorm VaryingNorm::pulled_back(std::function<Vec(const Vec&)> phi) const {
  VaryingNorm n = *this;
  if (scale_) {
    auto inner = scale_;
    n.scale_ = [inner, phi](const Vec& p) { return inner(phi(p)); };
  }
  if (custom_) {
    auto inner = custom_;
    n.custom_ = [inner, phi](const Vec& p, const Vec& u) { return inner(phi(p), u); };
  }
  return n;
}

double VaryingNorm::base(const Vec& u) const {
  switch (kind_) {
    case NormKind::kEuclidean:
      return u.norm();
    case NormKind::kEllipsoid:
      return std::sqrt(std::max(0.0, u.dot(q_matrix_ * u)));
    case NormKind::kWeightedLp: {
      if (std::isinf(exponent_)) {
        return (weights_.array() * u.array().abs()).maxCoeff();
      }
      if (exponent_ == 1.0) return (weights_.array() * u.array().abs()).sum();
      // Scale by the largest entry to avoid overflow in |u|^q.
      const double top = (weights_.array() * u.array().abs()).maxCoeff();
      if (top == 0.0) return 0.0;
      double acc = 0.0;
      for (int i = 0; i < dim_k_; ++i) {
        acc += weights_(i) * std::pow(std::abs(u(i)) / top, exponent_);
      }
      return top * std::pow(acc, 1.0 / exponent_);
    }
    case NormKind::kCustom:
      break;
  }
  return 0.0;
}

double VaryingNorm::operator()(const Vec& p, const Vec& u) const {
  const double b = kind_ == NormKind::kCustom ? custom_(p, u) : base(u);
  return scale_ ? scale_(p) * b : b;
}

Vec VaryingNorm::squared_grad_u(const Vec& p, const Vec& u) const {
  const double s = scale(p);
  const double s2 = s * s;
  switch (kind_) {
    case NormKind::kEuclidean:
      return 2.0 * s2 * u;
    case NormKind::kEllipsoid:
      return 2.0 * s2 * (q_matrix_ * u);
    case NormKind::kWeightedLp: {
      const double b = base(u);
      Vec g = Vec::Zero(dim_k_);
      if (b == 0.0) return g;
      if (std::isinf(exponent_)) {
        Eigen::Index arg = 0;
        (weights_.array() * u.array().abs()).maxCoeff(&arg);
        g(arg) = weights_(arg) * (u(arg) >= 0.0 ? 1.0 : -1.0);
      } else {
        for (int i = 0; i < dim_k_; ++i) {
          const double a = std::abs(u(i));
          if (a == 0.0) continue;
          const double sign = u(i) > 0.0 ? 1.0 : -1.0;
          g(i) = weights_(i) * std::pow(a / b, exponent_ - 1.0) * sign;
        }
      }
      return 2.0 * s2 * b * g;
    }
    case NormKind::kCustom:
      break;
  }
  Vec g(dim_k_);
  Vec probe = u;
  for (int i = 0; i < dim_k_; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(u(i)));
    probe(i) = u(i) + h;
    const double plus = (*this)(p, probe);
    probe(i) = u(i) - h;
    const double minus = (*this)(p, probe);
    probe(i) = u(i);
    g(i) = (plus * plus - minus * minus) / (2.0 * h);
  }
  return g;
}

Vec VaryingNorm::squared_grad_p(const Vec& p, const Vec& u, int dim_m) const {
  Vec g = Vec::Zero(dim_m);
  if (!position_dependent()) return g;
  Vec probe = p;
  for (int i = 0; i < dim_m; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(p(i)));
    probe(i) = p(i) + h;
    const double plus = (*this)(probe, u);
    probe(i) = p(i) - h;
    const double minus = (*this)(probe, u);
    probe(i) = p(i);
    g(i) = (plus * plus - minus * minus) / (2.0 * h);
  }
  return g;
}

namespace {

Vec uniform_point(Rng& rng, const ChartBox& box) {
  Vec p(box.dim());
  for (int i = 0; i < box.dim(); ++i) p(i) = rng.uniform(box.lower()(i), box.upper()(i));
  return p;
}

}  // namespace

StructureReport validate_structure(const VectorFieldStructure& f,
                                   const ChartBox& box, int samples,
                                   std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("validate_structure needs samples >= 2");
  if (box.dim() != f.dim_m()) throw DimensionMismatch("box and structure dimensions differ");

  StructureReport report;
  report.samples = samples;
  report.seed = seed;

  auto op_norm_at = [&](const Vec& p) { return operator_norm(f.checked(p)); };

  const int m = box.dim();
  for (int mask = 0; mask < (1 << m); ++mask) {
    Vec corner(m);
    for (int i = 0; i < m; ++i) {
      corner(i) = (mask >> i) & 1 ? box.upper()(i) : box.lower()(i);
    }
    report.max_operator_norm = std::max(report.max_operator_norm, op_norm_at(corner));
  }
  report.max_operator_norm = std::max(report.max_operator_norm, op_norm_at(box.center()));

  Rng rng(seed);
  const double step = 1e-3 * box.diameter();
  auto quotient = [&](const Vec& p, const Mat& ap, const Vec& q) {
    const double dist = (p - q).norm();
    if (dist <= 0.0) return 0.0;
    return operator_norm(ap - f.checked(q)) / dist;
  };

  Vec previous;
  for (int s = 0; s < samples; ++s) {
    const Vec p = uniform_point(rng, box);
    const Mat ap = f.checked(p);
    report.max_operator_norm = std::max(report.max_operator_norm, operator_norm(ap));

    Vec direction = Vec::Zero(m);
    if (s % 2 == 0) {
      direction(s / 2 % m) = 1.0;
    } else {
      direction = rng.unit_vector(m);
    }
    Vec partner = box.clamp(p + step * direction);
    if ((partner - p).norm() < 0.5 * step) partner = box.clamp(p - step * direction);
    report.lipschitz = std::max(report.lipschitz, quotient(p, ap, partner));
    if (s > 0) report.lipschitz = std::max(report.lipschitz, quotient(p, ap, previous));
    previous = p;
  }

  if (f.lipschitz_hint()) {
    report.hint_respected = report.lipschitz <= *f.lipschitz_hint() * (1.0 + 1e-6) + 1e-12;
  }
  return report;
}

NormAxiomReport check_norm_axioms(const VaryingNorm& norm, const ChartBox& box,
                                  int samples, std::uint64_t seed) {
  Rng rng(seed);
  NormAxiomReport report;
  report.min_unit_value = std::numeric_limits<double>::infinity();
  const int k = norm.dim_k();
  for (int s = 0; s < samples; ++s) {
    const Vec p = uniform_point(rng, box);
    Vec u(k), w(k);
    for (int i = 0; i < k; ++i) {
      u(i) = rng.normal();
      w(i) = rng.normal();
    }
    const double lambda = rng.uniform(-3.0, 3.0);
    const double nu = norm(p, u);
    const double nw = norm(p, w);
    if (!std::isfinite(nu) || !std::isfinite(nw)) {
      throw EvaluationFailure("non-finite norm value at " + format_point(p));
    }
    const double hom = std::abs(norm(p, Vec(lambda * u)) - std::abs(lambda) * nu) /
                       std::max(1.0, std::abs(lambda) * nu);
    report.max_homogeneity_error = std::max(report.max_homogeneity_error, hom);
    report.max_triangle_excess =
        std::max(report.max_triangle_excess, norm(p, Vec(u + w)) - nu - nw);
    report.min_unit_value = std::min(report.min_unit_value, norm(p, Vec(u / u.norm())));
  }
  report.ok = report.max_homogeneity_error <= 1e-10 &&
              report.max_triangle_excess <= 1e-10 && report.min_unit_value > 0.0;
  return report;
}

}  // namespace ccdist
