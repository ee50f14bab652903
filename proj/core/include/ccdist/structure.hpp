#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ccdist/chart_box.hpp"
#include "ccdist/linalg.hpp"

namespace ccdist {

// Lipschitz vector-field structure: p -> A(p), an m x k matrix whose columns
// are the frame fields X_i(p) = f(p)(e_i).
class VectorFieldStructure {
 public:
  using Evaluator = std::function<Mat(const Vec&)>;
  // Returns d/dp [A(p) u] as an m x m matrix.
  using ControlJacobian = std::function<Mat(const Vec&, const Vec&)>;

  struct Options {
    std::optional<double> lipschitz_hint;
    bool smooth = true;
    ControlJacobian jacobian;  // optional analytic derivative
    std::string name;
  };

  VectorFieldStructure(int dim_m, int dim_k, Evaluator eval);
  VectorFieldStructure(int dim_m, int dim_k, Evaluator eval, Options options);

  int dim_m() const { return dim_m_; }
  int dim_k() const { return dim_k_; }
  bool smooth() const { return options_.smooth; }
  const std::optional<double>& lipschitz_hint() const {
    return options_.lipschitz_hint;
  }
  const std::string& name() const { return options_.name; }
  bool has_analytic_jacobian() const {
    return static_cast<bool>(options_.jacobian);
  }

  Mat operator()(const Vec& p) const { return eval_(p); }
  Mat matrix(const Vec& p) const { return eval_(p); }
  // f(p)(u) = A(p) u.
  Vec apply(const Vec& p, const Vec& u) const { return eval_(p) * u; }
  // X_i(p), zero-based index.
  Vec field(const Vec& p, int i) const { return eval_(p).col(i); }

  // d/dp [A(p) u]; analytic when supplied, central differences otherwise.
  Mat control_jacobian(const Vec& p, const Vec& u) const;

  // Evaluates and throws EvaluationFailure naming p on non-finite output.
  Mat checked(const Vec& p) const;

  // Returns a copy whose options are replaced.
  VectorFieldStructure with_options(Options options) const;

 private:
  int dim_m_;
  int dim_k_;
  Evaluator eval_;
  Options options_;
};

// Constant frame p -> a.
VectorFieldStructure constant_structure(const Mat& a, std::string name = "constant");
VectorFieldStructure identity_structure(int dim, std::string name = "identity");

enum class NormKind { kEuclidean, kWeightedLp, kEllipsoid, kCustom };

const char* to_string(NormKind kind);

// Continuously varying norm N(p, u). Structured kinds are
// N(p,u) = scale(p) * base(u) with base Euclidean, weighted l^q, or
// sqrt(u^T Q u); custom kinds evaluate an arbitrary callable.
class VaryingNorm {
 public:
  using Scale = std::function<double(const Vec&)>;
  using Custom = std::function<double(const Vec&, const Vec&)>;

  static VaryingNorm euclidean(int dim_k);
  // (sum w_i |u_i|^q)^(1/q); q = +inf gives max w_i |u_i|.
  static VaryingNorm weighted_lp(Vec weights, double q);
  static VaryingNorm ellipsoid(Mat q_matrix);
  static VaryingNorm custom(int dim_k, Custom eval, std::string name = "custom");

  // scale(p) * this(p, u); scale must be positive and continuous.
  VaryingNorm with_scale(Scale scale) const;
  // p -> N(phi(p), u), e.g. N_eps(p,v) = N(delta_eps p, v).
  VaryingNorm pulled_back(std::function<Vec(const Vec&)> phi) const;

  int dim_k() const { return dim_k_; }
  NormKind kind() const { return kind_; }
  bool position_dependent() const { return static_cast<bool>(scale_) || kind_ == NormKind::kCustom; }
  // True when N(p,.) is a positive multiple of the Euclidean norm.
  bool is_scaled_euclidean() const { return kind_ == NormKind::kEuclidean; }
  double exponent() const { return exponent_; }
  const Vec& weights() const { return weights_; }
  const Mat& q_matrix() const { return q_matrix_; }

  double operator()(const Vec& p, const Vec& u) const;
  double scale(const Vec& p) const { return scale_ ? scale_(p) : 1.0; }
  // Gradient of N^2 with respect to u and p (analytic where available).
  Vec squared_grad_u(const Vec& p, const Vec& u) const;
  Vec squared_grad_p(const Vec& p, const Vec& u, int dim_m) const;

 private:
  VaryingNorm(int dim_k, NormKind kind) : dim_k_(dim_k), kind_(kind) {}

  double base(const Vec& u) const;

  int dim_k_;
  NormKind kind_;
  double exponent_ = 2.0;
  Vec weights_;
  Mat q_matrix_;
  Scale scale_;
  Custom custom_;
  std::string name_;
};

struct StructureReport {
  double max_operator_norm = 0.0;  // H
  double lipschitz = 0.0;          // L, sampled difference quotient
  int samples = 0;
  std::uint64_t seed = 0;
  bool hint_respected = true;      // L <= hint * (1 + 1e-6) when declared
};

// Samples the constants H = max |A(p)|_op and L = max |A(p)-A(q)|_op/|p-q|
// on the box. Sample set: box corners, center, `samples` uniform points and
// a short-displacement partner for each uniform point.
StructureReport validate_structure(const VectorFieldStructure& f,
                                   const ChartBox& box, int samples,
                                   std::uint64_t seed);

struct NormAxiomReport {
  double max_homogeneity_error = 0.0;
  double max_triangle_excess = 0.0;  // max N(u+w) - N(u) - N(w)
  double min_unit_value = 0.0;       // min N(p,u) over |u| = 1
  bool ok = true;
};

NormAxiomReport check_norm_axioms(const VaryingNorm& norm, const ChartBox& box,
                                  int samples, std::uint64_t seed);

}  // namespace ccdist
