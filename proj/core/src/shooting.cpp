#include "ccdist/shooting.hpp"

#include <cmath>
#include <limits>

#include "ccdist/errors.hpp"

namespace ccdist {

ShootingProblem::ShootingProblem(const VectorFieldStructure& f, const VaryingNorm& norm,
                                 Vec start, Vec target, int segments, int steps,
                                 detail::BoxBounds bounds)
    : f_(f),
      norm_(norm),
      start_(std::move(start)),
      target_(std::move(target)),
      segments_(segments),
      steps_(steps),
      dim_k_(f.dim_k()),
      bounds_(std::move(bounds)) {
  if (segments_ < 1 || steps_ < 1) throw InvalidArgument("segments and steps must be >= 1");
  if (norm.dim_k() != dim_k_) throw DimensionMismatch("norm and structure dimensions differ");
  if (start_.size() != f.dim_m() || target_.size() != f.dim_m()) {
    throw DimensionMismatch("shooting end points must have dimension m");
  }
}

ShootingProblem::Evaluation ShootingProblem::evaluate(const VecX& packed) const {
  Evaluation eval;
  const auto status = detail::integrate_uniform(start_, f_, packed, dim_k_, segments_, steps_,
                                                bounds_, states_);
  if (status != detail::IntegrationStatus::kOk) return eval;
  const double h = 1.0 / (static_cast<double>(segments_) * steps_);
  double action = 0.0;
  std::size_t s = 0;
  for (int j = 0; j < segments_; ++j, s += static_cast<std::size_t>(steps_)) {
    const Vec u = packed.segment(static_cast<Eigen::Index>(j) * dim_k_, dim_k_);
    if (u.isZero(0.0)) continue;
    if (!norm_.position_dependent()) {
      const double n = norm_(start_, u);
      action += n * n * h * steps_;
      continue;
    }
    double previous = norm_(states_[s], u);
    previous *= previous;
    for (int i = 1; i <= steps_; ++i) {
      double current = norm_(states_[s + static_cast<std::size_t>(i)], u);
      current *= current;
      action += 0.5 * h * (previous + current);
      previous = current;
    }
  }
  eval.feasible = std::isfinite(action);
  eval.action = action;
  eval.residual = states_.back() - target_;
  return eval;
}

void ShootingProblem::reverse(const VecX& packed, const Vec& final_adjoint, bool with_action,
                              VecX& grad) const {
  const int m = dim_m();
  const double h = 1.0 / (static_cast<double>(segments_) * steps_);
  grad.setZero(dimension());
  Vec lambda = final_adjoint;
  const bool position = with_action && norm_.position_dependent();
  for (int j = segments_ - 1; j >= 0; --j) {
    // Zero segments are not skipped: their gradient is h A(x)^T lambda.
    const Vec u = packed.segment(static_cast<Eigen::Index>(j) * dim_k_, dim_k_);
    Vec ubar = Vec::Zero(dim_k_);
    if (with_action && !norm_.position_dependent()) {
      ubar += norm_.squared_grad_u(start_, u) * (h * steps_);
    }
    for (int i = steps_ - 1; i >= 0; --i) {
      const std::size_t s = static_cast<std::size_t>(j) * steps_ + static_cast<std::size_t>(i);
      const Vec& x = states_[s];
      if (position) {
        lambda += 0.5 * h * norm_.squared_grad_p(states_[s + 1], u, m);
        ubar += 0.5 * h * norm_.squared_grad_u(states_[s + 1], u);
        ubar += 0.5 * h * norm_.squared_grad_u(x, u);
      }
      // Recompute the stages of this RK4 step.
      const Mat a1 = f_(x);
      const Vec k1 = a1 * u;
      const Vec y2 = x + 0.5 * h * k1;
      const Mat a2 = f_(y2);
      const Vec k2 = a2 * u;
      const Vec y3 = x + 0.5 * h * k2;
      const Mat a3 = f_(y3);
      const Vec k3 = a3 * u;
      const Vec y4 = x + h * k3;
      const Mat a4 = f_(y4);

      Vec b1 = (h / 6.0) * lambda;
      Vec b2 = (h / 3.0) * lambda;
      Vec b3 = (h / 3.0) * lambda;
      const Vec b4 = (h / 6.0) * lambda;
      Vec xbar = lambda;

      ubar += a4.transpose() * b4;
      const Vec y4bar = f_.control_jacobian(y4, u).transpose() * b4;
      xbar += y4bar;
      b3 += h * y4bar;

      ubar += a3.transpose() * b3;
      const Vec y3bar = f_.control_jacobian(y3, u).transpose() * b3;
      xbar += y3bar;
      b2 += 0.5 * h * y3bar;

      ubar += a2.transpose() * b2;
      const Vec y2bar = f_.control_jacobian(y2, u).transpose() * b2;
      xbar += y2bar;
      b1 += 0.5 * h * y2bar;

      ubar += a1.transpose() * b1;
      xbar += f_.control_jacobian(x, u).transpose() * b1;

      lambda = xbar;
      if (position) lambda += 0.5 * h * norm_.squared_grad_p(x, u, m);
    }
    grad.segment(static_cast<Eigen::Index>(j) * dim_k_, dim_k_) = ubar;
  }
}

double ShootingProblem::augmented(const VecX& packed, const Vec& multiplier, double mu,
                                  VecX* grad, Evaluation* eval) const {
  Evaluation e = evaluate(packed);
  if (eval) *eval = e;
  if (!e.feasible) return std::numeric_limits<double>::infinity();
  const double value = e.action + multiplier.dot(e.residual) + 0.5 * mu * e.residual.squaredNorm();
  if (grad) reverse(packed, Vec(multiplier + mu * e.residual), true, *grad);
  return value;
}

bool ShootingProblem::endpoint_jacobian(const VecX& packed, MatX& jacobian,
                                        Vec* residual) const {
  const Evaluation e = evaluate(packed);
  if (!e.feasible) return false;
  if (residual) *residual = e.residual;
  const int m = dim_m();
  jacobian.resize(m, dimension());
  VecX row;
  for (int i = 0; i < m; ++i) {
    reverse(packed, Vec(Vec::Unit(m, i)), false, row);
    jacobian.row(i) = row.transpose();
  }
  return true;
}

}  // namespace ccdist
