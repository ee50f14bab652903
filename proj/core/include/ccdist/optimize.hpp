#pragma once

#include <functional>

#include "ccdist/linalg.hpp"

namespace ccdist {

// Objective returning f(x) and writing the gradient when `grad` is non-null.
// Returning +inf marks x as infeasible (e.g. the curve left the box).
using GradientObjective = std::function<double(const VecX& x, VecX* grad)>;
using PlainObjective = std::function<double(const VecX& x)>;

struct MinimizeResult {
  VecX x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

struct LbfgsOptions {
  int memory = 12;
  int max_iterations = 400;
  double gradient_tol = 1e-9;  // on |g|_inf
  double relative_tol = 1e-13; // on successive values
  int max_evaluations = 20000;
};

// Limited-memory BFGS with a strong-Wolfe bracketing line search.
MinimizeResult minimize_lbfgs(const GradientObjective& objective, VecX x0,
                              const LbfgsOptions& options = {});

struct SimplexOptions {
  int max_evaluations = 20000;
  double initial_step = 0.1;
  double value_tol = 1e-12;
  double size_tol = 1e-10;
};

// Nelder-Mead downhill simplex (adaptive coefficients for high dimension).
MinimizeResult minimize_simplex(const PlainObjective& objective, VecX x0,
                                const SimplexOptions& options = {});

// Minimizes a unimodal function on [a, b] by golden-section search.
double golden_section(const std::function<double(double)>& fn, double a,
                      double b, double tol, double* best_value = nullptr);

}  // namespace ccdist
