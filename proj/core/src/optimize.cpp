#include "ccdist/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace ccdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinePoint {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
  VecX grad;
  bool finite = false;
};

class LineSearch {
 public:
  LineSearch(const GradientObjective& objective, const VecX& x, const VecX& d, int& evaluations)
      : objective_(objective), x_(x), d_(d), evaluations_(evaluations) {}

  LinePoint at(double alpha) {
    LinePoint p;
    p.alpha = alpha;
    p.grad.resize(x_.size());
    p.value = objective_(x_ + alpha * d_, &p.grad);
    ++evaluations_;
    p.finite = std::isfinite(p.value) && p.grad.allFinite();
    if (p.finite) p.slope = p.grad.dot(d_);
    return p;
  }

  // Strong Wolfe search; returns false when no acceptable step was found.
  bool run(const LinePoint& start, double alpha, LinePoint& out, int budget) {
    const double c1 = 1e-4, c2 = 0.9;
    LinePoint previous = start;
    for (int i = 0; i < budget; ++i) {
      LinePoint cur = at(alpha);
      if (!cur.finite) {
        // Infeasible: shrink toward the last good point.
        if (i + 1 == budget) return false;
        return zoom(start, previous, cur.alpha, out, budget - i - 1);
      }
      if (cur.value > start.value + c1 * alpha * start.slope ||
          (i > 0 && cur.value >= previous.value)) {
        return zoom_pair(start, previous, cur, out, budget - i - 1);
      }
      if (std::abs(cur.slope) <= -c2 * start.slope) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom_pair(start, cur, previous, out, budget - i - 1);
      previous = std::move(cur);
      alpha *= 2.0;
    }
    out = previous;
    return previous.alpha > 0.0 && previous.value < start.value;
  }

 private:
  // Zoom between a feasible `lo` and an infeasible alpha.
  bool zoom(const LinePoint& start, LinePoint lo, double hi_alpha, LinePoint& out, int budget) {
    for (int i = 0; i < budget; ++i) {
      const double alpha = 0.5 * (lo.alpha + hi_alpha);
      LinePoint cur = at(alpha);
      if (!cur.finite) {
        hi_alpha = alpha;
        continue;
      }
      LinePoint hi_point = cur;
      // Now a finite bracket; continue with the standard zoom.
      if (cur.value > start.value + 1e-4 * alpha * start.slope || cur.value >= lo.value) {
        return zoom_pair(start, lo, cur, out, budget - i - 1);
      }
      if (std::abs(cur.slope) <= -0.9 * start.slope) {
        out = std::move(cur);
        return true;
      }
      lo = std::move(hi_point);
    }
    out = lo;
    return lo.alpha > 0.0 && lo.value < start.value;
  }

  bool zoom_pair(const LinePoint& start, LinePoint lo, LinePoint hi, LinePoint& out, int budget) {
    const double c1 = 1e-4, c2 = 0.9;
    for (int i = 0; i < budget; ++i) {
      // Cubic interpolation, safeguarded to the middle of the bracket.
      double alpha;
      const double a = lo.alpha, b = hi.alpha;
      const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (hi.finite && disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        alpha = b - (b - a) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
      } else {
        alpha = 0.5 * (a + b);
      }
      const double lo_end = std::min(a, b), hi_end = std::max(a, b);
      const double margin = 0.1 * (hi_end - lo_end);
      if (!std::isfinite(alpha) || alpha < lo_end + margin || alpha > hi_end - margin) {
        alpha = 0.5 * (a + b);
      }
      if (hi_end - lo_end < 1e-16 * std::max(1.0, hi_end)) break;
      LinePoint cur = at(alpha);
      if (!cur.finite || cur.value > start.value + c1 * alpha * start.slope ||
          cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -c2 * start.slope) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    out = lo;
    return lo.alpha > 0.0 && lo.value < start.value;
  }

  const GradientObjective& objective_;
  const VecX& x_;
  const VecX& d_;
  int& evaluations_;
};

}  // namespace

MinimizeResult minimize_lbfgs(const GradientObjective& objective, VecX x0,
                              const LbfgsOptions& options) {
  MinimizeResult result;
  const Eigen::Index n = x0.size();
  VecX grad(n);
  double value = objective(x0, &grad);
  result.evaluations = 1;
  result.x = x0;
  result.value = value;
  if (!std::isfinite(value) || !grad.allFinite()) return result;
  if (n == 0) {
    result.converged = true;
    return result;
  }

  std::deque<VecX> s_hist, y_hist;
  std::deque<double> rho_hist;
  VecX x = std::move(x0);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tol) {
      result.converged = true;
      break;
    }
    // Two-loop recursion.
    VecX d = -grad;
    std::vector<double> alphas(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alphas[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alphas[i] - beta) * s_hist[i];
    }
    double slope = grad.dot(d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -grad;
      slope = -grad.squaredNorm();
    }
    const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1e-300, grad.norm())) : 1.0;

    LinePoint start;
    start.alpha = 0.0;
    start.value = value;
    start.slope = slope;
    start.grad = grad;
    start.finite = true;
    LinePoint next;
    LineSearch search(objective, x, d, result.evaluations);
    const bool ok = search.run(start, alpha0, next, 30);
    if (!ok || next.alpha <= 0.0) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      break;
    }
    VecX s = next.alpha * d;
    VecX y = next.grad - grad;
    const double previous = value;
    x += s;
    value = next.value;
    grad = std::move(next.grad);
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (std::abs(previous - value) <= options.relative_tol * std::max(1.0, std::abs(value))) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;
  }
  result.x = std::move(x);
  result.value = value;
  return result;
}

MinimizeResult minimize_simplex(const PlainObjective& objective, VecX x0,
                                const SimplexOptions& options) {
  const int n = static_cast<int>(x0.size());
  MinimizeResult result;
  if (n == 0) {
    result.x = x0;
    result.value = objective(x0);
    result.evaluations = 1;
    result.converged = true;
    return result;
  }
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  auto eval = [&](const VecX& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? kInf : v;
  };

  std::vector<VecX> pts(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> vals(static_cast<std::size_t>(n) + 1);
  vals[0] = eval(x0);
  for (int i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i) + 1](i) += options.initial_step;
    vals[static_cast<std::size_t>(i) + 1] = eval(pts[static_cast<std::size_t>(i) + 1]);
  }
  std::vector<int> order(static_cast<std::size_t>(n) + 1);
  while (result.evaluations < options.max_evaluations) {
    ++result.iterations;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front(), worst = order.back(), second = order[order.size() - 2];
    double size = 0.0;
    for (int i = 0; i <= n; ++i) size = std::max(size, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
    if (std::isfinite(vals[worst]) &&
        std::abs(vals[worst] - vals[best]) <= options.value_tol * std::max(1.0, std::abs(vals[best])) &&
        size <= options.size_tol) {
      result.converged = true;
      break;
    }
    if (size <= options.size_tol * 1e-3) {
      result.converged = true;
      break;
    }
    VecX centroid = VecX::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;
    const VecX reflected = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      const VecX expanded = centroid + beta * (reflected - centroid);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < vals[worst]) {
      const VecX outside = centroid + gamma * (reflected - centroid);
      const double fo = eval(outside);
      if (fo <= fr) {
        pts[worst] = outside;
        vals[worst] = fo;
      } else {
        shrink = true;
      }
    } else {
      const VecX inside = centroid - gamma * (reflected - centroid);
      const double fi = eval(inside);
      if (fi < vals[worst]) {
        pts[worst] = inside;
        vals[worst] = fi;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (int i = 0; i <= n; ++i) {
        if (i == best) continue;
        pts[i] = pts[best] + delta * (pts[i] - pts[best]);
        vals[i] = eval(pts[i]);
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  result.x = pts[static_cast<std::size_t>(it - vals.begin())];
  result.value = *it;
  return result;
}

double golden_section(const std::function<double(double)>& fn, double a, double b, double tol,
                      double* best_value) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int iter = 0; iter < 300 && std::abs(b - a) > tol; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = fn(d);
    }
  }
  const double x = fc < fd ? c : d;
  if (best_value) *best_value = std::min(fc, fd);
  return x;
}

}  // namespace ccdist
