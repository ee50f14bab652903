#include "ccdist/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ccdist/errors.hpp"
#include "ccdist/parallel.hpp"
#include "ccdist/rng.hpp"

namespace ccdist {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t pair_seed(std::uint64_t seed, std::size_t i, std::size_t j) {
  return mix_seed(mix_seed(seed, i), j);
}

// Table plus the best control of every pair, reused as warm starts.
struct TableRun {
  DistanceTable table;
  std::vector<std::optional<PiecewiseConstantControl>> controls;  // pair-major, i < j
};

std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

TableRun run_table(const StructureFamily& family, double lambda, const std::vector<Vec>& points,
                   const TableOptions& options, const TableRun* warm) {
  const FamilyMember& member = family.member(lambda);
  for (const Vec& p : points) {
    if (p.size() != family.dim_m()) throw DimensionMismatch("table point dimension differs from m");
  }
  if (options.method == DistanceMethod::kGridGraph && (!options.graph || !options.graph_box)) {
    throw InvalidArgument("grid-graph tables need a graph spec and box");
  }
  const std::size_t n = points.size();
  TableRun run;
  DistanceTable& t = run.table;
  t.points = points;
  t.values = MatX::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  t.found.assign(n, std::vector<bool>(n, true));
  t.param = lambda;
  t.method = options.method;
  t.segments = options.opt.segments;
  t.restarts = options.opt.restarts;

  const auto pairs = upper_pairs(n);
  std::vector<DistanceEstimate> results(pairs.size());
  parallel_for(
      pairs.size(),
      [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        if (options.method == DistanceMethod::kGridGraph) {
          results[k] = cc_distance_graph(points[i], points[j], member.f, member.norm,
                                         *options.graph, *options.graph_box);
          return;
        }
        DistanceOptions o = options.opt;
        o.seed = pair_seed(options.opt.seed, i, j);
        o.threads = 1;
        if (warm && warm->controls[k] && warm->controls[k]->dim_k() == family.dim_k()) {
          o.warm_starts.push_back(*warm->controls[k]);
        }
        results[k] = cc_distance_opt(points[i], points[j], member.f, member.norm, o);
      },
      options.threads);

  run.controls.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    const DistanceEstimate& e = results[k];
    const double v = e.found ? e.value : kNaN;
    t.values(a, b) = v;
    t.values(b, a) = v;
    t.found[i][j] = e.found;
    t.found[j][i] = e.found;
    if (e.found) run.controls[k] = e.best_control;
  }
  return run;
}

}  // namespace

bool DistanceTable::all_found() const {
  for (const auto& row : found) {
    for (bool f : row) {
      if (!f) return false;
    }
  }
  return true;
}

DistanceTable family_distance_table(const StructureFamily& family, double lambda,
                                    const std::vector<Vec>& points, const TableOptions& options) {
  return run_table(family, lambda, points, options, nullptr).table;
}

double ConvergenceReport::sup_for(double lambda) const {
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    if (ordering[i] == lambda) return sup_deviation[i];
  }
  throw NotAMember("parameter " + param_label(lambda) + " is not in the report");
}

ConvergenceReport uniform_convergence_report(const StructureFamily& family,
                                             const std::vector<Vec>& points,
                                             const ReportOptions& options) {
  if (points.size() < 2) throw InvalidArgument("convergence report needs at least two points");
  if (!(options.monotone_slack >= 0.0)) throw InvalidArgument("monotone slack must be >= 0");
  ConvergenceReport report;
  report.limit_boundedly_compact = family.limit_boundedly_compact();
  report.ordering = family.ordered_toward_limit();
  report.ordering.push_back(family.limit_param());

  // The limit table first: its controls warm-start the other members.
  const TableRun limit = run_table(family, family.limit_param(), points, options.table, nullptr);
  auto require_found = [](const DistanceTable& t) {
    if (!t.all_found()) {
      throw Error("convergence report: a distance estimate was not found for parameter " +
                  param_label(t.param));
    }
  };
  require_found(limit.table);

  const std::size_t n = points.size();
  double max_limit = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      max_limit = std::max(max_limit, limit.table.values(static_cast<Eigen::Index>(i),
                                                         static_cast<Eigen::Index>(j)));
    }
  }
  report.final_threshold = options.final_threshold.value_or(options.relative_threshold * max_limit);

  for (std::size_t r = 0; r + 1 < report.ordering.size(); ++r) {
    const double lambda = report.ordering[r];
    TableRun run = run_table(family, lambda, points, options.table, &limit);
    require_found(run.table);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        PairDeviation dev{lambda, i, j, run.table.values(a, b), limit.table.values(a, b), 0.0};
        dev.abs_dev = std::abs(dev.d_lambda - dev.d_limit);
        sup = std::max(sup, dev.abs_dev);
        report.pairs.push_back(dev);
      }
    }
    report.sup_deviation.push_back(sup);
    report.tables.push_back(std::move(run.table));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      const double d = limit.table.values(a, b);
      report.pairs.push_back({family.limit_param(), i, j, d, d, 0.0});
    }
  }
  report.sup_deviation.push_back(0.0);
  report.tables.push_back(limit.table);

  // Nonincreasing within the relative slack plus a small absolute floor for
  // solver noise on nearly converged members.
  const double floor = 1e-3 * max_limit;
  report.monotone = true;
  for (std::size_t r = 1; r + 1 < report.ordering.size(); ++r) {
    if (report.sup_deviation[r] >
        report.sup_deviation[r - 1] * (1.0 + options.monotone_slack) + floor) {
      report.monotone = false;
    }
  }
  const std::size_t last = report.ordering.size() >= 2 ? report.ordering.size() - 2 : 0;
  report.final_below_threshold =
      report.ordering.size() < 2 || report.sup_deviation[last] <= report.final_threshold;
  if (report.ordering.size() >= 2) {
    for (const PairDeviation& d : report.pairs) {
      if (d.param == report.ordering[last] && d.abs_dev > report.final_threshold) {
        report.flagged_pairs.emplace_back(d.i, d.j);
      }
    }
  }
  report.verdict = report.monotone && report.final_below_threshold
                       ? "consistent-with-uniform-convergence"
                       : "non-convergence";
  return report;
}

Vec DilationFamily::dilate(double eps, const Vec& p) const {
  if (static_cast<int>(weights.size()) != p.size()) {
    throw DimensionMismatch("dilation weights need one entry per coordinate");
  }
  Vec out = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out(i) *= std::pow(eps, weights[static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

RescalingCheck compare(const std::vector<std::function<double()>>& lhs,
                       const std::vector<std::function<double()>>& rhs, int threads) {
  RescalingCheck check;
  check.lhs.assign(lhs.size(), 0.0);
  check.rhs.assign(rhs.size(), 0.0);
  parallel_for(
      2 * lhs.size(),
      [&](std::size_t t) {
        const std::size_t i = t / 2;
        if (t % 2 == 0) {
          check.lhs[i] = lhs[i]();
        } else {
          check.rhs[i] = rhs[i]();
        }
      },
      threads);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double denom = std::max(std::abs(check.rhs[i]), 1e-12);
    check.max_relative_residual =
        std::max(check.max_relative_residual, std::abs(check.lhs[i] - check.rhs[i]) / denom);
  }
  return check;
}

double estimate_or_throw(const Vec& p, const Vec& q, const FamilyMember& m,
                         const DistanceOptions& o) {
  const DistanceEstimate e = cc_distance_opt(p, q, m.f, m.norm, o);
  if (!e.found) {
    throw Error("no admissible curve found from " + format_point(p) + " to " + format_point(q));
  }
  return e.value;
}

}  // namespace

RescalingCheck rescaling_identity_check(const DilationFamily& family,
                                        const std::vector<double>& eps,
                                        const std::vector<std::pair<Vec, Vec>>& pairs,
                                        const DistanceOptions& options) {
  std::vector<std::function<double()>> lhs, rhs;
  std::uint64_t task = 0;
  const FamilyMember base{family.base_f, family.base_norm};
  for (double e : eps) {
    if (!(e > 0.0)) throw InvalidArgument("rescaling check needs eps > 0");
    const FamilyMember& member = family.family.member(e);
    for (const auto& [p, q] : pairs) {
      DistanceOptions ol = options, orr = options;
      ol.threads = orr.threads = 1;
      ol.seed = mix_seed(options.seed, task++);
      orr.seed = mix_seed(options.seed, task++);
      const Vec dp = family.dilate(e, p), dq = family.dilate(e, q);
      lhs.push_back([=, &member] { return estimate_or_throw(p, q, member, ol); });
      rhs.push_back([=, &base] { return estimate_or_throw(dp, dq, base, orr) / e; });
    }
  }
  return compare(lhs, rhs, options.threads);
}

RescalingCheck isometry_identity_check(const StructureFamily& heisenberg,
                                       const std::vector<double>& eps,
                                       const std::vector<std::pair<Vec, Vec>>& pairs,
                                       const DistanceOptions& options) {
  if (heisenberg.dim_m() != 3) throw DimensionMismatch("isometry check expects the 3-dimensional model");
  const FamilyMember& riemannian = heisenberg.member(1.0);
  std::vector<std::function<double()>> lhs, rhs;
  std::uint64_t task = 0;
  for (double e : eps) {
    if (!(e > 0.0)) throw InvalidArgument("isometry check needs eps > 0");
    const FamilyMember& member = heisenberg.member(e);
    for (const auto& [p, q] : pairs) {
      DistanceOptions ol = options, orr = options;
      ol.threads = orr.threads = 1;
      ol.seed = mix_seed(options.seed, task++);
      orr.seed = mix_seed(options.seed, task++);
      const Vec dp = make_vec({e * p(0), e * p(1), e * e * p(2)});
      const Vec dq = make_vec({e * q(0), e * q(1), e * e * q(2)});
      lhs.push_back([=, &member] { return estimate_or_throw(dp, dq, member, ol); });
      rhs.push_back([=, &riemannian] { return e * estimate_or_throw(p, q, riemannian, orr); });
    }
  }
  return compare(lhs, rhs, options.threads);
}

RelaxationResult relaxation_probe(const StructureFamily& family, const Vec& p, const Vec& q,
                                  double radius, int samples, const DistanceOptions& options,
                                  double noise) {
  if (!(radius >= 0.0)) throw InvalidArgument("relaxation radius must be >= 0");
  if (samples < 1) throw InvalidArgument("relaxation probe needs samples >= 1");
  const std::vector<double> order = family.ordered_toward_limit();
  if (order.empty()) throw InvalidArgument("relaxation probe needs a non-limit member");
  // lambda_n is the member closest to the limit.
  const FamilyMember& near = family.member(order.back());
  const FamilyMember& limit = family.limit();
  const int m = family.dim_m();

  Rng rng(mix_seed(options.seed, 0x7e1a));
  std::vector<std::pair<Vec, Vec>> neighbors;
  neighbors.emplace_back(p, q);
  auto jitter = [&](const Vec& x) {
    const double r = radius * std::pow(rng.uniform(), 1.0 / m);
    Vec y = x + r * rng.unit_vector(m);
    return options.box ? options.box->clamp(y) : y;
  };
  for (int s = 1; s < samples; ++s) {
    Vec a = jitter(p);
    Vec b = jitter(q);
    neighbors.emplace_back(std::move(a), std::move(b));
  }

  RelaxationResult result;
  result.noise = noise;
  result.neighbor_values.assign(neighbors.size(), 0.0);
  std::vector<double> values(neighbors.size() + 1, 0.0);
  parallel_for(
      neighbors.size() + 1,
      [&](std::size_t i) {
        DistanceOptions o = options;
        o.threads = 1;
        o.seed = mix_seed(options.seed, i);
        if (i == neighbors.size()) {
          values[i] = estimate_or_throw(p, q, limit, o);
        } else {
          values[i] = estimate_or_throw(neighbors[i].first, neighbors[i].second, near, o);
        }
      },
      options.threads);
  result.limit_value = values.back();
  std::copy(values.begin(), values.end() - 1, result.neighbor_values.begin());
  result.min_neighbor_value =
      *std::min_element(result.neighbor_values.begin(), result.neighbor_values.end());
  const double slack = noise * result.limit_value;
  result.consistent = result.min_neighbor_value <= result.limit_value + slack &&
                      (!family.limit_boundedly_compact() ||
                       result.min_neighbor_value >= result.limit_value - slack);
  return result;
}

double gh_upper_bound(const DistanceTable& a, const DistanceTable& b) {
  if (a.points.size() != b.points.size()) throw InvalidArgument("GH bound needs identical point lists");
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].size() != b.points[i].size() || a.points[i] != b.points[i]) {
      throw InvalidArgument("GH bound needs identical point lists");
    }
  }
  double worst = 0.0;
  const Eigen::Index n = a.values.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::abs(a.values(i, j) - b.values(i, j));
      if (std::isnan(d)) throw Error("GH bound: table contains a not-found entry");
      worst = std::max(worst, d);
    }
  }
  return 0.5 * worst;
}

double gh_bijection_bound(const MatX& a, const MatX& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InvalidArgument("GH bijection bound needs square tables of equal size");
  }
  const Eigen::Index n = a.rows();
  if (n > 6) throw InvalidArgument("GH bijection bound is limited to 6 points");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double distortion = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        distortion = std::max(distortion, std::abs(a(i, j) - b(perm[static_cast<std::size_t>(i)],
                                                              perm[static_cast<std::size_t>(j)])));
      }
    }
    best = std::min(best, distortion);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 0.5 * (n < 2 ? 0.0 : best);
}

}  // namespace ccdist
