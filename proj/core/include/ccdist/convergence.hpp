#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccdist/distance.hpp"
#include "ccdist/family.hpp"

namespace ccdist {

struct TableOptions {
  DistanceMethod method = DistanceMethod::kControlOpt;
  DistanceOptions opt;
  std::optional<GridGraphSpec> graph;  // required for kGridGraph
  std::optional<ChartBox> graph_box;
  int threads = 1;
};

// All-pairs estimates for one family member. Entry (i,j), i < j, is
// d(points[i] -> points[j]); the table is filled symmetrically.
struct DistanceTable {
  std::vector<Vec> points;
  MatX values;
  std::vector<std::vector<bool>> found;
  double param = 0.0;
  DistanceMethod method = DistanceMethod::kControlOpt;
  int segments = 0;
  int restarts = 0;

  std::size_t size() const { return points.size(); }
  bool all_found() const;
};

DistanceTable family_distance_table(const StructureFamily& family,
                                    double lambda,
                                    const std::vector<Vec>& points,
                                    const TableOptions& options = {});

struct PairDeviation {
  double param = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double d_lambda = 0.0;
  double d_limit = 0.0;
  double abs_dev = 0.0;
};

struct ReportOptions {
  double monotone_slack = 0.10;
  // Final sup deviation threshold; defaults to relative_threshold times the
  // largest limit distance when absent.
  std::optional<double> final_threshold;
  double relative_threshold = 0.05;
  TableOptions table;
};

struct ConvergenceReport {
  std::vector<double> ordering;      // params toward the limit, limit last
  std::vector<double> sup_deviation; // aligned with ordering; 0 for limit
  std::vector<PairDeviation> pairs;
  std::vector<DistanceTable> tables; // aligned with ordering
  bool monotone = false;
  double final_threshold = 0.0;
  bool final_below_threshold = false;
  // "consistent-with-uniform-convergence" or "non-convergence".
  std::string verdict;
  // Pairs whose deviation at the last non-limit parameter exceeds the
  // threshold.
  std::vector<std::pair<std::size_t, std::size_t>> flagged_pairs;
  bool limit_boundedly_compact = true;

  double sup_for(double lambda) const;
};

// Evaluates every member on the point set and checks that s(lambda) =
// max_pairs |d_lambda - d_lambda0| decreases toward the limit. Not-found
// entries throw Error.
ConvergenceReport uniform_convergence_report(const StructureFamily& family,
                                             const std::vector<Vec>& points,
                                             const ReportOptions& options = {});

// Structure family built by weighted dilations delta_eps.
struct DilationFamily {
  StructureFamily family;
  std::vector<int> weights;
  VectorFieldStructure base_f;  // the eps = 1 structure
  VaryingNorm base_norm;

  Vec dilate(double eps, const Vec& p) const;
};

struct RescalingCheck {
  double max_relative_residual = 0.0;
  std::vector<double> lhs;  // per (eps, pair), eps-major
  std::vector<double> rhs;
};

// d_(f_eps,N_eps)(p,q) against eps^-1 d_(f_1,N_1)(delta_eps p, delta_eps q).
RescalingCheck rescaling_identity_check(
    const DilationFamily& family, const std::vector<double>& eps,
    const std::vector<std::pair<Vec, Vec>>& pairs,
    const DistanceOptions& options = {});

// Heisenberg form: d_eps(delta_eps p, delta_eps q) against eps d_1(p, q).
RescalingCheck isometry_identity_check(
    const StructureFamily& heisenberg, const std::vector<double>& eps,
    const std::vector<std::pair<Vec, Vec>>& pairs,
    const DistanceOptions& options = {});

struct RelaxationResult {
  double limit_value = 0.0;
  double min_neighbor_value = 0.0;
  double noise = 0.0;
  bool consistent = false;
  std::vector<double> neighbor_values;
};

// Samples p_n, q_n within radius r of p, q and lambda_n among the non-limit
// members; compares min d_lambda_n(p_n, q_n) with d_lambda0(p, q).
RelaxationResult relaxation_probe(const StructureFamily& family, const Vec& p,
                                  const Vec& q, double radius, int samples,
                                  const DistanceOptions& options = {},
                                  double noise = 0.02);

// (1/2) max |d_A - d_B| over the identity correspondence of a shared sample;
// an upper bound on the Gromov-Hausdorff distance of the two finite spaces.
double gh_upper_bound(const DistanceTable& a, const DistanceTable& b);

// (1/2) min over all bijections of the distortion; exponential, <= 6 points.
double gh_bijection_bound(const MatX& a, const MatX& b);

}  // namespace ccdist
