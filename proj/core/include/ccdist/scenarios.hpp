#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccdist/chart_box.hpp"
#include "ccdist/convergence.hpp"
#include "ccdist/distance.hpp"
#include "ccdist/family.hpp"
#include "ccdist/polynomial.hpp"

namespace ccdist {

// First Heisenberg group in exponential coordinates:
// X = d_x - (y/2) d_z, Y = d_y + (x/2) d_z, Z = d_z.
Mat heisenberg_frame(const Vec& p);

// f_eps(p)(v) = v1 X + v2 Y + eps v3 Z (k = 3).
VectorFieldStructure heisenberg_structure(double eps);
// Horizontal frame {X, Y} (k = 2).
VectorFieldStructure heisenberg_horizontal();

// Family over eps with limit eps = 0 (added when absent), Euclidean norm.
StructureFamily heisenberg_family(std::vector<double> eps);

// delta_eps(x) = (eps^w1 x1, ..., eps^wm xm).
Vec dilate(const std::vector<int>& weights, double eps, const Vec& p);

// f_eps(p)(e_i) = eps (D delta_eps)^-1 X_i(delta_eps p) and
// N_eps(p, v) = N(delta_eps p, v); the eps = 0 member is the supplied limit.
DilationFamily dilation_family(const VectorFieldStructure& f,
                               const VaryingNorm& norm,
                               const std::vector<int>& weights,
                               std::vector<double> eps,
                               const VectorFieldStructure& limit_f,
                               const VaryingNorm& limit_norm);

// {X + c x^2 d_z, Y}: homogeneous of weight (1,1,2) only when c = 0.
VectorFieldStructure perturbed_heisenberg(double c);

// Left-invariant frames on the H^1 coordinate model: basis vectors
// v = (a, b, c) in the Lie algebra extend to aX + bY + cZ, and
// N(p, w) = |sum_i w_i v_i| (Euclidean norm on the algebra).
VectorFieldStructure left_invariant_structure(const std::vector<Vec>& basis);
VaryingNorm left_invariant_norm(const std::vector<Vec>& basis);
StructureFamily left_invariant_family(
    const std::vector<double>& params,
    const std::vector<std::vector<Vec>>& bases, double limit_param);
// H_n = span{e1, e2 + (1/n) e3}; n = +inf gives {e1, e2}.
StructureFamily subspace_sequence_family(std::vector<double> n);

// Conformal factor g_n on the strip R x (-1, 1); n = +inf gives g_inf.
// g_n = 1 + 9 S(|x|) T_n(|y|) with smooth plateaus: S = 1 on [0,1], 0 past 2;
// T_n = 1 below 1 - 1/(2n), 0 above 1 - 1/(4n); T_inf = 1.
double strip_conformal_factor(double n, const Vec& p);
// Identity frame with N_n(p, u) = sqrt(g_n(p)) |u|; limit n = +inf, not
// boundedly compact.
StructureFamily strip_counterexample_family(std::vector<double> n);

StructureFamily euclidean_family(int dim);

struct PolynomialMember {
  double param = 0.0;
  PolynomialFrame frame{1, 1};
  Vec norm_weights;          // weighted l^q weights; empty: Euclidean
  double norm_exponent = 2.0;
};

StructureFamily polynomial_family(const std::vector<PolynomialMember>& members,
                                  double limit_param, bool boundedly_compact);

struct ScenarioSpec {
  // heisenberg-eps | dilation | lie-left-invariant | generic-family |
  // strip-counterexample | euclidean
  std::string name;
  std::vector<double> params;     // eps or n values
  std::vector<int> weights;       // dilation
  double perturbation = 1.0;      // dilation: c in X + c x^2 d_z
  int dim = 2;                    // euclidean
  std::vector<PolynomialMember> members;  // generic-family
  std::optional<double> limit_param;      // generic-family
  bool boundedly_compact = true;          // generic-family
};

struct Scenario {
  Scenario(ScenarioSpec s, StructureFamily f, ChartBox b)
      : spec(std::move(s)), family(std::move(f)), box(b), graph_box(b) {}

  ScenarioSpec spec;
  StructureFamily family;
  ChartBox box;
  double inflation = 0.1;
  std::vector<Vec> points;                        // default point set
  std::vector<std::pair<Vec, Vec>> check_pairs;   // cross-method pairs
  double check_param = 0.0;                       // member used for them
  GridGraphSpec graph;                            // lattice for check pairs
  ChartBox graph_box;
  bool graph_seed = false;  // seed cc_distance_opt with a lattice path
  // Convergence threshold as a fraction of the largest limit distance.
  double relative_threshold = 0.05;
  std::optional<DilationFamily> dilation;
};

Scenario build_scenario(const ScenarioSpec& spec);

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::vector<std::string> keys;  // accepted config keys besides "name"
};

const std::vector<ScenarioInfo>& scenario_catalog();

}  // namespace ccdist
