#pragma once

#include <functional>
#include <vector>

#include "ccdist/flow.hpp"
#include "ccdist/structure.hpp"

namespace ccdist {

using PlanarMap = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

struct DegreeReport {
  int winding = 0;
  int samples = 0;
  double min_boundary_gap = 0.0;
  double max_sample_jump = 0.0;
  double max_angle_step = 0.0;
  bool reliable = false;
};

// Degree of x -> (F(c + r x) - F(c)) / |...| on the unit circle, from the
// accumulated angle of the sampled boundary image.
DegreeReport winding_number(const PlanarMap& map, const Eigen::Vector2d& center,
                            double radius, int samples,
                            double gap_tol = 1e-12);

struct OpennessProbe {
  bool open_at_scale = false;
  double margin = 0.0;  // min boundary gap
  DegreeReport degree;
};

// Planar (m = 2) probe of the composed-flow map t -> phi(t) on a circle of
// t-values around t_center.
OpennessProbe essential_openness_probe(const Vec& o,
                                       const VectorFieldStructure& f,
                                       const std::vector<int>& sigma,
                                       const Vec& t_center, double radius,
                                       int resolution,
                                       const EndpointOptions& options = {});

struct BracketOptions {
  double h = 1e-4;
  bool richardson = false;
  double relative_rank_tol = 1e-6;
};

// Rank at p of the span of the frame and its iterated brackets up to
// `depth` (depth 1 = frame). Brackets [X,Y] = DY X - DX Y use central
// differences.
int bracket_span_rank(const VectorFieldStructure& f, const Vec& p, int depth,
                      const BracketOptions& options = {});

// The iterated brackets themselves, depth by depth, evaluated at p.
std::vector<Vec> bracket_vectors(const VectorFieldStructure& f, const Vec& p,
                                 int depth, const BracketOptions& options = {});

struct OpennessRadii {
  double c1 = 0.0;  // B(F(x0), c1 rho) inside F(B(x0, rho))
  double c2 = 0.0;  // valid for rho < min(r, c2)
};

// Quantitative open-mapping constants for a C^2 map with
// |DF(x0)^-1| <= ell and |D^2 F| <= L.
OpennessRadii openness_radii(double ell, double second_derivative_bound);

}  // namespace ccdist
