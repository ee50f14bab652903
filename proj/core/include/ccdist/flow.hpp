#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ccdist/chart_box.hpp"
#include "ccdist/control.hpp"
#include "ccdist/structure.hpp"
#include "ccdist/trajectory.hpp"

namespace ccdist {

struct EndpointOptions {
  int steps_per_segment = 16;
  // Box the curve must stay in, inflated by `inflation` of each side width.
  std::optional<ChartBox> box;
  double inflation = 0.1;
};

// Integrates gamma' = A(gamma) u(t), gamma(0) = o with classical RK4 at a
// fixed step inside every control segment. Throws BoxExit when the curve
// leaves the inflated box and NonFiniteState on overflow.
Trajectory endpoint(const Vec& o, const VectorFieldStructure& f,
                    const PiecewiseConstantControl& u,
                    const EndpointOptions& options = {});

// Final point only.
Vec end_point(const Vec& o, const VectorFieldStructure& f,
              const PiecewiseConstantControl& u,
              const EndpointOptions& options = {});

// Letters (field index, signed time); indices are zero-based.
struct FlowWord {
  std::vector<std::pair<int, double>> letters;

  double total_time() const;  // T = sum |t_j|
  FlowWord scaled(double s) const;
};

// Uniform-grid control with one segment per letter, segment l equal to
// j * t_l * e_{i_l}; integrating it over [0,1] composes the flows
// Phi^{t_j}_{X_{i_j}} o ... o Phi^{t_1}_{X_{i_1}}.
PiecewiseConstantControl concat_control(const FlowWord& word, int dim_k);

// The same composition with letter l active on an interval of length
// |t_l|/T and value T sgn(t_l) e_{i_l} (constant unit-speed form).
PiecewiseConstantControl concat_control_unit_speed(const FlowWord& word,
                                                   int dim_k);

// phi(t) = Phi^{t_m}_{X_{sigma_m}} o ... o Phi^{t_1}_{X_{sigma_1}}(o).
Vec flow_composition(const Vec& o, const VectorFieldStructure& f,
                     const std::vector<int>& sigma, const Vec& t,
                     const EndpointOptions& options = {});

// E (e^{Kt} - 1) / K, or E t when K < 1e-12.
double gronwall_bound(double e, double k, double t);

namespace detail {

enum class IntegrationStatus { kOk, kBoxExit, kNonFinite };

// Allocation-free integration used inside optimizers. Fills `states` with
// segments * steps + 1 points for a uniform control and returns the status.
struct BoxBounds {
  bool active = false;
  Vec lower;
  Vec upper;
};

BoxBounds make_bounds(const std::optional<ChartBox>& box, double inflation);

IntegrationStatus integrate_uniform(const Vec& o, const VectorFieldStructure& f,
                                    const VecX& packed, int dim_k, int segments,
                                    int steps, const BoxBounds& bounds,
                                    std::vector<Vec>& states);

Vec rk4_step(const VectorFieldStructure& f, const Vec& x, const Vec& u,
             double h);

}  // namespace detail

}  // namespace ccdist
