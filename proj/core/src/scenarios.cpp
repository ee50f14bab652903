#include "ccdist/scenarios.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ccdist/errors.hpp"

namespace ccdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d/dp of H(p) w for the Heisenberg frame H, where w = (a, b, c).
Mat heisenberg_jacobian(const Vec& w) {
  Mat j = Mat::Zero(3, 3);
  j(2, 0) = 0.5 * w(1);
  j(2, 1) = -0.5 * w(0);
  return j;
}

void require_point(const Vec& p, int dim) {
  if (p.size() != dim) throw DimensionMismatch("expected a point of dimension " + std::to_string(dim));
}

std::string label(const std::string& base, double param) {
  return base + "(" + param_label(param) + ")";
}

}  // namespace

Mat heisenberg_frame(const Vec& p) {
  require_point(p, 3);
  Mat a(3, 3);
  a << 1.0, 0.0, 0.0,
       0.0, 1.0, 0.0,
       -0.5 * p(1), 0.5 * p(0), 1.0;
  return a;
}

VectorFieldStructure heisenberg_structure(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("heisenberg eps must be finite and >= 0");
  VectorFieldStructure::Options o;
  o.lipschitz_hint = 0.5;
  o.name = label("heisenberg", eps);
  o.jacobian = [](const Vec&, const Vec& u) { return heisenberg_jacobian(u); };
  return VectorFieldStructure(3, 3, [eps](const Vec& p) {
    Mat a = heisenberg_frame(p);
    a.col(2) *= eps;
    return a;
  }, std::move(o));
}

VectorFieldStructure heisenberg_horizontal() {
  VectorFieldStructure::Options o;
  o.lipschitz_hint = 0.5;
  o.name = "heisenberg-horizontal";
  o.jacobian = [](const Vec&, const Vec& u) { return heisenberg_jacobian(make_vec({u(0), u(1), 0.0})); };
  return VectorFieldStructure(3, 2, [](const Vec& p) {
    return Mat(heisenberg_frame(p).leftCols(2));
  }, std::move(o));
}

StructureFamily heisenberg_family(std::vector<double> eps) {
  if (eps.empty()) throw InvalidArgument("heisenberg family needs at least one eps");
  if (std::find(eps.begin(), eps.end(), 0.0) == eps.end()) eps.push_back(0.0);
  std::vector<FamilyMember> members;
  for (double e : eps) members.push_back({heisenberg_structure(e), VaryingNorm::euclidean(3)});
  return StructureFamily("heisenberg-eps", eps, std::move(members), 0.0, true);
}

Vec dilate(const std::vector<int>& weights, double eps, const Vec& p) {
  if (static_cast<int>(weights.size()) != p.size()) {
    throw DimensionMismatch("dilation weights need one entry per coordinate");
  }
  Vec out = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) out(i) *= std::pow(eps, weights[static_cast<std::size_t>(i)]);
  return out;
}

DilationFamily dilation_family(const VectorFieldStructure& f, const VaryingNorm& norm,
                               const std::vector<int>& weights, std::vector<double> eps,
                               const VectorFieldStructure& limit_f, const VaryingNorm& limit_norm) {
  const int m = f.dim_m();
  if (static_cast<int>(weights.size()) != m) throw DimensionMismatch("dilation weights need one entry per coordinate");
  for (int w : weights) {
    if (w < 1) throw InvalidArgument("dilation weights must be >= 1");
  }
  if (limit_f.dim_m() != m || limit_f.dim_k() != f.dim_k() || norm.dim_k() != f.dim_k() ||
      limit_norm.dim_k() != f.dim_k()) {
    throw DimensionMismatch("dilation family members disagree in dimensions");
  }
  if (eps.empty()) throw InvalidArgument("dilation family needs at least one eps");
  if (std::find(eps.begin(), eps.end(), 0.0) == eps.end()) eps.push_back(0.0);

  std::vector<FamilyMember> members;
  for (double e : eps) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw InvalidArgument("dilation eps must be finite and >= 0");
    if (e == 0.0) {
      members.push_back({limit_f, limit_norm});
      continue;
    }
    if (e == 1.0) {
      members.push_back({f, norm});
      continue;
    }
    // Row i of A is scaled by eps^(1 - w_i) and evaluated at delta_eps p.
    Vec row_scale(m), grow(m);
    for (int i = 0; i < m; ++i) {
      row_scale(i) = std::pow(e, 1 - weights[static_cast<std::size_t>(i)]);
      grow(i) = std::pow(e, weights[static_cast<std::size_t>(i)]);
    }
    auto delta = [grow](const Vec& p) { return Vec(p.cwiseProduct(grow)); };
    VectorFieldStructure::Options o;
    o.smooth = f.smooth();
    o.name = label(f.name().empty() ? "dilated" : f.name() + "-dilated", e);
    o.jacobian = [f, row_scale, grow, delta](const Vec& p, const Vec& u) {
      Mat j = f.control_jacobian(delta(p), u);
      return Mat(row_scale.asDiagonal() * j * grow.asDiagonal());
    };
    VectorFieldStructure fe(m, f.dim_k(), [f, row_scale, delta](const Vec& p) {
      return Mat(row_scale.asDiagonal() * f(delta(p)));
    }, std::move(o));
    members.push_back({std::move(fe), norm.pulled_back(delta)});
  }
  return DilationFamily{StructureFamily("dilation", eps, std::move(members), 0.0, true), weights, f,
                        norm};
}

VectorFieldStructure perturbed_heisenberg(double c) {
  if (!std::isfinite(c)) throw InvalidArgument("perturbation must be finite");
  VectorFieldStructure::Options o;
  o.name = "perturbed-heisenberg";
  o.jacobian = [c](const Vec& p, const Vec& u) {
    Mat j = heisenberg_jacobian(make_vec({u(0), u(1), 0.0}));
    j(2, 0) += 2.0 * c * p(0) * u(0);
    return j;
  };
  return VectorFieldStructure(3, 2, [c](const Vec& p) {
    Mat a = heisenberg_frame(p).leftCols(2);
    a(2, 0) += c * p(0) * p(0);
    return a;
  }, std::move(o));
}

namespace {

Mat basis_matrix(const std::vector<Vec>& basis) {
  if (basis.empty() || static_cast<int>(basis.size()) > 3) {
    throw InvalidArgument("left-invariant basis needs 1 to 3 vectors");
  }
  Mat v(3, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require_point(basis[i], 3);
    v.col(static_cast<Eigen::Index>(i)) = basis[i];
  }
  const Eigen::JacobiSVD<Mat> svd(v);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(s.size() - 1) <= 1e-12 * s(0)) {
    throw InvalidArgument("left-invariant basis vectors are linearly dependent");
  }
  return v;
}

}  // namespace

VectorFieldStructure left_invariant_structure(const std::vector<Vec>& basis) {
  const Mat v = basis_matrix(basis);
  VectorFieldStructure::Options o;
  o.name = "left-invariant";
  o.lipschitz_hint = 0.5 * v.topRows(2).norm();
  o.jacobian = [v](const Vec&, const Vec& u) { return heisenberg_jacobian(Vec(v * u)); };
  return VectorFieldStructure(3, static_cast<int>(basis.size()),
                              [v](const Vec& p) { return Mat(heisenberg_frame(p) * v); },
                              std::move(o));
}

VaryingNorm left_invariant_norm(const std::vector<Vec>& basis) {
  const Mat v = basis_matrix(basis);
  return VaryingNorm::ellipsoid(Mat(v.transpose() * v));
}

StructureFamily left_invariant_family(const std::vector<double>& params,
                                      const std::vector<std::vector<Vec>>& bases,
                                      double limit_param) {
  if (params.size() != bases.size()) throw InvalidArgument("one basis per parameter is required");
  std::vector<FamilyMember> members;
  for (const auto& b : bases) members.push_back({left_invariant_structure(b), left_invariant_norm(b)});
  return StructureFamily("lie-left-invariant", params, std::move(members), limit_param, true);
}

StructureFamily subspace_sequence_family(std::vector<double> n) {
  if (n.empty()) throw InvalidArgument("subspace family needs at least one n");
  if (std::find(n.begin(), n.end(), kInf) == n.end()) n.push_back(kInf);
  std::vector<std::vector<Vec>> bases;
  for (double v : n) {
    if (!(v > 0.0)) throw InvalidArgument("subspace family needs n > 0");
    bases.push_back({make_vec({1.0, 0.0, 0.0}), make_vec({0.0, 1.0, 1.0 / v})});
  }
  return left_invariant_family(n, bases, kInf);
}

namespace {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

double strip_conformal_factor(double n, const Vec& p) {
  require_point(p, 2);
  if (!(n >= 1.0)) throw InvalidArgument("strip family needs n >= 1");
  const double s = 1.0 - smooth_step(std::abs(p(0)) - 1.0);
  double t = 1.0;
  if (std::isfinite(n)) {
    const double start = 1.0 - 1.0 / (2.0 * n);
    const double width = 1.0 / (4.0 * n);
    t = 1.0 - smooth_step((std::abs(p(1)) - start) / width);
  }
  return 1.0 + 9.0 * s * t;
}

StructureFamily strip_counterexample_family(std::vector<double> n) {
  if (n.empty()) throw InvalidArgument("strip family needs at least one n");
  if (std::find(n.begin(), n.end(), kInf) == n.end()) n.push_back(kInf);
  std::vector<FamilyMember> members;
  for (double v : n) {
    if (!(v >= 1.0)) throw InvalidArgument("strip family needs n >= 1");
    VaryingNorm norm = VaryingNorm::euclidean(2).with_scale(
        [v](const Vec& p) { return std::sqrt(strip_conformal_factor(v, p)); });
    members.push_back({identity_structure(2, label("strip", v)), std::move(norm)});
  }
  return StructureFamily("strip-counterexample", n, std::move(members), kInf, false);
}

StructureFamily euclidean_family(int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("euclidean dimension out of range");
  return StructureFamily("euclidean", {0.0},
                         {FamilyMember{identity_structure(dim, "euclidean"), VaryingNorm::euclidean(dim)}},
                         0.0, true);
}

StructureFamily polynomial_family(const std::vector<PolynomialMember>& members, double limit_param,
                                  bool boundedly_compact) {
  if (members.empty()) throw InvalidArgument("generic family needs at least one member");
  std::vector<double> params;
  std::vector<FamilyMember> out;
  for (const auto& m : members) {
    params.push_back(m.param);
    VaryingNorm norm = m.norm_weights.size() == 0
                           ? VaryingNorm::euclidean(m.frame.dim_k())
                           : VaryingNorm::weighted_lp(m.norm_weights, m.norm_exponent);
    if (norm.dim_k() != m.frame.dim_k()) throw DimensionMismatch("norm weights need one entry per field");
    out.push_back({m.frame.to_structure(label("polynomial", m.param)), std::move(norm)});
  }
  return StructureFamily("generic-family", std::move(params), std::move(out), limit_param,
                         boundedly_compact);
}

namespace {

// Constant moves tau * (c1, c2, 0, ...) on the first two fields.
std::vector<GraphMove> planar_chords(int dim_k, double tau, int radius) {
  std::vector<GraphMove> moves;
  for (auto& mv : chord_moves(2, tau, radius)) {
    Vec value = Vec::Zero(dim_k);
    value.head(2) = mv.control.value(0);
    moves.push_back({PiecewiseConstantControl::constant(value), mv.label});
  }
  return moves;
}

// Lattice on which horizontal chords of the sub-Riemannian Heisenberg
// structure land exactly: z spacing h^2 / 2.
GridGraphSpec heisenberg_lattice(int dim_k, double h, double half_x, double half_z, int radius) {
  GridGraphSpec g;
  const int nx = static_cast<int>(std::lround(2.0 * half_x / h)) + 1;
  const int nz = static_cast<int>(std::lround(2.0 * half_z / (0.5 * h * h))) + 1;
  g.resolution = {nx, nx, nz};
  g.tau = h;
  g.moves = planar_chords(dim_k, h, radius);
  g.snap_tolerance = 1e-9;
  g.steps_per_move = 1;  // RK4 is exact on horizontal chords
  return g;
}

constexpr double kLatticeH = 0.05;
constexpr double kLatticeHalfZ = 0.3;
constexpr int kLatticeRadius = 3;

void heisenberg_checks(Scenario& s, int dim_k) {
  s.check_pairs = {{make_vec({0, 0, 0}), make_vec({1, 0, 0})},
                   {make_vec({0, 0, 0}), make_vec({0, 0, 0.25})},
                   {make_vec({0, 0.5, 0.1}), make_vec({-0.3, 0.4, -0.1})}};
  s.graph = heisenberg_lattice(dim_k, kLatticeH, 1.0, kLatticeHalfZ, kLatticeRadius);
  s.graph_box = ChartBox(make_vec({-1, -1, -kLatticeHalfZ}), make_vec({1, 1, kLatticeHalfZ}));
}

std::vector<Vec> heisenberg_points() {
  return {make_vec({0, 0, 0}), make_vec({0.6, 0, 0}), make_vec({0, 0.5, 0.1}),
          make_vec({0, 0, 0.25}), make_vec({-0.3, 0.4, -0.1})};
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

}  // namespace

Scenario build_scenario(const ScenarioSpec& spec) {
  const std::string& name = spec.name;
  if (name == "heisenberg-eps") {
    const auto eps = or_default(spec.params, {1.0, 0.5, 0.25, 0.1});
    Scenario s{spec, heisenberg_family(eps), ChartBox::cube(3, 1.0)};
    s.points = heisenberg_points();
    // The vertical pair still gains about 6.5% of the diameter at eps = 0.1
    // from the eps Z shortcut; deviations shrink roughly linearly in eps.
    s.relative_threshold = 0.10;
    s.check_param = 0.0;
    heisenberg_checks(s, 3);
    return s;
  }
  if (name == "dilation") {
    const auto eps = or_default(spec.params, {1.0, 0.5, 0.25});
    const std::vector<int> weights = spec.weights.empty() ? std::vector<int>{1, 1, 2} : spec.weights;
    DilationFamily d = dilation_family(perturbed_heisenberg(spec.perturbation), VaryingNorm::euclidean(2),
                                       weights, eps, heisenberg_horizontal(), VaryingNorm::euclidean(2));
    Scenario s{spec, d.family, ChartBox::cube(3, 1.0)};
    s.dilation = std::move(d);
    s.points = heisenberg_points();
    s.check_param = 0.0;
    heisenberg_checks(s, 2);
    return s;
  }
  if (name == "lie-left-invariant") {
    const auto n = or_default(spec.params, {2.0, 4.0, 8.0, 16.0});
    Scenario s{spec, subspace_sequence_family(n), ChartBox::cube(3, 1.0)};
    s.points = heisenberg_points();
    s.check_param = kInf;
    heisenberg_checks(s, 2);
    return s;
  }
  if (name == "strip-counterexample") {
    const auto n = or_default(spec.params, {1.0, 2.0, 4.0, 8.0, 16.0});
    Scenario s{spec, strip_counterexample_family(n),
               ChartBox(make_vec({-3.0, -1.0}), make_vec({3.0, 1.0}))};
    s.inflation = 0.0;
    s.points = {make_vec({-2, 0}), make_vec({2, 0}), make_vec({-2.5, 0.5})};
    s.check_param = 8.0;
    if (!s.family.contains(8.0)) s.check_param = s.family.ordered_toward_limit().back();
    s.check_pairs = {{make_vec({-2, 0}), make_vec({2, 0})},
                     {make_vec({-2.5, -0.5}), make_vec({-2.0, 0.5})}};
    const double h = 1.0 / 32.0;
    s.graph.resolution = {193, 65};
    s.graph.tau = h;
    s.graph.moves = chord_moves(2, h, 3);
    s.graph.snap_tolerance = 1e-9;
    s.graph.steps_per_move = 4;
    s.graph_box = s.box;
    s.graph_seed = true;
    return s;
  }
  if (name == "euclidean") {
    const int dim = spec.dim;
    Scenario s{spec, euclidean_family(dim), ChartBox(Vec::Zero(dim), Vec::Ones(dim))};
    Vec a = Vec::Zero(dim), b = Vec::Zero(dim), c = Vec::Constant(dim, 0.5);
    b(0) = 1.0;
    Vec d = Vec::Constant(dim, 0.2);
    Vec e = Vec::Constant(dim, 0.7);
    e(0) = 0.9;
    s.points = {a, b, c, d};
    s.check_param = 0.0;
    s.check_pairs = {{a, b}, {d, e}};
    const int res = 41;
    s.graph.resolution.assign(static_cast<std::size_t>(dim), res);
    s.graph.tau = 1.0 / (res - 1);
    s.graph.moves = chord_moves(dim, s.graph.tau, dim <= 2 ? 3 : 1);
    s.graph.snap_tolerance = 1e-9;
    s.graph.steps_per_move = 1;
    s.graph_box = s.box;
    return s;
  }
  if (name == "generic-family") {
    if (spec.members.empty()) throw InvalidArgument("generic-family needs members");
    const double limit = spec.limit_param.value_or(spec.members.back().param);
    StructureFamily fam = polynomial_family(spec.members, limit, spec.boundedly_compact);
    const int m = fam.dim_m();
    Scenario s{spec, std::move(fam), ChartBox::cube(m, 1.0)};
    Vec o = Vec::Zero(m), a = Vec::Zero(m);
    a(0) = 0.5;
    s.points = {o, a};
    s.check_param = limit;
    s.check_pairs = {{o, a}};
    s.graph.resolution.assign(static_cast<std::size_t>(m), 21);
    s.graph.tau = 0.1;
    s.graph.moves = chord_moves(s.family.dim_k(), 0.1, 1);
    s.graph.snap_tolerance = 0.05 * std::sqrt(static_cast<double>(m));
    s.graph_box = s.box;
    return s;
  }
  throw InvalidArgument("unknown scenario '" + name + "'");
}

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> catalog = {
      {"heisenberg-eps", "Heisenberg group, f_eps = v1 X + v2 Y + eps v3 Z, Euclidean norm, limit eps = 0",
       {"eps"}},
      {"dilation", "Dilation rescalings of the perturbed frame {X + c x^2 d_z, Y}, limit {X, Y}",
       {"eps", "weights", "perturbation"}},
      {"lie-left-invariant", "Left-invariant structures on span{e1, e2 + e3/n}, limit n = inf", {"n"}},
      {"generic-family", "User-supplied polynomial frames with weighted l^q norms",
       {"members", "limit", "boundedly_compact"}},
      {"strip-counterexample", "Conformal metrics g_n on R x (-1,1) whose distances do not converge",
       {"n"}},
      {"euclidean", "Identity frame with the Euclidean norm on [0,1]^dim", {"dim"}},
  };
  return catalog;
}

}  // namespace ccdist
