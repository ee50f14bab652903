#include "ccdist/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ccdist/errors.hpp"
#include "ccdist/functionals.hpp"
#include "ccdist/io.hpp"
#include "ccdist/parallel.hpp"
#include "ccdist/topology.hpp"
#include "json.hpp"

namespace ccdist {

using Json = nlohmann::json;
using OJson = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::pair<Operation, const char*>> kOperations = {
    {Operation::kDistance, "distance"},       {Operation::kGeodesic, "geodesic"},
    {Operation::kBall, "ball"},               {Operation::kConverge, "converge"},
    {Operation::kRescaleCheck, "rescale-check"}, {Operation::kRelaxProbe, "relax-probe"},
    {Operation::kDegree, "degree"},           {Operation::kBracket, "bracket"},
    {Operation::kReparam, "reparam"},
};

// Typed access to one JSON object; every error names the key and section.
class Section {
 public:
  Section(const Json& j, std::string where, const std::set<std::string>& allowed)
      : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError("'" + where_ + "' must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key) const { return to_number(at(key), key); }

  int integer(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) fail(key, "an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "a 32-bit integer");
    return static_cast<int>(x);
  }

  bool boolean(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_boolean()) fail(key, "a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_array()) fail(key, "an array of numbers");
    std::vector<double> out;
    for (const Json& x : v) out.push_back(to_number(x, key));
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_array()) fail(key, "an array of integers");
    std::vector<int> out;
    for (const Json& x : v) {
      if (!x.is_number_integer()) fail(key, "an array of integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  Vec point(const std::string& key) const { return to_point(at(key), key); }

  std::vector<Vec> points(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_array()) fail(key, "an array of points");
    std::vector<Vec> out;
    for (const Json& x : v) out.push_back(to_point(x, key));
    return out;
  }

  std::vector<std::pair<Vec, Vec>> pairs(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_array()) fail(key, "an array of [p, q] pairs");
    std::vector<std::pair<Vec, Vec>> out;
    for (const Json& x : v) {
      if (!x.is_array() || x.size() != 2) fail(key, "an array of [p, q] pairs");
      out.emplace_back(to_point(x[0], key), to_point(x[1], key));
    }
    return out;
  }

  const Json& raw(const std::string& key) const { return at(key); }
  const std::string& where() const { return where_; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("key '" + key + "' in " + where_ + " must be " + what);
  }

 private:
  const Json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError("missing key '" + key + "' in " + where_);
    return j_.at(key);
  }

  double to_number(const Json& v, const std::string& key) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf") return kInf;
      if (s == "-inf") return -kInf;
    }
    fail(key, "a number (or \"inf\")");
  }

  Vec to_point(const Json& v, const std::string& key) const {
    if (!v.is_array() || v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) {
      fail(key, "a point (array of 1 to " + std::to_string(kMaxDim) + " numbers)");
    }
    Vec p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key, "a point of finite numbers");
      p(static_cast<Eigen::Index>(i)) = v[i].get<double>();
      if (!std::isfinite(p(static_cast<Eigen::Index>(i)))) fail(key, "a point of finite numbers");
    }
    return p;
  }

  const Json& j_;
  std::string where_;
};

PolynomialMember parse_member(const Json& j, std::size_t index) {
  const Section s(j, "scenario.members[" + std::to_string(index) + "]",
                  {"param", "dim_m", "dim_k", "terms", "norm_weights", "norm_exponent"});
  PolynomialMember m;
  m.param = s.number("param");
  const int dim_m = s.integer("dim_m");
  const int dim_k = s.integer("dim_k");
  if (dim_m < 1 || dim_m > kMaxDim || dim_k < 1 || dim_k > kMaxDim) {
    s.fail("dim_m", "between 1 and " + std::to_string(kMaxDim) + " (dim_k likewise)");
  }
  m.frame = PolynomialFrame(dim_m, dim_k);
  const Json& terms = s.raw("terms");
  if (!terms.is_array()) s.fail("terms", "an array of monomial terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Section ts(terms[t], s.where() + ".terms[" + std::to_string(t) + "]",
                     {"row", "col", "coefficient", "exponents"});
    Monomial mono;
    mono.coefficient = ts.number("coefficient");
    if (ts.has("exponents")) mono.exponents = ts.integers("exponents");
    try {
      m.frame.add_term(ts.integer("row"), ts.integer("col"), mono);
    } catch (const Error& e) {
      throw ConfigError(ts.where() + ": " + e.what());
    }
  }
  if (s.has("norm_weights")) {
    const auto w = s.numbers("norm_weights");
    if (static_cast<int>(w.size()) != dim_k) s.fail("norm_weights", "one weight per field");
    m.norm_weights = Vec(dim_k);
    for (int i = 0; i < dim_k; ++i) m.norm_weights(i) = w[static_cast<std::size_t>(i)];
  }
  if (s.has("norm_exponent")) m.norm_exponent = s.number("norm_exponent");
  return m;
}

ScenarioSpec parse_scenario(const Json& j) {
  if (!j.is_object()) throw ConfigError("'scenario' must be a JSON object");
  if (!j.contains("name") || !j.at("name").is_string()) {
    throw ConfigError("missing key 'name' in scenario");
  }
  ScenarioSpec spec;
  spec.name = j.at("name").get<std::string>();
  const ScenarioInfo* info = nullptr;
  for (const auto& entry : scenario_catalog()) {
    if (entry.name == spec.name) info = &entry;
  }
  if (!info) throw ConfigError("unknown scenario name '" + spec.name + "'");
  std::set<std::string> allowed(info->keys.begin(), info->keys.end());
  allowed.insert("name");
  const Section s(j, "scenario", allowed);
  if (s.has("eps")) spec.params = s.numbers("eps");
  if (s.has("n")) spec.params = s.numbers("n");
  if (s.has("weights")) spec.weights = s.integers("weights");
  if (s.has("perturbation")) spec.perturbation = s.number("perturbation");
  if (s.has("dim")) spec.dim = s.integer("dim");
  if (s.has("limit")) spec.limit_param = s.number("limit");
  if (s.has("boundedly_compact")) spec.boundedly_compact = s.boolean("boundedly_compact");
  if (s.has("members")) {
    const Json& members = s.raw("members");
    if (!members.is_array()) s.fail("members", "an array of member objects");
    for (std::size_t i = 0; i < members.size(); ++i) spec.members.push_back(parse_member(members[i], i));
  }
  return spec;
}

std::set<std::string> operation_keys(Operation op) {
  const std::set<std::string> solver = {"lambda", "segments", "restarts", "endpoint_tol",
                                        "steps_per_segment"};
  const std::set<std::string> grid = {"grid_resolution", "grid_tau", "grid_snap", "grid_chord_radius"};
  std::set<std::string> keys;
  switch (op) {
    case Operation::kDistance:
      keys = {"p", "q", "points", "method", "expect_value", "expect_rel_tol"};
      keys.insert(grid.begin(), grid.end());
      break;
    case Operation::kGeodesic:
      keys = {"p", "q", "expect_value", "expect_rel_tol"};
      break;
    case Operation::kBall:
      keys = {"p", "radius"};
      keys.insert(grid.begin(), grid.end());
      break;
    case Operation::kConverge:
      keys = {"points", "threshold", "monotone_slack", "expect_verdict"};
      break;
    case Operation::kRescaleCheck:
      keys = {"eps", "pairs", "isometry_form", "expect_value"};
      break;
    case Operation::kRelaxProbe:
      keys = {"p", "q", "radius", "samples", "noise", "expect_verdict"};
      break;
    case Operation::kDegree:
      return {"lambda", "map", "p", "radius", "resolution", "sigma", "t_center", "steps_per_segment",
              "expect_winding"};
    case Operation::kBracket:
      return {"lambda", "p", "depth", "h", "expect_rank"};
    case Operation::kReparam:
      keys = {"p", "control", "out_segments"};
      break;
  }
  keys.insert(solver.begin(), solver.end());
  return keys;
}

OperationParams parse_params(const Json& j, Operation op) {
  OperationParams p;
  const Section s(j, "params", operation_keys(op));
  if (s.has("lambda")) p.lambda = s.number("lambda");
  if (s.has("points")) p.points = s.points("points");
  if (s.has("pairs")) p.pairs = s.pairs("pairs");
  if (s.has("p")) p.p = s.point("p");
  if (s.has("q")) p.q = s.point("q");
  if (s.has("eps")) p.eps = s.numbers("eps");
  if (s.has("method")) {
    p.method = s.string("method");
    if (p.method != "control-opt" && p.method != "grid-graph") {
      s.fail("method", "\"control-opt\" or \"grid-graph\"");
    }
  }
  if (s.has("segments")) p.segments = s.integer("segments");
  if (p.segments < 1 || p.segments > 4096) s.fail("segments", "between 1 and 4096");
  if (s.has("restarts")) p.restarts = s.integer("restarts");
  if (p.restarts < 0) s.fail("restarts", ">= 0");
  if (s.has("endpoint_tol")) p.endpoint_tol = s.number("endpoint_tol");
  if (!(p.endpoint_tol > 0.0)) s.fail("endpoint_tol", "positive");
  if (s.has("steps_per_segment")) p.steps_per_segment = s.integer("steps_per_segment");
  if (p.steps_per_segment < 1) s.fail("steps_per_segment", ">= 1");
  if (s.has("radius")) p.radius = s.number("radius");
  if (s.has("samples")) p.samples = s.integer("samples");
  if (p.samples < 1) s.fail("samples", ">= 1");
  if (s.has("noise")) p.noise = s.number("noise");
  if (s.has("threshold")) p.threshold = s.number("threshold");
  if (s.has("monotone_slack")) p.monotone_slack = s.number("monotone_slack");
  if (s.has("depth")) p.depth = s.integer("depth");
  if (s.has("h")) p.h = s.number("h");
  if (s.has("map")) p.map = s.string("map");
  if (s.has("sigma")) p.sigma = s.integers("sigma");
  if (s.has("t_center")) p.t_center = s.point("t_center");
  if (s.has("resolution")) p.resolution = s.integer("resolution");
  if (s.has("control")) p.control = s.points("control");
  if (s.has("out_segments")) p.out_segments = s.integer("out_segments");
  if (s.has("isometry_form")) p.isometry_form = s.boolean("isometry_form");
  if (s.has("grid_resolution")) p.grid_resolution = s.integers("grid_resolution");
  if (s.has("grid_tau")) p.grid_tau = s.number("grid_tau");
  if (s.has("grid_snap")) p.grid_snap = s.number("grid_snap");
  if (s.has("grid_chord_radius")) p.grid_chord_radius = s.integer("grid_chord_radius");
  if (s.has("expect_value")) p.expect_value = s.number("expect_value");
  if (s.has("expect_rel_tol")) p.expect_rel_tol = s.number("expect_rel_tol");
  if (s.has("expect_verdict")) p.expect_verdict = s.string("expect_verdict");
  if (s.has("expect_winding")) p.expect_winding = s.integer("expect_winding");
  if (s.has("expect_rank")) p.expect_rank = s.integer("expect_rank");
  return p;
}

void require_dim(const Vec& v, int m, const std::string& key) {
  if (v.size() != m) {
    throw ConfigError("key '" + key + "' in params must have dimension " + std::to_string(m));
  }
}

// Cross-checks parameters against the scenario (dimensions, members).
void validate_against(const ExperimentConfig& c, const Scenario& s) {
  const OperationParams& p = c.params;
  const int m = s.family.dim_m();
  const int k = s.family.dim_k();
  if (p.lambda && !s.family.contains(*p.lambda)) {
    throw ConfigError("key 'lambda' in params: " + param_label(*p.lambda) + " is not a member of " +
                      s.family.name());
  }
  if (p.p) require_dim(*p.p, m, "p");
  if (p.q) require_dim(*p.q, m, "q");
  for (const Vec& x : p.points) require_dim(x, m, "points");
  for (const auto& [a, b] : p.pairs) {
    require_dim(a, m, "pairs");
    require_dim(b, m, "pairs");
  }
  if (!p.grid_resolution.empty() && static_cast<int>(p.grid_resolution.size()) != m) {
    throw ConfigError("key 'grid_resolution' in params needs one entry per axis");
  }
  switch (c.operation) {
    case Operation::kDistance:
      if (!(p.p && p.q) && p.points.size() < 2) {
        throw ConfigError("params: distance needs 'p' and 'q', or at least two 'points'");
      }
      break;
    case Operation::kGeodesic:
    case Operation::kRelaxProbe:
      if (!p.p || !p.q) throw ConfigError("params: this operation needs 'p' and 'q'");
      if (c.operation == Operation::kRelaxProbe && !(p.radius >= 0.0)) {
        throw ConfigError("key 'radius' in params must be >= 0");
      }
      break;
    case Operation::kBall:
      if (!p.p) throw ConfigError("missing key 'p' in params");
      if (!(p.radius > 0.0)) throw ConfigError("key 'radius' in params must be positive");
      break;
    case Operation::kConverge:
      if (s.family.ordered_toward_limit().empty()) {
        throw ConfigError("scenario: converge needs at least one non-limit member");
      }
      break;
    case Operation::kRescaleCheck: {
      const bool iso = p.isometry_form || s.spec.name == "heisenberg-eps";
      if (iso && s.spec.name != "heisenberg-eps") {
        throw ConfigError("key 'isometry_form' in params needs the heisenberg-eps scenario");
      }
      if (iso && !s.family.contains(1.0)) {
        throw ConfigError("scenario: the isometry check needs the eps = 1 member");
      }
      if (!iso && !s.dilation) throw ConfigError("scenario: rescale-check needs the dilation scenario");
      for (double e : p.eps) {
        if (!(e > 0.0) || !s.family.contains(e)) {
          throw ConfigError("key 'eps' in params: " + param_label(e) + " is not a positive member");
        }
      }
      break;
    }
    case Operation::kDegree: {
      static const std::set<std::string> maps = {"identity", "square", "conjugate", "constant", "flow"};
      if (!maps.count(p.map)) {
        throw ConfigError("key 'map' in params must be identity, square, conjugate, constant or flow");
      }
      if (p.resolution < 16) throw ConfigError("key 'resolution' in params must be >= 16");
      if (p.map == "flow") {
        if (m != 2) throw ConfigError("params: map 'flow' needs a planar scenario (m = 2)");
        if (p.sigma.size() != 2) throw ConfigError("key 'sigma' in params needs two field indices");
        for (int i : p.sigma) {
          if (i < 0 || i >= k) throw ConfigError("key 'sigma' in params has an index outside [0, k)");
        }
        if (p.t_center) require_dim(*p.t_center, 2, "t_center");
      } else if (p.p) {
        require_dim(*p.p, 2, "p");
      }
      break;
    }
    case Operation::kBracket:
      if (p.depth < 1 || p.depth > 4) throw ConfigError("key 'depth' in params must be between 1 and 4");
      if (!(p.h > 1e-6 && p.h < 1e-2)) throw ConfigError("key 'h' in params must lie in (1e-6, 1e-2)");
      break;
    case Operation::kReparam:
      if (p.control.empty()) throw ConfigError("missing key 'control' in params");
      for (const Vec& u : p.control) {
        if (u.size() != k) throw ConfigError("key 'control' in params needs segment values of dimension k");
      }
      break;
  }
}

}  // namespace

const char* to_string(Operation op) {
  for (const auto& [o, name] : kOperations) {
    if (o == op) return name;
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const Section top(j, "config", {"scenario", "operation", "params", "seed", "output"});
  ExperimentConfig c;
  c.scenario = parse_scenario(top.raw("scenario"));
  const std::string op = top.string("operation");
  bool known = false;
  for (const auto& [o, name] : kOperations) {
    if (op == name) {
      c.operation = o;
      known = true;
    }
  }
  if (!known) throw ConfigError("unknown operation '" + op + "'");
  c.params = parse_params(top.has("params") ? top.raw("params") : Json::object(), c.operation);
  if (top.has("seed")) {
    const Json& s = top.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      top.fail("seed", "a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (top.has("output")) c.output = top.string("output");
  try {
    const Scenario s = build_scenario(c.scenario);
    validate_against(c, s);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  c.canonical_json = j.dump();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

namespace {

class Runner {
 public:
  Runner(const ExperimentConfig& c, const Scenario& s, std::uint64_t seed, int threads,
         std::filesystem::path dir, Manifest& manifest)
      : c_(c), p_(c.params), s_(s), seed_(seed), threads_(threads), dir_(std::move(dir)),
        manifest_(manifest) {}

  OJson run() {
    switch (c_.operation) {
      case Operation::kDistance: return distance();
      case Operation::kGeodesic: return geodesic_op();
      case Operation::kBall: return ball();
      case Operation::kConverge: return converge();
      case Operation::kRescaleCheck: return rescale();
      case Operation::kRelaxProbe: return relax();
      case Operation::kDegree: return degree();
      case Operation::kBracket: return bracket();
      case Operation::kReparam: return reparam();
    }
    throw Error("unhandled operation");
  }

 private:
  void emit(const std::string& name, const std::string& text, const std::string& description) {
    write_text(dir_ / name, text);
    manifest_.files.push_back({name, description});
  }

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      manifest_.assertion_failed = true;
      failures_.push_back(what);
    }
  }

  double lambda() const { return p_.lambda.value_or(s_.family.limit_param()); }
  const FamilyMember& member() const { return s_.family.member(lambda()); }

  DistanceOptions solver() const {
    DistanceOptions o;
    o.segments = p_.segments;
    o.restarts = p_.restarts;
    o.endpoint_tol = p_.endpoint_tol;
    o.steps_per_segment = p_.steps_per_segment;
    o.box = s_.box;
    o.inflation = s_.inflation;
    o.seed = seed_;
    o.threads = threads_;
    if (s_.graph_seed) o.graph_seed = s_.graph;
    return o;
  }

  GridGraphSpec lattice() const {
    GridGraphSpec g = s_.graph;
    if (!p_.grid_resolution.empty()) g.resolution = p_.grid_resolution;
    if (p_.grid_tau) g.tau = *p_.grid_tau;
    if (p_.grid_snap) g.snap_tolerance = *p_.grid_snap;
    if (p_.grid_chord_radius) g.moves = chord_moves(s_.family.dim_k(), g.tau, *p_.grid_chord_radius);
    else if (p_.grid_tau) g.moves = flow_word_moves(s_.family.dim_k(), g.tau, 2);
    return g;
  }

  void expect_value(double value) {
    if (p_.expect_value) {
      const double tol = p_.expect_rel_tol * std::abs(*p_.expect_value);
      expect(std::abs(value - *p_.expect_value) <= tol,
             "value " + format_double(value) + " differs from expected " + format_double(*p_.expect_value));
    }
  }

  OJson distance() {
    const FamilyMember& m = member();
    const bool graph = p_.method == "grid-graph";
    if (p_.p && p_.q) {
      const DistanceEstimate e = graph ? cc_distance_graph(*p_.p, *p_.q, m.f, m.norm, lattice(), s_.graph_box)
                                       : cc_distance_opt(*p_.p, *p_.q, m.f, m.norm, solver());
      emit("distance.json", to_json(e) + "\n", "distance estimate");
      if (!graph && e.best_control) {
        EndpointOptions eo;
        eo.steps_per_segment = p_.steps_per_segment;
        emit("trajectory.csv", trajectory_csv(endpoint(*p_.p, m.f, *e.best_control, eo)),
             "constant-speed trajectory of the best control");
      }
      expect(e.found, "no admissible curve found");
      expect_value(e.value);
      OJson j = OJson::parse(to_json(e));
      j.erase("best_control");
      return j;
    }
    TableOptions t;
    t.method = graph ? DistanceMethod::kGridGraph : DistanceMethod::kControlOpt;
    t.opt = solver();
    t.threads = threads_;
    if (graph) {
      t.graph = lattice();
      t.graph_box = s_.graph_box;
    }
    const DistanceTable table = family_distance_table(s_.family, lambda(), p_.points, t);
    emit("distances.csv", distances_csv({table}), "all-pairs distance table");
    expect(table.all_found(), "some pairs were not found");
    OJson j;
    j["lambda"] = param_label(lambda());
    j["points"] = table.size();
    j["all_found"] = table.all_found();
    return j;
  }

  OJson geodesic_op() {
    const FamilyMember& m = member();
    const GeodesicResult g = geodesic(*p_.p, *p_.q, m.f, m.norm, solver());
    emit("geodesic.json", to_json(g.estimate) + "\n", "geodesic estimate");
    emit("trajectory.csv", trajectory_csv(g.trajectory), "constant-speed geodesic samples");
    expect_value(g.estimate.value);
    OJson j;
    j["length"] = g.estimate.value;
    j["energy"] = g.estimate.energy;
    j["endpoint_residual"] = g.estimate.endpoint_residual;
    return j;
  }

  OJson ball() {
    const FamilyMember& m = member();
    const auto b = metric_ball(*p_.p, p_.radius, m.f, m.norm, lattice(), s_.graph_box);
    emit("ball.csv", ball_csv(b), "lattice nodes within the radius, with graph distances");
    OJson j;
    j["nodes"] = b.size();
    j["radius"] = p_.radius;
    return j;
  }

  OJson converge() {
    ReportOptions r;
    r.monotone_slack = p_.monotone_slack;
    r.final_threshold = p_.threshold;
    r.relative_threshold = s_.relative_threshold;
    r.table.opt = solver();
    r.table.opt.threads = 1;
    r.table.threads = threads_;
    const std::vector<Vec> points = p_.points.empty() ? s_.points : p_.points;
    const ConvergenceReport report = uniform_convergence_report(s_.family, points, r);
    emit("convergence.csv", report_csv(report), "per-pair deviations from the limit");
    emit("distances.csv", distances_csv(report.tables), "distance tables per parameter");
    emit("summary.json", report_summary_json(report) + "\n", "sup deviations and verdict");
    if (p_.expect_verdict) {
      expect(report.verdict == *p_.expect_verdict, "verdict " + report.verdict);
    }
    return OJson::parse(report_summary_json(report));
  }

  OJson rescale() {
    const bool iso = p_.isometry_form || s_.spec.name == "heisenberg-eps";
    std::vector<double> eps = p_.eps;
    if (eps.empty()) {
      for (double e : s_.family.ordered_toward_limit()) {
        if (e > 0.0 && e < 1.0) eps.push_back(e);
      }
    }
    const auto pairs = p_.pairs.empty() ? s_.check_pairs : p_.pairs;
    const RescalingCheck r = iso ? isometry_identity_check(s_.family, eps, pairs, solver())
                                 : rescaling_identity_check(*s_.dilation, eps, pairs, solver());
    std::ostringstream csv;
    csv << "eps,pair,lhs,rhs,rel_residual\n";
    for (std::size_t e = 0, t = 0; e < eps.size(); ++e) {
      for (std::size_t i = 0; i < pairs.size(); ++i, ++t) {
        csv << format_double(eps[e]) << "," << i << "," << format_double(r.lhs[t]) << ","
            << format_double(r.rhs[t]) << "," << format_double(std::abs(r.lhs[t] - r.rhs[t]) / r.rhs[t])
            << "\n";
      }
    }
    emit("rescale.csv", csv.str(), iso ? "isometry identity, both sides" : "rescaling identity, both sides");
    if (p_.expect_value) {
      expect(r.max_relative_residual <= *p_.expect_value,
             "max residual " + format_double(r.max_relative_residual));
    }
    OJson j;
    j["form"] = iso ? "isometry" : "rescaling";
    j["max_relative_residual"] = r.max_relative_residual;
    return j;
  }

  OJson relax() {
    const RelaxationResult r =
        relaxation_probe(s_.family, *p_.p, *p_.q, p_.radius, p_.samples, solver(), p_.noise);
    std::ostringstream csv;
    csv << "sample,value\n";
    for (std::size_t i = 0; i < r.neighbor_values.size(); ++i) {
      csv << i << "," << format_double(r.neighbor_values[i]) << "\n";
    }
    emit("relax.csv", csv.str(), "neighbor distances d_lambda_n(p_n, q_n)");
    const std::string verdict = r.consistent ? "consistent" : "inconsistent";
    if (p_.expect_verdict) expect(verdict == *p_.expect_verdict, "relaxation verdict " + verdict);
    OJson j;
    j["limit_value"] = r.limit_value;
    j["min_neighbor_value"] = r.min_neighbor_value;
    j["noise"] = r.noise;
    j["verdict"] = verdict;
    return j;
  }

  OJson degree() {
    DegreeReport d;
    const double radius = p_.radius > 0.0 ? p_.radius : 1.0;
    if (p_.map == "flow") {
      const FamilyMember& m = member();
      EndpointOptions eo;
      eo.steps_per_segment = p_.steps_per_segment;
      const Vec o = p_.p.value_or(Vec::Zero(2));
      const Vec t = p_.t_center.value_or(Vec::Zero(2));
      const OpennessProbe probe = essential_openness_probe(o, m.f, p_.sigma, t, radius, p_.resolution, eo);
      d = probe.degree;
    } else {
      PlanarMap map;
      if (p_.map == "identity") map = [](const Eigen::Vector2d& x) { return x; };
      if (p_.map == "square") {
        map = [](const Eigen::Vector2d& x) {
          return Eigen::Vector2d(x.x() * x.x() - x.y() * x.y(), 2.0 * x.x() * x.y());
        };
      }
      if (p_.map == "conjugate") map = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x.x(), -x.y()); };
      if (p_.map == "constant") map = [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 1.0); };
      const Vec c = p_.p.value_or(Vec::Zero(2));
      d = winding_number(map, Eigen::Vector2d(c(0), c(1)), radius, p_.resolution);
    }
    emit("degree.json", to_json(d) + "\n", "winding number report");
    if (p_.expect_winding) expect(d.winding == *p_.expect_winding, "winding " + std::to_string(d.winding));
    return OJson::parse(to_json(d));
  }

  OJson bracket() {
    const FamilyMember& m = member();
    BracketOptions b;
    b.h = p_.h;
    const Vec at = p_.p.value_or(Vec::Zero(s_.family.dim_m()));
    const int rank = bracket_span_rank(m.f, at, p_.depth, b);
    OJson j;
    j["rank"] = rank;
    j["depth"] = p_.depth;
    OJson vectors = OJson::array();
    for (const Vec& v : bracket_vectors(m.f, at, p_.depth, b)) {
      OJson row = OJson::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
      vectors.push_back(std::move(row));
    }
    j["vectors"] = std::move(vectors);
    emit("bracket.json", j.dump(2) + "\n", "bracket vectors and span rank");
    if (p_.expect_rank) expect(rank == *p_.expect_rank, "rank " + std::to_string(rank));
    j.erase("vectors");
    return j;
  }

  OJson reparam() {
    const FamilyMember& m = member();
    const PiecewiseConstantControl u(p_.control);
    const Vec o = p_.p.value_or(Vec::Zero(s_.family.dim_m()));
    EndpointOptions eo;
    eo.steps_per_segment = p_.steps_per_segment;
    eo.box = s_.box;
    eo.inflation = s_.inflation;
    const Trajectory before = endpoint(o, m.f, u, eo);
    const ReparametrizeResult r = reparametrize_constant_speed(o, m.f, u, m.norm, p_.out_segments, eo);
    const double l0 = length(before, m.norm), l1 = length(r.trajectory, m.norm);
    const double e0 = energy(before, m.norm), e1 = energy(r.trajectory, m.norm);
    const double moved = (r.trajectory.end() - before.end()).norm();
    double lo = kInf, hi = 0.0;
    for (std::size_t s = 0; s < r.trajectory.points.size(); ++s) {
      const double speed = m.norm(r.trajectory.points[s], r.control.at(r.trajectory.times[s]));
      lo = std::min(lo, speed);
      hi = std::max(hi, speed);
    }
    const double spread = l1 > 0.0 ? (hi - lo) / l1 : 0.0;
    emit("trajectory.csv", trajectory_csv(r.trajectory), "reparametrized trajectory");
    OJson j;
    j["length_before"] = l0;
    j["length_after"] = l1;
    j["energy_before"] = e0;
    j["energy_after"] = e1;
    j["endpoint_shift"] = moved;
    j["speed_spread"] = spread;
    j["degenerate"] = r.degenerate;
    emit("reparam.json", j.dump(2) + "\n", "reparametrization invariants");
    expect(moved <= 1e-6, "endpoint moved by " + format_double(moved));
    expect(std::abs(l1 - l0) <= 0.01 * std::max(l0, 1e-12), "length changed");
    expect(e1 <= e0 * (1.0 + 1e-9) + 1e-15, "energy increased");
    expect(r.degenerate || spread <= 0.02, "speed not constant within 2%");
    return j;
  }

 public:
  std::vector<std::string> failures_;

 private:
  const ExperimentConfig& c_;
  const OperationParams& p_;
  const Scenario& s_;
  std::uint64_t seed_;
  int threads_;
  std::filesystem::path dir_;
  Manifest& manifest_;
};

}  // namespace

Manifest run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Manifest manifest;
  manifest.seed = options.seed.value_or(config.seed);
  manifest.config_hash = fnv1a_hex(config.canonical_json);
  manifest.directory = options.out_dir ? *options.out_dir
                                       : std::filesystem::path(config.output.empty() ? "ccdist-out"
                                                                                     : config.output);
  const int threads = options.threads > 0 ? options.threads : default_thread_count();
  OJson summary;
  std::vector<std::string> failures;
  try {
    std::filesystem::create_directories(manifest.directory);
    const Scenario scenario = build_scenario(config.scenario);
    Runner runner(config, scenario, manifest.seed, threads, manifest.directory, manifest);
    summary = runner.run();
    failures = runner.failures_;
  } catch (const std::exception& e) {
    manifest.error = e.what();
    manifest.exit_code = 3;
  }
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (manifest.exit_code == 0 && options.assert_mode && manifest.assertion_failed) manifest.exit_code = 4;
  manifest.summary_json = summary.is_null() ? "null" : summary.dump();

  OJson j;
  j["scenario"] = config.scenario.name;
  j["operation"] = to_string(config.operation);
  j["config_hash"] = manifest.config_hash;
  j["seed"] = manifest.seed;
  j["threads"] = threads;
  j["wall_seconds"] = manifest.wall_seconds;
  OJson files = OJson::array();
  for (const auto& f : manifest.files) files.push_back({{"path", f.path}, {"description", f.description}});
  j["files"] = std::move(files);
  j["summary"] = summary;
  j["assertions"] = {{"checked", options.assert_mode}, {"failures", failures}};
  j["error"] = manifest.error.empty() ? OJson(nullptr) : OJson(manifest.error);
  j["exit_code"] = manifest.exit_code;
  try {
    write_text(manifest.directory / "manifest.json", j.dump(2) + "\n");
  } catch (const std::exception& e) {
    if (manifest.error.empty()) manifest.error = e.what();
    manifest.exit_code = 3;
  }
  return manifest;
}

}  // namespace ccdist
