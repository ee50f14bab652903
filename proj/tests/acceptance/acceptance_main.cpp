// Acceptance suite: one PASS/FAIL line per criterion.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccdist/convergence.hpp"
#include "ccdist/distance.hpp"
#include "ccdist/experiment.hpp"
#include "ccdist/functionals.hpp"
#include "ccdist/io.hpp"
#include "ccdist/rng.hpp"
#include "ccdist/scenarios.hpp"
#include "ccdist/topology.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace ccdist;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario scenario(const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  return build_scenario(spec);
}

DistanceOptions solver_for(const Scenario& s, std::uint64_t seed) {
  DistanceOptions o;
  o.box = s.box;
  o.inflation = s.inflation;
  o.seed = seed;
  if (s.graph_seed) o.graph_seed = s.graph;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. Identity frame on [0,1]^2: control-opt within 1% of the chord.
Outcome euclidean_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = scenario("euclidean");
  const auto& m = s.family.limit();
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vec p = make_vec({rng.uniform(), rng.uniform()});
    const Vec q = make_vec({rng.uniform(), rng.uniform()});
    const auto e = cc_distance_opt(p, q, m.f, m.norm, solver_for(s, mix_seed(101, i)));
    const double chord = (q - p).norm();
    if (!e.converged) return {false, "pair " + std::to_string(i) + " did not converge"};
    worst = std::max(worst, std::abs(e.value - chord) / chord);
  }
  const double secs = since(t0);
  return {worst <= 0.01 && secs < 30.0, "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome heisenberg_single(const Vec& q, double expected, double tol, double limit_seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = scenario("heisenberg-eps");
  const auto& m = s.family.limit();
  const auto e = cc_distance_opt(Vec::Zero(3), q, m.f, m.norm, solver_for(s, 7));
  const double secs = since(t0);
  const double rel = std::abs(e.value - expected) / expected;
  return {e.converged && rel <= tol && secs < limit_seconds,
          "d = " + fmt("%.6f", e.value) + " vs " + fmt("%.6f", expected) + " (rel " + fmt("%.2e", rel) + "), " +
              fmt("%.2f", secs) + " s"};
}

// 4. d_eps(delta p, delta q) = eps d_1(p, q).
Outcome isometry() {
  const Scenario s = scenario("heisenberg-eps");
  const auto r = isometry_identity_check(s.family, {0.5, 0.25}, s.check_pairs, solver_for(s, 4));
  return {r.max_relative_residual <= 0.06, "max residual " + fmt("%.2e", r.max_relative_residual)};
}

struct ConvergeRows {
  std::vector<double> lambda;
  std::vector<double> d_lambda;
  std::vector<double> d_limit;
  std::vector<double> dev;
};

ConvergeRows read_convergence(const fs::path& csv) {
  ConvergeRows r;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) continue;
    r.lambda.push_back(std::stod(cells[0]));
    r.d_lambda.push_back(std::stod(cells[3]));
    r.d_limit.push_back(std::stod(cells[4]));
    r.dev.push_back(std::stod(cells[5]));
  }
  return r;
}

const char* kConvergeConfig = R"({
  "scenario": {"name": "heisenberg-eps", "eps": [1, 0.5, 0.25, 0.1]},
  "operation": "converge",
  "seed": 2024
})";

// 5. Monotone sup deviation and d_eps <= d_0 + 2%.
Outcome heisenberg_convergence(const fs::path& out, double& wall) {
  const auto config = parse_config(kConvergeConfig);
  RunOptions o;
  o.out_dir = out / "converge-a";
  const Manifest m = run_experiment(config, o);
  wall = m.wall_seconds;
  if (m.exit_code != 0) return {false, "run failed: " + m.error};
  const auto summary = nlohmann::json::parse(m.summary_json);
  const ConvergeRows rows = read_convergence(*o.out_dir / "convergence.csv");
  double worst = -1.0;
  for (std::size_t i = 0; i < rows.lambda.size(); ++i) {
    worst = std::max(worst, (rows.d_lambda[i] - rows.d_limit[i]) / rows.d_limit[i]);
  }
  const bool monotone = summary["monotone"].get<bool>();
  std::string sups;
  for (const auto& v : summary["sup_deviation"]) sups += fmt("%.4f ", v.get<double>());
  return {monotone && worst <= 0.02 && wall < 1200.0,
          "s = [ " + sups + "], max (d_eps - d_0)/d_0 = " + fmt("%.2e", worst) + ", " + fmt("%.1f", wall) + " s"};
}

// 6. d_eps(p,q) = eps^-1 d_1(delta p, delta q) on the perturbed frame.
Outcome rescaling() {
  const Scenario s = scenario("dilation");
  const auto r = rescaling_identity_check(*s.dilation, {0.5, 0.25}, s.check_pairs, solver_for(s, 6));
  return {r.max_relative_residual <= 0.08, "max residual " + fmt("%.2e", r.max_relative_residual)};
}

// 7. H_n = span{e1, e2 + e3/n}.
Outcome lie_family() {
  const Scenario s = scenario("lie-left-invariant");
  ReportOptions r;
  r.table.opt = solver_for(s, 7);
  r.relative_threshold = s.relative_threshold;
  const auto rep = uniform_convergence_report(s.family, s.points, r);
  double max_limit = 0.0;
  for (const auto& p : rep.pairs) max_limit = std::max(max_limit, p.d_limit);
  const double s16 = rep.sup_for(16.0);
  std::string sups;
  for (double v : rep.sup_deviation) sups += fmt("%.4f ", v);
  return {rep.monotone && rep.final_below_threshold,
          "s = [ " + sups + "], s(16)/max d_inf = " + fmt("%.3f", s16 / max_limit) + " (threshold 0.05)"};
}

// 8. Strip counterexample.
Outcome strip() {
  const Scenario s = scenario("strip-counterexample");
  ReportOptions r;
  r.table.opt = solver_for(s, 8);
  r.relative_threshold = s.relative_threshold;
  const auto rep = uniform_convergence_report(s.family, s.points, r);
  // points[0] = (-2,0), points[1] = (2,0)
  double worst_member = 0.0, limit = 0.0;
  for (const auto& p : rep.pairs) {
    if (p.i != 0 || p.j != 1) continue;
    limit = p.d_limit;
    if (std::isfinite(p.param) && p.param >= 8.0) worst_member = std::max(worst_member, p.d_lambda);
  }
  bool flagged = false;
  for (const auto& [i, j] : rep.flagged_pairs) flagged = flagged || (i == 0 && j == 1);
  return {worst_member <= 6.1 && limit >= 6.3 && flagged && rep.verdict == "non-convergence",
          "max_{n>=8} d_n = " + fmt("%.4f", worst_member) + ", d_inf = " + fmt("%.4f", limit) +
              ", flagged " + (flagged ? "yes" : "no") + ", verdict " + rep.verdict};
}

// 9. Endpoint deviation under a perturbed structure stays below the
// Gronwall bound.
Outcome gronwall() {
  int violations = 0;
  double tightest = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::uint64_t seed = mix_seed(909, t);
    Rng rng(seed);
    const int m = 2 + t % 2;
    const int k = 2 + (t / 2) % 2;
    const auto base = oracle::random_sine_field(m, k, seed, 0.4);
    // Perturbation: constant C plus sin-modulated D_i; sup |g - f| <= E.
    Mat c(m, k);
    std::vector<Mat> d(static_cast<std::size_t>(m), Mat(m, k));
    const double size = 0.01 + 0.1 * rng.uniform();
    for (int r = 0; r < m; ++r)
      for (int q = 0; q < k; ++q) c(r, q) = size * rng.normal();
    double e_bound = operator_norm(c);
    for (auto& di : d) {
      for (int r = 0; r < m; ++r)
        for (int q = 0; q < k; ++q) di(r, q) = 0.5 * size * rng.normal();
      e_bound += operator_norm(di);
    }
    const VectorFieldStructure g(m, k, [&base, c, d](const Vec& p) {
      Mat out = base.f(p) + c;
      for (std::size_t i = 0; i < d.size(); ++i) out += std::sin(p(static_cast<Eigen::Index>(i))) * d[i];
      return out;
    });
    std::vector<Vec> values;
    for (int j = 0; j < 4; ++j) {
      Vec v(k);
      for (int i = 0; i < k; ++i) v(i) = rng.normal();
      values.push_back(v);
    }
    const PiecewiseConstantControl u(values);
    Vec o(m);
    for (int i = 0; i < m; ++i) o(i) = rng.uniform(-1, 1);
    EndpointOptions eo;
    eo.steps_per_segment = 64;
    const double dev = (end_point(o, base.f, u, eo) - end_point(o, g, u, eo)).norm();
    const double sup_u = u.sup_norm();
    const double bound = gronwall_bound(e_bound * sup_u, base.lipschitz * sup_u, 1.0);
    if (dev > bound + 1e-9) ++violations;
    tightest = std::max(tightest, dev / bound);
  }
  return {violations == 0, std::to_string(violations) + " violations, max dev/bound " + fmt("%.3f", tightest)};
}

// 10. Constant-speed reparametrization invariants.
Outcome reparametrization() {
  const auto h = heisenberg_horizontal();
  const auto hn = VaryingNorm::euclidean(2);
  const auto strip_family = strip_counterexample_family({4.0});
  const auto& sm = strip_family.member(4.0);
  double worst_end = 0.0, worst_len = 0.0, worst_energy = 0.0, worst_speed = 0.0;
  for (int t = 0; t < 50; ++t) {
    Rng rng(mix_seed(1010, t));
    const bool planar = t % 2 == 1;
    const VectorFieldStructure& f = planar ? sm.f : h;
    const VaryingNorm& n = planar ? sm.norm : hn;
    const int segments = 3 + rng.index(8);
    std::vector<Vec> values;
    for (int j = 0; j < segments; ++j) {
      Vec v(2);
      v << rng.normal(), rng.normal();
      if (rng.uniform() < 0.15) v.setZero();
      values.push_back(rng.uniform(0.2, 2.0) * v);
    }
    const PiecewiseConstantControl u(values);
    const Vec o = planar ? make_vec({rng.uniform(-2, 2), rng.uniform(-0.9, 0.9)}) : Vec::Zero(3);
    const auto before = endpoint(o, f, u);
    const auto r = reparametrize_constant_speed(o, f, u, n, 4 * segments);
    if (r.degenerate) continue;
    const double l0 = length(before, n), l1 = length(r.trajectory, n);
    worst_end = std::max(worst_end, (r.trajectory.end() - before.end()).norm());
    worst_len = std::max(worst_len, std::abs(l1 - l0) / l0);
    worst_energy = std::max(worst_energy, energy(r.trajectory, n) - energy(before, n));
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
      const double speed = n(r.trajectory.points[i], r.control.at(r.trajectory.times[i]));
      worst_speed = std::max(worst_speed, std::abs(speed - l1) / l1);
    }
  }
  return {worst_end <= 1e-6 && worst_len <= 0.01 && worst_energy <= 1e-12 && worst_speed <= 0.02,
          "end " + fmt("%.1e", worst_end) + ", length " + fmt("%.1e", worst_len) + ", energy increase " +
              fmt("%.1e", std::max(0.0, worst_energy)) + ", speed spread " + fmt("%.1e", worst_speed)};
}

// 11. Polygonal vs integral length on geodesics.
Outcome length_equivalence() {
  const Scenario s = scenario("heisenberg-eps");
  const auto& m = s.family.limit();
  const std::vector<std::pair<Vec, Vec>> pairs = {{Vec::Zero(3), make_vec({0, 0, 0.25})},
                                                  {Vec::Zero(3), make_vec({0.6, 0.2, 0.1})},
                                                  {make_vec({0, 0.5, 0.1}), make_vec({-0.3, 0.4, -0.1})}};
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto g = geodesic(pairs[i].first, pairs[i].second, m.f, m.norm, solver_for(s, 11 + i));
    const auto l2 = integral_length(g.trajectory, m.f, m.norm);
    if (!l2) return {false, "integral length infinite on pair " + std::to_string(i)};
    for (int pieces : {2, 16}) {
      std::vector<double> partition;
      for (int j = 0; j <= pieces; ++j) partition.push_back(static_cast<double>(j) / pieces);
      const double l1 = polygonal_length(g.trajectory, m.f, m.norm, partition, solver_for(s, 111 + i));
      worst = std::max(worst, std::abs(l1 - *l2) / *l2);
    }
  }
  return {worst <= 0.06, "max |L1 - L2|/L2 " + fmt("%.2e", worst) + " over partitions 2 and 16"};
}

// 12. Fiber metric against least-norm and brute-force oracles.
Outcome fiber() {
  double worst_euclid = 0.0, worst_lp = 0.0;
  for (int t = 0; t < 200; ++t) {
    Rng rng(mix_seed(1212, t));
    const int m = 1 + rng.index(3);
    const bool euclid = t < 100;
    const int k = m + (euclid ? rng.index(3) : 1 + rng.index(2));
    Mat a(m, k);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
    Vec v(m);
    for (int i = 0; i < m; ++i) v(i) = rng.normal();
    const Vec p = Vec::Zero(m);
    const auto f = constant_structure(a);
    if (euclid) {
      const auto r = fiber_metric(p, v, f, VaryingNorm::euclidean(k));
      worst_euclid = std::max(worst_euclid, std::abs(r.value - oracle::least_norm(a, v)));
      continue;
    }
    Vec w(k);
    for (int i = 0; i < k; ++i) w(i) = rng.uniform(0.5, 2.0);
    const double q = t % 2 == 0 ? 1.0 : INFINITY;
    const auto norm = VaryingNorm::weighted_lp(w, q);
    const auto r = fiber_metric(p, v, f, norm);
    const double span = 1.0 + 8.0 * std::sqrt(static_cast<double>(k)) * oracle::least_norm(a, v);
    const double brute = oracle::brute_force_fiber(a, v, [&](const Vec& u) { return norm(p, u); }, span);
    worst_lp = std::max(worst_lp, std::abs(r.value - brute));
  }
  return {worst_euclid <= 1e-8 && worst_lp <= 1e-3,
          "euclidean max err " + fmt("%.1e", worst_euclid) + ", l1/linf max err " + fmt("%.1e", worst_lp)};
}

// 13. Degrees and bracket rank.
Outcome topology() {
  using V2 = Eigen::Vector2d;
  const V2 c(0, 0);
  const int id = winding_number([](const V2& x) { return x; }, c, 1.0, 256).winding;
  const int sq = winding_number([](const V2& x) { return V2(x.x() * x.x() - x.y() * x.y(), 2 * x.x() * x.y()); },
                                c, 1.0, 256)
                     .winding;
  const int cj = winding_number([](const V2& x) { return V2(x.x(), -x.y()); }, c, 1.0, 256).winding;
  const int ct = winding_number([](const V2&) { return V2(1, 1); }, c, 1.0, 256).winding;
  int bad_embeddings = 0;
  for (int t = 0; t < 20; ++t) {
    Rng rng(mix_seed(1313, t));
    Eigen::Matrix2d m;
    do {
      m << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    } while (std::abs(m.determinant()) < 0.2);
    const double smin = Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues()(1);
    // Perturbation with Lipschitz constant below smin keeps F injective.
    const double alpha = 0.45 * smin * rng.uniform();
    const V2 shift(rng.normal(), rng.normal());
    const auto map = [m, alpha, shift](const V2& x) {
      return V2(m * x + shift + alpha * V2(std::sin(x.y()), std::sin(x.x())));
    };
    const auto r = winding_number(map, V2(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(0.1, 1.0), 256);
    if (std::abs(r.winding) != 1) ++bad_embeddings;
  }
  const auto f = heisenberg_horizontal();
  const Vec p = make_vec({0.3, -0.2, 0.1});
  const int r1 = bracket_span_rank(f, p, 1), r2 = bracket_span_rank(f, p, 2);
  const bool ok = id == 1 && sq == 2 && cj == -1 && ct == 0 && bad_embeddings == 0 && r1 == 2 && r2 == 3;
  return {ok, "windings " + std::to_string(id) + "/" + std::to_string(sq) + "/" + std::to_string(cj) + "/" +
                  std::to_string(ct) + ", embeddings off " + std::to_string(bad_embeddings) + "/20, rank " +
                  std::to_string(r1) + "->" + std::to_string(r2)};
}

// 14. Control-opt vs lattice on every shipped check pair.
Outcome cross_method() {
  double worst = 0.0;
  std::string where;
  for (const char* name : {"euclidean", "heisenberg-eps", "dilation", "lie-left-invariant", "strip-counterexample"}) {
    const Scenario s = scenario(name);
    const auto& m = s.family.member(s.check_param);
    for (std::size_t i = 0; i < s.check_pairs.size(); ++i) {
      const auto& [p, q] = s.check_pairs[i];
      const auto a = cc_distance_opt(p, q, m.f, m.norm, solver_for(s, 1400 + i));
      const auto b = cc_distance_graph(p, q, m.f, m.norm, s.graph, s.graph_box);
      if (!a.converged || !b.found) return {false, std::string(name) + " pair " + std::to_string(i) + " not found"};
      const double rel = std::abs(a.value - b.value) / b.value;
      if (rel > worst) {
        worst = rel;
        where = std::string(name) + " pair " + std::to_string(i) + ": " + fmt("%.4f", a.value) + " vs " +
                fmt("%.4f", b.value);
      }
    }
  }
  return {worst <= 0.08, "max rel diff " + fmt("%.3f", worst) + " (" + where + ")"};
}

// 15. Byte-identical outputs for a repeated converge run.
Outcome determinism(const fs::path& out) {
  const auto config = parse_config(kConvergeConfig);
  RunOptions o;
  o.out_dir = out / "converge-b";
  const Manifest m = run_experiment(config, o);
  if (m.exit_code != 0) return {false, "second run failed: " + m.error};
  for (const char* file : {"convergence.csv", "distances.csv", "summary.json"}) {
    if (slurp(out / "converge-a" / file) != slurp(out / "converge-b" / file)) {
      return {false, std::string(file) + " differs"};
    }
  }
  return {true, "convergence.csv, distances.csv, summary.json identical"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccdist acceptance suite"};
  std::string out = "acceptance-out";
  std::set<int> only;
  app.add_option("--out", out, "Directory for run artifacts");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  const fs::path dir(out);
  fs::create_directories(dir);

  double converge_wall = 0.0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"euclidean sanity", euclidean_sanity},
      {"heisenberg horizontal", [] { return heisenberg_single(make_vec({1, 0, 0}), 1.0, 0.02, 60.0); }},
      {"heisenberg vertical", [] {
         return heisenberg_single(make_vec({0, 0, 0.25}), std::sqrt(std::numbers::pi), 0.05, 300.0);
       }},
      {"isometry identity", isometry},
      {"heisenberg convergence", [&] { return heisenberg_convergence(dir, converge_wall); }},
      {"dilation rescaling identity", rescaling},
      {"lie subspace family", lie_family},
      {"strip counterexample", strip},
      {"gronwall property", gronwall},
      {"reparametrization", reparametrization},
      {"length equivalence", length_equivalence},
      {"fiber metric oracle", fiber},
      {"topology", topology},
      {"cross-method agreement", cross_method},
      {"determinism", [&] { return determinism(dir); }},
  };

  int failed = 0;
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(number)) continue;
    if (number == 15 && !only.empty() && !only.count(5)) continue;  // needs run 5
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = since(t0);
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    report.push_back({{"criterion", number},
                      {"name", criteria[i].first},
                      {"pass", o.pass},
                      {"detail", o.detail},
                      {"seconds", secs}});
  }
  write_text(dir / "acceptance.json", report.dump(2) + "\n");
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
