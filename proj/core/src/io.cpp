#include "ccdist/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccdist/errors.hpp"
#include "json.hpp"

namespace ccdist {

using Json = nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == std::trunc(x) && std::abs(x) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", x == 0.0 ? 0.0 : x);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string lambda_text(double lambda) {
  return std::isinf(lambda) ? param_label(lambda) : format_double(lambda);
}

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json control_json(const PiecewiseConstantControl& u) {
  Json c;
  c["knots"] = u.knots();
  Json values = Json::array();
  for (const Vec& v : u.values()) values.push_back(vec_json(v));
  c["values"] = std::move(values);
  return c;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  const int m = traj.dim_m();
  const int k = traj.control.dim_k();
  out << "t";
  for (int i = 1; i <= m; ++i) out << ",x_" << i;
  for (int i = 1; i <= k; ++i) out << ",u_" << i;
  out << "\n";
  for (std::size_t s = 0; s < traj.points.size(); ++s) {
    const double t = traj.times[s];
    out << format_double(t);
    for (int i = 0; i < m; ++i) out << "," << format_double(traj.points[s](i));
    const Vec u = traj.control.at(t);
    for (int i = 0; i < k; ++i) out << "," << format_double(u(i));
    out << "\n";
  }
  return out.str();
}

std::string report_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "lambda,pair_i,pair_j,d_lambda,d_limit,abs_dev\n";
  for (const PairDeviation& d : report.pairs) {
    out << lambda_text(d.param) << "," << d.i << "," << d.j << "," << format_double(d.d_lambda) << ","
        << format_double(d.d_limit) << "," << format_double(d.abs_dev) << "\n";
  }
  return out.str();
}

std::string distances_csv(const std::vector<DistanceTable>& tables) {
  std::ostringstream out;
  out << "lambda,i,j,value,converged\n";
  for (const DistanceTable& t : tables) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        out << lambda_text(t.param) << "," << i << "," << j << ","
            << format_double(t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
            << "," << (t.found[i][j] ? 1 : 0) << "\n";
      }
    }
  }
  return out.str();
}

std::string ball_csv(const std::vector<BallPoint>& ball) {
  std::ostringstream out;
  const int m = ball.empty() ? 0 : static_cast<int>(ball.front().point.size());
  for (int i = 1; i <= m; ++i) out << "x_" << i << ",";
  out << "value\n";
  for (const BallPoint& b : ball) {
    for (int i = 0; i < m; ++i) out << format_double(b.point(i)) << ",";
    out << format_double(b.value) << "\n";
  }
  return out.str();
}

std::string to_json(const DistanceEstimate& e, int indent) {
  Json j;
  j["value"] = number(e.value);
  j["method"] = to_string(e.method);
  j["best_control"] = e.best_control ? control_json(*e.best_control) : Json(nullptr);
  j["endpoint_residual"] = number(e.endpoint_residual);
  j["evaluations"] = e.evaluations;
  j["converged"] = e.converged;
  j["found"] = e.found;
  j["energy"] = number(e.energy);
  return j.dump(indent);
}

std::string to_json(const DegreeReport& r, int indent) {
  Json j;
  j["winding"] = r.winding;
  j["samples"] = r.samples;
  j["min_boundary_gap"] = number(r.min_boundary_gap);
  j["max_sample_jump"] = number(r.max_sample_jump);
  j["max_angle_step"] = number(r.max_angle_step);
  j["reliable"] = r.reliable;
  return j.dump(indent);
}

std::string report_summary_json(const ConvergenceReport& r, int indent) {
  Json j;
  Json params = Json::array(), sups = Json::array();
  for (std::size_t i = 0; i < r.ordering.size(); ++i) {
    params.push_back(lambda_text(r.ordering[i]));
    sups.push_back(number(r.sup_deviation[i]));
  }
  j["ordering"] = std::move(params);
  j["sup_deviation"] = std::move(sups);
  j["monotone"] = r.monotone;
  j["final_threshold"] = number(r.final_threshold);
  j["final_below_threshold"] = r.final_below_threshold;
  j["verdict"] = r.verdict;
  Json flagged = Json::array();
  for (const auto& [a, b] : r.flagged_pairs) flagged.push_back({a, b});
  j["flagged_pairs"] = std::move(flagged);
  j["limit_boundedly_compact"] = r.limit_boundedly_compact;
  return j.dump(indent);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ccdist
