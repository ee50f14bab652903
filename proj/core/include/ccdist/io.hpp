#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ccdist/convergence.hpp"
#include "ccdist/distance.hpp"
#include "ccdist/topology.hpp"
#include "ccdist/trajectory.hpp"

namespace ccdist {

// 17 significant digits, shortest form for integers.
std::string format_double(double x);

// Columns t, x_1..x_m, u_1..u_k.
std::string trajectory_csv(const Trajectory& traj);
// Columns lambda, pair_i, pair_j, d_lambda, d_limit, abs_dev.
std::string report_csv(const ConvergenceReport& report);
// Columns lambda, i, j, value, converged.
std::string distances_csv(const std::vector<DistanceTable>& tables);
// Columns x_1..x_m, value.
std::string ball_csv(const std::vector<BallPoint>& ball);

std::string to_json(const DistanceEstimate& estimate, int indent = 2);
std::string to_json(const DegreeReport& report, int indent = 2);
std::string report_summary_json(const ConvergenceReport& report, int indent = 2);

void write_text(const std::filesystem::path& path, const std::string& text);

// FNV-1a 64-bit, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace ccdist
