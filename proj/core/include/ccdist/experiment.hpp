#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccdist/scenarios.hpp"

namespace ccdist {

enum class Operation {
  kDistance,
  kGeodesic,
  kBall,
  kConverge,
  kRescaleCheck,
  kRelaxProbe,
  kDegree,
  kBracket,
  kReparam,
};

const char* to_string(Operation op);

struct OperationParams {
  std::optional<double> lambda;           // member; default: limit
  std::vector<Vec> points;                // converge, distance tables
  std::vector<std::pair<Vec, Vec>> pairs; // distance, rescale-check
  std::optional<Vec> p;
  std::optional<Vec> q;
  std::vector<double> eps;                // rescale-check
  std::string method = "control-opt";     // distance: control-opt|grid-graph
  int segments = 32;
  int restarts = 4;
  double endpoint_tol = 1e-6;
  int steps_per_segment = 16;
  double radius = 0.0;                    // ball, relax-probe, degree
  int samples = 8;                        // relax-probe
  double noise = 0.02;                    // relax-probe
  std::optional<double> threshold;        // converge final threshold
  double monotone_slack = 0.10;
  int depth = 2;                          // bracket
  double h = 1e-4;                        // bracket
  std::string map;                        // degree: identity|square|conjugate|constant|flow
  std::vector<int> sigma;                 // degree (flow)
  std::optional<Vec> t_center;            // degree (flow)
  int resolution = 256;                   // degree
  std::vector<Vec> control;               // reparam: uniform segment values
  int out_segments = 0;                   // reparam
  bool isometry_form = false;             // rescale-check (heisenberg)
  // Lattice overrides.
  std::vector<int> grid_resolution;
  std::optional<double> grid_tau;
  std::optional<double> grid_snap;
  std::optional<int> grid_chord_radius;   // chord moves instead of words
  // --assert expectations.
  std::optional<double> expect_value;
  double expect_rel_tol = 0.01;
  std::optional<std::string> expect_verdict;
  std::optional<int> expect_winding;
  std::optional<int> expect_rank;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  Operation operation = Operation::kDistance;
  OperationParams params;
  std::uint64_t seed = 0;
  std::string output;  // directory, may be overridden by --out
  std::string canonical_json;  // normalized input, hashed into the manifest
};

// Parses and validates (unknown keys, types, per-scenario and per-operation
// parameters). Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0: default_thread_count()
  bool assert_mode = false;
};

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string description;
};

struct Manifest {
  std::filesystem::path directory;
  std::vector<ManifestFile> files;
  std::string config_hash;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string summary_json;
  std::string error;
  bool assertion_failed = false;
  // 0 success, 3 compute error, 4 assertion failure.
  int exit_code = 0;
};

// Executes the operation, writes artifacts plus manifest.json into the
// output directory. Compute errors are recorded in the manifest, not thrown.
Manifest run_experiment(const ExperimentConfig& config,
                        const RunOptions& options = {});

}  // namespace ccdist
