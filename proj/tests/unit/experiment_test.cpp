#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccdist/errors.hpp"
#include "ccdist/experiment.hpp"
#include "ccdist/io.hpp"
#include "json.hpp"

using namespace ccdist;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ccdist-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST(Config, UnknownKeysAreNamed) {
  EXPECT_NE(error_of(R"({"scenario":{"name":"heisenberg-eps","epsilonn":[1]},"operation":"converge"})")
                .find("epsilonn"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"scenario":{"name":"euclidean"},"operation":"distance","params":{"p":[0,0],"q":[1,0],"pp":1}})")
                .find("'pp'"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"scenario":{"name":"euclidean"},"operation":"distance","colour":1})").find("colour"),
            std::string::npos);
}

TEST(Config, ValidationBeforeCompute) {
  EXPECT_FALSE(error_of("{not json").empty());
  EXPECT_FALSE(error_of(R"({"scenario":{"name":"nope"},"operation":"converge"})").empty());
  EXPECT_FALSE(error_of(R"({"scenario":{"name":"euclidean"},"operation":"fly"})").empty());
  EXPECT_FALSE(error_of(R"({"scenario":{"name":"euclidean"},"operation":"distance","params":{"p":[0,0,0],"q":[1,0]}})")
                   .empty());
  EXPECT_FALSE(error_of(R"({"scenario":{"name":"heisenberg-eps"},"operation":"distance","params":{"lambda":0.3,"p":[0,0,0],"q":[1,0,0]}})")
                   .empty());
  EXPECT_FALSE(error_of(R"({"scenario":{"name":"euclidean"},"operation":"degree","params":{"map":"spiral"}})").empty());
  EXPECT_FALSE(error_of(R"({"scenario":{"name":"euclidean"},"operation":"rescale-check"})").empty());
  EXPECT_TRUE(error_of(R"({"scenario":{"name":"lie-left-invariant","n":[2,"inf"]},"operation":"converge"})").empty());
}

TEST(Config, GenericFamilyMembers) {
  const auto c = parse_config(R"({
    "scenario": {"name": "generic-family", "limit": 0, "members": [
      {"param": 0, "dim_m": 2, "dim_k": 2, "terms": [
        {"row": 0, "col": 0, "coefficient": 1}, {"row": 1, "col": 1, "coefficient": 1}]},
      {"param": 1, "dim_m": 2, "dim_k": 2, "norm_weights": [1, 1], "norm_exponent": 1, "terms": [
        {"row": 0, "col": 0, "coefficient": 1}, {"row": 1, "col": 1, "coefficient": 1},
        {"row": 0, "col": 1, "coefficient": 0.5, "exponents": [1, 0]}]}]},
    "operation": "distance", "params": {"p": [0, 0], "q": [0.5, 0.5], "lambda": 1}})");
  EXPECT_EQ(c.scenario.members.size(), 2u);
}

TEST(Run, EuclideanDistanceWritesManifest) {
  const auto c = parse_config(
      R"({"scenario":{"name":"euclidean"},"operation":"distance","params":{"p":[0,0],"q":[1,0]},"seed":3})");
  RunOptions o;
  o.out_dir = scratch("euclid");
  const Manifest m = run_experiment(c, o);
  EXPECT_EQ(m.exit_code, 0);
  const auto manifest = nlohmann::json::parse(slurp(*o.out_dir / "manifest.json"));
  EXPECT_EQ(manifest["config_hash"], fnv1a_hex(c.canonical_json));
  for (const auto& f : manifest["files"]) EXPECT_TRUE(fs::exists(*o.out_dir / f["path"].get<std::string>()));
  const auto d = nlohmann::json::parse(slurp(*o.out_dir / "distance.json"));
  EXPECT_NEAR(d["value"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(slurp(*o.out_dir / "trajectory.csv").substr(0, 14), "t,x_1,x_2,u_1,");
}

TEST(Run, AssertModeFailsOnMissedExpectation) {
  const auto c = parse_config(
      R"({"scenario":{"name":"euclidean"},"operation":"distance","params":{"p":[0,0],"q":[1,0],"expect_value":2}})");
  RunOptions o;
  o.out_dir = scratch("assert");
  o.assert_mode = true;
  EXPECT_EQ(run_experiment(c, o).exit_code, 4);
  o.assert_mode = false;
  EXPECT_EQ(run_experiment(c, o).exit_code, 0);
}

TEST(Run, ComputeErrorsAreRecorded) {
  // Points outside the scenario box fail at compute time.
  const auto c = parse_config(
      R"({"scenario":{"name":"euclidean"},"operation":"distance","params":{"p":[0,0],"q":[3,0]}})");
  RunOptions o;
  o.out_dir = scratch("error");
  const Manifest m = run_experiment(c, o);
  EXPECT_EQ(m.exit_code, 3);
  const auto manifest = nlohmann::json::parse(slurp(*o.out_dir / "manifest.json"));
  EXPECT_FALSE(manifest["error"].is_null());
}

TEST(Run, DegreeAndBracket) {
  RunOptions o;
  o.out_dir = scratch("degree");
  o.assert_mode = true;
  EXPECT_EQ(run_experiment(parse_config(R"({"scenario":{"name":"euclidean"},"operation":"degree",
      "params":{"map":"square","expect_winding":2}})"), o).exit_code, 0);
  EXPECT_EQ(run_experiment(parse_config(R"({"scenario":{"name":"heisenberg-eps"},"operation":"bracket",
      "params":{"lambda":0,"depth":2,"expect_rank":3}})"), o).exit_code, 0);
}

TEST(Run, RepeatedRunsAreByteIdentical) {
  const auto c = parse_config(R"({"scenario":{"name":"euclidean"},"operation":"distance",
      "params":{"points":[[0,0],[0.5,0.25],[1,1]]},"seed":9})");
  RunOptions a, b;
  a.out_dir = scratch("det-a");
  b.out_dir = scratch("det-b");
  b.threads = 2;
  run_experiment(c, a);
  run_experiment(c, b);
  EXPECT_EQ(slurp(*a.out_dir / "distances.csv"), slurp(*b.out_dir / "distances.csv"));
}

TEST(Io, FormatsDoubles) {
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(INFINITY), "inf");
}
