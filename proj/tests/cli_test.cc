// Copyright (c) the lforge Project Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "lforge/cli.h"
#include "lforge/config.h"
#include "lforge/orchestrator.h"
#include "lforge/util.h"
#include "test_util.h"

using namespace lforge;
using testutil::TempDir;

namespace {

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv;
  argv.push_back("lforge");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string write_synthetic_setup(const std::string& dir) {
  std::string manifest_path = join_path(dir, "manifest.json");
  write_file(manifest_path, R"({
    "clips": [
      {"clip_id": "syn1", "shot_group": "GroupA",
       "model": {"k_star": [1.5], "gamma": [0.02]}},
      {"clip_id": "syn2", "shot_group": "GroupA",
       "model": {"k_star": [2.2], "gamma": [0.035]}}
    ]})");
  std::string config_path = join_path(dir, "config.json");
  write_file(config_path, std::string(R"({
    "backend": {"type": "synthetic"},
    "manifest": ")") + manifest_path + R"(",
    "profiles": [
      {"label": "fast", "preset": 6},
      {"label": "full", "preset": 2}
    ],
    "search_profile": "fast",
    "final_profile": "full",
    "modes": ["ALL_FRAMES"],
    "pool_size": 2,
    "scratch_dir": ")" + dir + R"(/scratch"
  })");
  return config_path;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"optimize"}) == 2);           // missing --config
  CHECK(run_cli({"no-such-command"}) == 2);
}

TEST_CASE("missing config file exits with code 1 and context") {
  CHECK(run_cli({"optimize", "--config", "/nonexistent/c.json"}) == 1);
}

TEST_CASE("config parsing, overrides and env handling") {
  TempDir tmp("cli-config");
  std::string config_path = write_synthetic_setup(tmp.path);
  CampaignConfig cfg = load_config(config_path);
  CHECK(cfg.backend.type == "synthetic");
  CHECK(cfg.modes.size() == 1);
  CHECK(cfg.qp_anchors == std::vector<int>{27, 39, 49, 59, 63});

  // Dotted overrides and the mode shorthand.
  CampaignConfig tuned = load_config(
      config_path, {"optimizer.x_tolerance=0.01", "mode=KF", "pool_size=3"});
  CHECK(tuned.optimizer.x_tolerance == doctest::Approx(0.01));
  REQUIRE(tuned.modes.size() == 1);
  CHECK(tuned.modes[0] == ModeKind::kKeyframes);
  CHECK(tuned.pool_size == 3);

  ::setenv("LFORGE_JOBS", "7", 1);
  ::setenv("LFORGE_SCRATCH", (tmp.path + "/env-scratch").c_str(), 1);
  CampaignConfig env_cfg = load_config(config_path);
  CHECK(env_cfg.pool_size == 7);
  CHECK(env_cfg.scratch_dir == tmp.path + "/env-scratch");
  ::unsetenv("LFORGE_JOBS");
  ::unsetenv("LFORGE_SCRATCH");

  CHECK_THROWS_WITH_AS(load_config(config_path, {"modes=nonsense"}),
                       doctest::Contains("ConfigError"), Error);
}

TEST_CASE("optimize runs a synthetic campaign and is idempotent") {
  TempDir tmp("cli-optimize");
  std::string config_path = write_synthetic_setup(tmp.path);
  CHECK(run_cli({"optimize", "--config", config_path}) == 0);

  CampaignConfig cfg = load_config(config_path);
  ResultsStore store(cfg.store_path);
  CHECK(store.size() == 2);

  // Second invocation resumes, runs nothing, exits 0.
  CHECK(run_cli({"optimize", "--config", config_path}) == 0);
  ResultsStore store2(cfg.store_path);
  CHECK(store2.size() == 2);
}

TEST_CASE("report generates summary and histogram from the store") {
  TempDir tmp("cli-report");
  std::string config_path = write_synthetic_setup(tmp.path);
  REQUIRE(run_cli({"optimize", "--config", config_path}) == 0);
  std::string out_dir = join_path(tmp.path, "reports");
  CHECK(run_cli({"report", "--config", config_path, "--out-dir", out_dir}) == 0);
  CHECK(std::filesystem::exists(join_path(out_dir, "summary.csv")));
  CHECK(std::filesystem::exists(join_path(out_dir, "histogram.csv")));
  std::string summary = read_file(join_path(out_dir, "summary.csv"));
  CHECK(summary.find("GroupA") != std::string::npos);
  CHECK(summary.find("ALL_FRAMES") != std::string::npos);
}

TEST_CASE("grid subcommand emits matrix and long-form contours") {
  TempDir tmp("cli-grid");
  std::string manifest_path = join_path(tmp.path, "manifest.json");
  write_file(manifest_path, R"({
    "clips": [
      {"clip_id": "syn2d", "shot_group": "G",
       "model": {"k_star": [2.0, 1.4], "gamma": [0.02, 0.03], "cross": 0.01}}
    ]})");
  std::string config_path = join_path(tmp.path, "config.json");
  write_file(config_path, std::string(R"({
    "backend": {"type": "synthetic"},
    "manifest": ")") + manifest_path + R"(",
    "profiles": [{"label": "fast", "preset": 6}],
    "search_profile": "fast",
    "final_profile": "fast",
    "modes": ["GRID_2D"],
    "k_bounds": {"low": 0.6, "high": 5.4},
    "grid_step": 0.1,
    "pool_size": 2,
    "scratch_dir": ")" + tmp.path + R"(/scratch"
  })");
  std::string prefix = join_path(tmp.path, "contour");
  CHECK(run_cli({"grid", "--config", config_path, "--out-prefix", prefix}) == 0);
  std::string long_form = read_file(prefix + ".long.csv");
  // Header plus one row per lattice point of the reference grid.
  CHECK(std::count(long_form.begin(), long_form.end(), '\n') == 2402);
  std::string matrix = read_file(prefix + ".matrix.csv");
  CHECK(matrix.rfind("k1\\k2", 0) == 0);
  CHECK(matrix.find("path_k1") != std::string::npos);
}

TEST_CASE("scan lists synthetic entries without probing files") {
  TempDir tmp("cli-scan");
  std::string config_path = write_synthetic_setup(tmp.path);
  std::string out = join_path(tmp.path, "scan.csv");
  CHECK(run_cli({"scan", "--config", config_path, "--out", out}) == 0);
  std::string csv = read_file(out);
  CHECK(csv.find("syn1") != std::string::npos);
  CHECK(csv.find("syn2") != std::string::npos);
}
