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

#include <algorithm>
#include <random>

#include "lforge/reporting.h"

using namespace lforge;

namespace {

OptimizationRecord record(const std::string& clip, const std::string& group,
                          ModeKind mode, double bd_final,
                          const std::string& profile = "fast",
                          double wall = 10.0) {
  OptimizationRecord r;
  r.clip_id = clip;
  r.shot_group = group;
  r.mode = mode;
  r.final_k = {1.5};
  r.bd_rate_search = bd_final * 0.9;
  r.bd_rate_final = bd_final;
  r.iterations = 9;
  r.cost_evals = 20;
  r.converged = true;
  r.bitrate_savings_avg = bd_final * 2;
  r.search_profile = profile;
  r.final_profile = "full";
  r.wall_clock = {wall * 0.1, wall * 0.7, wall * 0.2};
  return r;
}

}  // namespace

TEST_CASE("summarize aggregates per (group, mode)") {
  std::vector<OptimizationRecord> records = {
      record("a", "G1", ModeKind::kAllFrames, -2.0),
      record("b", "G1", ModeKind::kAllFrames, -4.0),
      record("c", "G2", ModeKind::kAllFrames, 1.0),
      record("d", "G2", ModeKind::kKeyframes, -1.0),
  };
  std::vector<GroupSummary> sums = summarize(records);
  REQUIRE(sums.size() == 3);
  CHECK(sums[0].shot_group == "G1");
  CHECK(sums[0].clip_count == 2);
  CHECK(sums[0].bd_rate_avg == doctest::Approx(-3.0));
  CHECK(sums[0].bd_rate_min == doctest::Approx(-4.0));
  CHECK(sums[0].bd_rate_max == doctest::Approx(-2.0));
  CHECK(sums[0].iterations_avg == doctest::Approx(9.0));

  // Singleton group: avg = min = max.
  const GroupSummary& g2kf = sums[2];
  CHECK(g2kf.mode == ModeKind::kKeyframes);
  CHECK(g2kf.bd_rate_avg == g2kf.bd_rate_min);
  CHECK(g2kf.bd_rate_avg == g2kf.bd_rate_max);

  // min <= avg <= max everywhere.
  for (const GroupSummary& s : sums) {
    CHECK(s.bd_rate_min <= s.bd_rate_avg);
    CHECK(s.bd_rate_avg <= s.bd_rate_max);
  }
}

TEST_CASE("summarize is permutation invariant") {
  std::vector<OptimizationRecord> records;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 12; ++i) {
    records.push_back(record("c" + std::to_string(i), i % 3 ? "G1" : "G2",
                             i % 2 ? ModeKind::kAllFrames : ModeKind::kKeyframes,
                             -5.0 + i * 0.7));
  }
  std::string before = summary_csv(summarize(records));
  std::shuffle(records.begin(), records.end(), rng);
  CHECK(summary_csv(summarize(records)) == before);
}

TEST_CASE("summarize requires usable input") {
  CHECK_THROWS_WITH_AS(summarize({}), doctest::Contains("EmptyInput"), Error);
  OptimizationRecord r = record("a", "G", ModeKind::kAllFrames, -1.0);
  r.bd_rate_final.reset();
  CHECK_THROWS_AS(summarize({r}), Error);
}

TEST_CASE("histogram bins are half-open and conserve counts") {
  std::vector<OptimizationRecord> records = {
      record("a", "G", ModeKind::kAllFrames, -0.5),
      record("b", "G", ModeKind::kAllFrames, -0.4),
      record("c", "G", ModeKind::kAllFrames, 0.2),
  };
  std::vector<HistogramBin> bins = histogram(records, 1.0);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].bin_low == doctest::Approx(-1.0));
  CHECK(bins[0].count == 2);
  CHECK(bins[1].bin_low == doctest::Approx(0.0));
  CHECK(bins[1].count == 1);

  // Identical values land in one bin.
  std::vector<OptimizationRecord> same = {
      record("a", "G", ModeKind::kAllFrames, -2.3),
      record("b", "G", ModeKind::kAllFrames, -2.3),
  };
  bins = histogram(same, 1.0);
  REQUIRE(bins.size() == 1);
  CHECK(bins[0].count == 2);

  // Conservation over random data and widths.
  std::mt19937_64 rng(6);
  std::vector<OptimizationRecord> random_records;
  for (int i = 0; i < 57; ++i) {
    random_records.push_back(
        record("r" + std::to_string(i), "G", ModeKind::kAllFrames,
               std::uniform_real_distribution<double>(-8, 4)(rng)));
  }
  for (double width : {0.25, 1.0, 3.0}) {
    long total = 0;
    for (const HistogramBin& b : histogram(random_records, width)) {
      total += b.count;
    }
    CHECK(total == 57);
  }
  CHECK_THROWS_AS(histogram(random_records, 0.0), Error);
}

TEST_CASE("contour export round-trips through its parser") {
  auto cost = [](const std::vector<double>& v) {
    return (v[0] - 2.0) * (v[0] - 2.0) + (v[1] - 3.0) * (v[1] - 3.0);
  };
  auto [trace, scan] = grid_search(cost, {{0.6, 5.4, 0.6}, {0.6, 5.4, 0.6}});
  std::string csv = export_contour(scan, trace.evaluations);
  std::vector<Evaluation> path;
  GridScan parsed = parse_contour(csv, &path);
  CHECK(parsed.counts == scan.counts);
  CHECK(parsed.costs.size() == scan.costs.size());
  CHECK(path.size() == trace.evaluations.size());
  // Re-export of the parse reproduces the bytes exactly.
  CHECK(export_contour(parsed, path) == csv);
}

TEST_CASE("contour export covers the reference lattice shape") {
  auto cost = [](const std::vector<double>& v) { return v[0] + v[1]; };
  auto [trace, scan] = grid_search(cost, {{0.6, 5.4, 0.1}, {0.6, 5.4, 0.1}});
  std::string csv = export_contour(scan);
  // Header + 49 rows (one per k1 lattice value).
  long rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 50);
  std::string long_form = contour_long_csv(scan);
  CHECK(std::count(long_form.begin(), long_form.end(), '\n') == 2402);

  GridScan one_d;
  one_d.axes = {{0.6, 5.4, 0.1}};
  CHECK_THROWS_WITH_AS(export_contour(one_d),
                       doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("exports are byte-stable across repeated calls") {
  std::vector<OptimizationRecord> records;
  for (int i = 0; i < 9; ++i) {
    records.push_back(record("c" + std::to_string(i), i % 2 ? "A" : "B",
                             ModeKind::kAllFrames, -3.0 + 0.37 * i));
  }
  CHECK(summary_csv(summarize(records)) == summary_csv(summarize(records)));
  CHECK(histogram_csv(histogram(records, 1.0), 1.0) ==
        histogram_csv(histogram(records, 1.0), 1.0));
}

TEST_CASE("proxy comparison pairs clips across profiles") {
  std::vector<OptimizationRecord> records = {
      record("a", "G", ModeKind::kAllFrames, -2.0, "slow", 100.0),
      record("a", "G", ModeKind::kAllFrames, -1.8, "proxy", 20.0),
      record("b", "G", ModeKind::kAllFrames, -0.5, "slow", 80.0),
      record("b", "G", ModeKind::kAllFrames, -0.4, "proxy", 16.0),
      record("only-slow", "G", ModeKind::kAllFrames, -1.0, "slow", 50.0),
  };
  ProxyComparisonTable table = proxy_comparison(records);
  REQUIRE(table.profiles.size() == 2);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.gaps.size() == 1);
  CHECK(table.gaps[0].rfind("only-slow", 0) == 0);
  // Speedup of the proxy run is the wall-clock quotient.
  size_t proxy_idx = table.profiles[0] == "proxy" ? 0 : 1;
  const ProxyComparisonRow& a = table.rows[0];
  CHECK(a.clip_id == "a");
  CHECK(a.speedup[proxy_idx] == doctest::Approx(5.0));
  CHECK(a.speedup[1 - proxy_idx] == doctest::Approx(1.0));

  std::string csv = proxy_comparison_csv(table);
  CHECK(csv.find("only-slow") != std::string::npos);

  CHECK_THROWS_WITH_AS(
      proxy_comparison({record("a", "G", ModeKind::kAllFrames, -1.0)}),
      doctest::Contains("MissingPairing"), Error);
}
