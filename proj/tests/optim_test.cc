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

#include <cmath>

#include "lforge/multiplier.h"
#include "lforge/optim.h"
#include "lforge/rdmodel.h"

using namespace lforge;

namespace {

OptimizerConfig tight_config() {
  OptimizerConfig cfg;
  cfg.x_tolerance = 1e-7;
  cfg.f_tolerance = 0.0;
  cfg.max_iterations = 200;
  cfg.max_cost_evals = 500;
  return cfg;
}

// Synthetic 1-D BD-rate-like cost with a known optimum at k*.
ScalarCost model_cost_1d(double gamma, double k_star) {
  return [gamma, k_star](double k) {
    double u = std::log(k) - std::log(k_star);
    double g1 = gamma * std::log(k_star) * std::log(k_star);
    return (std::pow(10.0, gamma * u * u - g1) - 1.0) * 100.0;
  };
}

void check_trace_consistency(const OptimizerTrace& t) {
  REQUIRE(!t.evaluations.empty());
  double best = t.evaluations.front().cost;
  bool best_found = false;
  for (const Evaluation& e : t.evaluations) {
    best = std::min(best, e.cost);
    if (e.point == t.best_point && e.cost == t.best_cost) best_found = true;
  }
  CHECK(t.best_cost == best);
  CHECK(best_found);
}

}  // namespace

TEST_CASE("brent finds the analytic parabola minimum") {
  auto cost = [](double x) { return (x - 2.0) * (x - 2.0); };
  OptimizerTrace t = brent_minimize(cost, {0.0, 5.0}, tight_config());
  CHECK(t.converged);
  CHECK(std::abs(t.best_point[0] - 2.0) <= 1e-6);
  check_trace_consistency(t);
}

TEST_CASE("brent result never exceeds the bound and probe costs") {
  auto cost = [](double x) { return std::sin(3.0 * x) + 0.1 * x; };
  Bounds b{0.0, 4.0};
  OptimizerTrace t = brent_minimize(cost, b, tight_config());
  CHECK(t.best_cost <= cost(b.low));
  CHECK(t.best_cost <= cost(b.high));
  for (const Evaluation& e : t.evaluations) {
    CHECK(e.point[0] >= b.low);
    CHECK(e.point[0] <= b.high);
  }
}

TEST_CASE("brent recovers the synthetic 1-D optimum") {
  OptimizerTrace t =
      brent_minimize(model_cost_1d(0.02, 1.5), {0.2, 8.0}, tight_config());
  CHECK(std::abs(t.best_point[0] - 1.5) <= 1e-3);
}

TEST_CASE("golden section handles a nonsmooth unimodal cost") {
  auto cost = [](double x) { return std::abs(x - 1.0); };
  OptimizerTrace t = golden_section(cost, {0.0, 3.0}, tight_config());
  CHECK(t.converged);
  CHECK(std::abs(t.best_point[0] - 1.0) <= 1e-6);
}

TEST_CASE("golden section on a flat cost converges anywhere in bounds") {
  auto cost = [](double) { return 0.0; };
  OptimizerTrace t = golden_section(cost, {0.0, 1.0}, tight_config());
  CHECK(t.converged);
  CHECK(t.best_cost == 0.0);
  CHECK(t.best_point[0] >= 0.0);
  CHECK(t.best_point[0] <= 1.0);
}

TEST_CASE("golden section recovers the synthetic 1-D optimum") {
  OptimizerTrace t =
      golden_section(model_cost_1d(0.02, 1.5), {0.2, 8.0}, tight_config());
  CHECK(std::abs(t.best_point[0] - 1.5) <= 1e-3);
}

TEST_CASE("eval budget exhaustion returns best-so-far, not an error") {
  OptimizerConfig cfg = tight_config();
  cfg.max_cost_evals = 5;
  OptimizerTrace t = brent_minimize(model_cost_1d(0.02, 1.5), {0.2, 8.0}, cfg);
  CHECK_FALSE(t.converged);
  CHECK(t.stop == StopReason::kEvalBudget);
  CHECK(t.evaluations.size() == 5);
  check_trace_consistency(t);
}

TEST_CASE("cost exceptions surface as CostFailure with the partial trace") {
  int calls = 0;
  auto cost = [&calls](double x) {
    if (++calls == 4) throw Error(Errc::kEncoderProcessFailure, "boom");
    return x * x;
  };
  try {
    brent_minimize(cost, {-1.0, 1.0}, tight_config());
    FAIL("expected CostFailure");
  } catch (const CostFailure& e) {
    CHECK(e.code() == Errc::kCostFailure);
    CHECK(e.partial_trace().evaluations.size() == 3);
  }
}

TEST_CASE("powell minimizes a separable quadratic") {
  auto cost = [](const std::vector<double>& v) {
    return (v[0] - 1.0) * (v[0] - 1.0) + (v[1] + 2.0) * (v[1] + 2.0);
  };
  OptimizerConfig cfg = tight_config();
  cfg.x_tolerance = 1e-6;
  std::vector<Bounds> bounds{{-5.0, 5.0}, {-5.0, 5.0}};
  OptimizerTrace t = powell_minimize(cost, {0.0, 0.0}, bounds, cfg);
  CHECK(t.converged);
  CHECK(std::abs(t.best_point[0] - 1.0) <= 1e-4);
  CHECK(std::abs(t.best_point[1] + 2.0) <= 1e-4);
  CHECK(t.best_cost <= cost({0.0, 0.0}));
  check_trace_consistency(t);
}

TEST_CASE("powell recovers a coupled 2-D synthetic optimum") {
  SyntheticClipModel m;
  m.clip_id = "t";
  m.k_star = {3.0, 1.4};
  m.gamma = {0.02, 0.03};
  m.cross = 0.015;
  validate_model(m);
  auto cost = [&m](const std::vector<double>& v) {
    std::vector<double> ones{1.0, 1.0};
    double g = model_log_rate_offset(m, v);
    double g1 = model_log_rate_offset(m, ones);
    return (std::pow(10.0, g - g1) - 1.0) * 100.0;
  };
  OptimizerConfig cfg;
  cfg.x_tolerance = 1e-4;
  cfg.f_tolerance = 1e-7;
  cfg.max_iterations = 100;
  cfg.max_cost_evals = 4000;
  std::vector<Bounds> bounds{{0.2, 8.0}, {0.2, 8.0}};
  OptimizerTrace t = powell_minimize(cost, {1.0, 1.0}, bounds, cfg);
  CHECK(std::abs(t.best_point[0] - 3.0) <= 1e-2);
  CHECK(std::abs(t.best_point[1] - 1.4) <= 1e-2);
  for (const Evaluation& e : t.evaluations) {
    CHECK(e.point[0] >= 0.2);
    CHECK(e.point[0] <= 8.0);
    CHECK(e.point[1] >= 0.2);
    CHECK(e.point[1] <= 8.0);
  }
}

TEST_CASE("powell honors max_iterations = 1") {
  auto cost = [](const std::vector<double>& v) {
    double a = v[0] - 2.0, b = v[1] - 3.0;
    return a * a + b * b + 0.8 * a * b;
  };
  OptimizerConfig cfg = tight_config();
  cfg.max_iterations = 1;
  std::vector<Bounds> bounds{{-5.0, 5.0}, {-5.0, 5.0}};
  OptimizerTrace t = powell_minimize(cost, {0.0, 0.0}, bounds, cfg);
  CHECK(t.iterations_used == 1);
  CHECK_FALSE(t.converged);
  CHECK(t.best_cost < cost({0.0, 0.0}));
}

TEST_CASE("powell validates dimensions and start point") {
  auto cost = [](const std::vector<double>& v) { return v[0]; };
  std::vector<Bounds> bounds{{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_WITH_AS(powell_minimize(cost, {0.5}, bounds, tight_config()),
                       doctest::Contains("DimensionMismatch"), Error);
  CHECK_THROWS_WITH_AS(
      powell_minimize(cost, {2.0, 0.5}, bounds, tight_config()),
      doctest::Contains("OutOfRange"), Error);
}

TEST_CASE("grid axis generation is endpoint-inclusive") {
  std::vector<double> v = grid_axis_values({0.6, 5.4, 0.1});
  REQUIRE(v.size() == 49);
  CHECK(v.front() == doctest::Approx(0.6));
  CHECK(v.back() == doctest::Approx(5.4));
  CHECK(grid_axis_values({1.0, 1.0, 0.1}).size() == 1);
}

TEST_CASE("grid search covers the full lattice and finds the argmin") {
  auto cost = [](const std::vector<double>& v) {
    double a = v[0] - 2.0, b = v[1] - 3.0;
    return std::sqrt(a * a + b * b);
  };
  auto [trace, scan] = grid_search(cost, {{0.6, 5.4, 0.1}, {0.6, 5.4, 0.1}});
  CHECK(scan.points.size() == 2401);
  CHECK(trace.evaluations.size() == 2401);
  CHECK(trace.best_point[0] == doctest::Approx(2.0));
  CHECK(trace.best_point[1] == doctest::Approx(3.0));
}

TEST_CASE("grid search degenerate axis evaluates a single point") {
  auto cost = [](const std::vector<double>& v) { return v[0]; };
  auto [trace, scan] = grid_search(cost, {{1.0, 1.0, 0.1}});
  CHECK(scan.points.size() == 1);
  CHECK(trace.best_point[0] == doctest::Approx(1.0));
}

TEST_CASE("grid search breaks ties toward the lexicographically smallest point") {
  auto cost = [](const std::vector<double>&) { return 7.0; };
  auto [trace, scan] = grid_search(cost, {{0.0, 1.0, 0.5}, {0.0, 1.0, 0.5}});
  CHECK(scan.points.size() == 9);
  CHECK(trace.best_point[0] == doctest::Approx(0.0));
  CHECK(trace.best_point[1] == doctest::Approx(0.0));
}

TEST_CASE("grid and line search agree on synthetic surfaces") {
  SyntheticClipModel m;
  m.clip_id = "t";
  m.k_star = {2.4, 1.7};
  m.gamma = {0.025, 0.04};
  m.cross = -0.02;
  validate_model(m);
  auto cost = [&m](const std::vector<double>& v) {
    return model_log_rate_offset(m, v);
  };
  auto [gtrace, scan] = grid_search(cost, {{0.6, 5.4, 0.1}, {0.6, 5.4, 0.1}});
  OptimizerConfig cfg;
  cfg.x_tolerance = 1e-4;
  cfg.f_tolerance = 1e-9;
  cfg.max_iterations = 100;
  cfg.max_cost_evals = 4000;
  OptimizerTrace p =
      powell_minimize(cost, {1.0, 1.0}, {{0.2, 8.0}, {0.2, 8.0}}, cfg);
  CHECK(std::abs(gtrace.best_point[0] - p.best_point[0]) <= 0.1 + 1e-9);
  CHECK(std::abs(gtrace.best_point[1] - p.best_point[1]) <= 0.1 + 1e-9);
}

TEST_CASE("optimizers are deterministic") {
  auto cost = model_cost_1d(0.03, 2.2);
  OptimizerTrace a = brent_minimize(cost, {0.2, 8.0}, tight_config());
  OptimizerTrace b = brent_minimize(cost, {0.2, 8.0}, tight_config());
  REQUIRE(a.evaluations.size() == b.evaluations.size());
  for (size_t i = 0; i < a.evaluations.size(); ++i) {
    CHECK(a.evaluations[i].point == b.evaluations[i].point);
    CHECK(a.evaluations[i].cost == b.evaluations[i].cost);
  }
}
