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

#include "lforge/bdrate.h"
#include "lforge/rdmodel.h"

using namespace lforge;

namespace {

SyntheticClipModel model_1d(double gamma, double k_star) {
  SyntheticClipModel m;
  m.clip_id = "m";
  m.k_star = {k_star};
  m.gamma = {gamma};
  validate_model(m);
  return m;
}

RDCurve curve_for(const SyntheticClipModel& m, const MultiplierAssignment& k) {
  std::vector<RDPoint> pts;
  for (int qp : {27, 39, 49, 59, 63}) {
    pts.push_back(synthetic_encode(m, qp, k));
  }
  return build_curve(m.clip_id, std::move(pts));
}

}  // namespace

TEST_CASE("default_lambda matches direct substitution") {
  LambdaModel lm = LambdaModel::with_default_table(3.2);
  // q_dc(0) = 4, so 4^2 * 3.2.
  CHECK(default_lambda(lm, 0) == doctest::Approx(51.2).epsilon(1e-12));

  LambdaModel lm33 = LambdaModel::with_default_table(3.3);
  // q_dc(100) = 4 + 16.8 = 20.8; 20.8^2 * (3.3 + 0.35) = 1579.136.
  CHECK(default_lambda(lm33, 100) == doctest::Approx(1579.136).epsilon(1e-12));
}

TEST_CASE("default_lambda is strictly increasing over the index range") {
  LambdaModel lm = LambdaModel::with_default_table(3.25);
  validate_lambda_model(lm);
  for (int q = 0; q < 255; ++q) {
    CHECK(default_lambda(lm, q + 1) > default_lambda(lm, q));
  }
  CHECK_THROWS_AS(default_lambda(lm, -1), Error);
  CHECK_THROWS_AS(default_lambda(lm, 256), Error);
}

TEST_CASE("lambda model validation") {
  LambdaModel lm = LambdaModel::with_default_table(3.25);
  lm.dc_table[40] = lm.dc_table[39] - 1.0;  // break monotonicity
  CHECK_THROWS_AS(validate_lambda_model(lm), Error);
  LambdaModel bad_a = LambdaModel::with_default_table(3.25);
  bad_a.frame_type_constant = 3.5;
  CHECK_THROWS_AS(validate_lambda_model(bad_a), Error);
}

TEST_CASE("synthetic encode at k_star matches the baseline bitrate") {
  SyntheticClipModel m = model_1d(0.02, 2.5);
  MultiplierAssignment at_star = make_assignment(ModeKind::kAllFrames, {2.5});
  for (int qp : {1, 27, 39, 63}) {
    RDPoint p = synthetic_encode(m, qp, at_star);
    double expected = std::pow(10.0, m.beta0 - m.beta1 * qp);
    CHECK(p.bitrate_kbps == doctest::Approx(expected).epsilon(1e-12));
    CHECK(p.quality == doctest::Approx(m.q_max - m.alpha * qp));
  }
}

TEST_CASE("k = 1 with k_star = 1 reproduces the baseline exactly") {
  SyntheticClipModel m = model_1d(0.02, 1.0);
  MultiplierAssignment ones = identity_assignment(ModeKind::kAllFrames);
  RDCurve test = curve_for(m, ones);
  RDCurve ref = curve_for(m, ones);
  CHECK(std::abs(bd_rate(test, ref).value_percent) < 1e-12);
  CHECK(analytic_optimal_bdrate(m) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("a known log-rate offset composes into the exact BD-rate") {
  // gamma (0.01, 0.02), k = (e*k1, k2): offset is exactly 0.01.
  SyntheticClipModel m;
  m.clip_id = "m2";
  m.k_star = {1.7, 1.2};
  m.gamma = {0.01, 0.02};
  validate_model(m);
  MultiplierAssignment at_star =
      make_assignment(ModeKind::kPowellKfGfArf, {1.7, 1.2});
  MultiplierAssignment shifted = make_assignment(
      ModeKind::kPowellKfGfArf, {std::exp(1.0) * 1.7, 1.2});
  CHECK(model_log_rate_offset(m, shifted.values) ==
        doctest::Approx(0.01).epsilon(1e-12));
  RDCurve test = curve_for(m, shifted);
  RDCurve ref = curve_for(m, at_star);
  double expected = (std::pow(10.0, 0.01) - 1.0) * 100.0;  // ~2.3293
  CHECK(bd_rate(test, ref).value_percent ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("analytic optimal BD-rate closed forms") {
  SyntheticClipModel m1 = model_1d(0.01, std::exp(1.0));
  CHECK(analytic_optimal_bdrate(m1) ==
        doctest::Approx((std::pow(10.0, -0.01) - 1.0) * 100.0).epsilon(1e-12));

  SyntheticClipModel m2;
  m2.clip_id = "m2";
  m2.k_star = {std::exp(1.0), std::exp(1.0)};
  m2.gamma = {0.01, 0.02};
  validate_model(m2);
  CHECK(analytic_optimal_bdrate(m2) ==
        doctest::Approx((std::pow(10.0, -0.03) - 1.0) * 100.0).epsilon(1e-12));
}

TEST_CASE("constant log-offset survives the interpolation layer exactly") {
  // bd_rate of curve(k) vs curve(1) must equal the closed form through the
  // full curve-building path.
  SyntheticClipModel m = model_1d(0.03, 2.0);
  MultiplierAssignment ones = identity_assignment(ModeKind::kAllFrames);
  for (double k : {0.5, 1.3, 2.0, 4.0}) {
    MultiplierAssignment at_k = make_assignment(ModeKind::kAllFrames, {k});
    double g_k = model_log_rate_offset(m, at_k.values);
    double g_1 = model_log_rate_offset(m, ones.values);
    double expected = (std::pow(10.0, g_k - g_1) - 1.0) * 100.0;
    double got = bd_rate(curve_for(m, at_k), curve_for(m, ones)).value_percent;
    CHECK(std::abs(got - expected) < 1e-9);
  }
}

TEST_CASE("synthetic encode validates inputs") {
  SyntheticClipModel m = model_1d(0.02, 2.0);
  MultiplierAssignment ones = identity_assignment(ModeKind::kAllFrames);
  CHECK_THROWS_WITH_AS(synthetic_encode(m, 0, ones),
                       doctest::Contains("OutOfRange"), Error);
  CHECK_THROWS_WITH_AS(synthetic_encode(m, 64, ones),
                       doctest::Contains("OutOfRange"), Error);
  MultiplierAssignment two_d = identity_assignment(ModeKind::kPowellKfGfArf);
  CHECK_THROWS_WITH_AS(synthetic_encode(m, 39, two_d),
                       doctest::Contains("DimensionMismatch"), Error);
}

TEST_CASE("model validation rejects bad shapes") {
  SyntheticClipModel m = model_1d(0.02, 2.0);
  m.gamma = {-0.1};
  CHECK_THROWS_AS(validate_model(m), Error);

  SyntheticClipModel pd;
  pd.clip_id = "pd";
  pd.k_star = {1.0, 1.0};
  pd.gamma = {0.01, 0.01};
  pd.cross = 0.05;  // c^2 >= 4 g1 g2
  CHECK_THROWS_AS(validate_model(pd), Error);

  SyntheticClipModel q = model_1d(0.02, 2.0);
  q.alpha = 0.02;  // quality goes non-positive within qp range
  CHECK_THROWS_AS(validate_model(q), Error);
}

TEST_CASE("synthetic encode is pure and deterministic, with and without noise") {
  SyntheticClipModel m = model_1d(0.02, 2.0);
  m.noise_scale = 1e-3;
  m.noise_seed = 42;
  validate_model(m);
  MultiplierAssignment k = make_assignment(ModeKind::kAllFrames, {1.7});
  RDPoint a = synthetic_encode(m, 39, k);
  RDPoint b = synthetic_encode(m, 39, k);
  CHECK(a.bitrate_kbps == b.bitrate_kbps);
  CHECK(a.quality == b.quality);
  // The perturbation is bounded by 0.1% of the log-rate.
  SyntheticClipModel clean = m;
  clean.noise_scale = 0.0;
  RDPoint c = synthetic_encode(clean, 39, k);
  double lr_noisy = std::log10(a.bitrate_kbps);
  double lr_clean = std::log10(c.bitrate_kbps);
  CHECK(std::abs(lr_noisy - lr_clean) <= 1e-3 * std::abs(lr_clean) + 1e-15);
}
