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
#include <random>

#include "lforge/bdrate.h"
#include "lforge/error.h"
#include "test_util.h"

using namespace lforge;
using testutil::CurveShape;
using testutil::random_curve;
using testutil::random_curve_pair;
using testutil::uniform;

namespace {

std::vector<RDPoint> five_point_samples() {
  // The standard anchor set with decreasing bitrate in qp.
  return {
      {63, 800.0, 0.905, MetricId::kMsSsim},
      {59, 1300.0, 0.931, MetricId::kMsSsim},
      {49, 2600.0, 0.958, MetricId::kMsSsim},
      {39, 6200.0, 0.977, MetricId::kMsSsim},
      {27, 16800.0, 0.992, MetricId::kMsSsim},
  };
}

// Independent monotone-cubic oracle: same harmonic-mean slope rule, written
// as a direct per-query Hermite-basis evaluation with no shared code or
// cached coefficients.
double pchip_oracle(const std::vector<double>& x, const std::vector<double>& y,
                    double q) {
  size_t n = x.size();
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  auto secant = [&](size_t i) { return (y[i + 1] - y[i]) / (x[i + 1] - x[i]); };
  auto interval = [&](size_t i) { return x[i + 1] - x[i]; };
  // One-sided three-point rule with the shape-preserving clamps.
  auto edge = [&](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(m) != sign(d0)) return 0.0;
    if (sign(d0) != sign(d1) && std::abs(m) > 3.0 * std::abs(d0)) {
      return 3.0 * d0;
    }
    return m;
  };
  auto slope_at = [&](size_t i) -> double {
    if (i == 0) return edge(interval(0), interval(1), secant(0), secant(1));
    if (i == n - 1) {
      return edge(interval(n - 2), interval(n - 3), secant(n - 2),
                  secant(n - 3));
    }
    double d0 = secant(i - 1), d1 = secant(i);
    if (d0 == 0.0 || d1 == 0.0 || sign(d0) != sign(d1)) return 0.0;
    double h0 = interval(i - 1), h1 = interval(i);
    double w1 = 2.0 * h1 + h0;
    double w2 = h1 + 2.0 * h0;
    return (w1 + w2) / (w1 / d0 + w2 / d1);
  };
  size_t i = 0;
  while (i + 2 < n && x[i + 1] <= q) ++i;
  double h = interval(i);
  double t = (q - x[i]) / h;
  double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  double h10 = t * (1.0 - t) * (1.0 - t);
  double h01 = t * t * (3.0 - 2.0 * t);
  double h11 = t * t * (t - 1.0);
  return h00 * y[i] + h10 * h * slope_at(i) + h01 * y[i + 1] +
         h11 * h * slope_at(i + 1);
}

double trapezoid_mean_diff(const RDCurve& test, const RDCurve& ref, int n) {
  double q1 = std::max(test.min_quality(), ref.min_quality());
  double q2 = std::min(test.max_quality(), ref.max_quality());
  double h = (q2 - q1) / n;
  auto f = [&](double q) {
    return interpolate_log_rate(test, q) - interpolate_log_rate(ref, q);
  };
  double sum = 0.5 * (f(q1) + f(q2));
  for (int i = 1; i < n; ++i) sum += f(q1 + i * h);
  return sum * h / (q2 - q1);
}

}  // namespace

TEST_CASE("build_curve accepts the five-point anchor set") {
  RDCurve c = build_curve("clip", five_point_samples());
  CHECK(c.size() == 5);
  CHECK(c.min_quality() == doctest::Approx(0.905));
  CHECK(c.max_quality() == doctest::Approx(0.992));
  // Sorted ascending in quality; bitrate ascends with it.
  for (size_t i = 0; i + 1 < c.size(); ++i) {
    CHECK(c.points()[i].quality < c.points()[i + 1].quality);
    CHECK(c.points()[i].bitrate_kbps < c.points()[i + 1].bitrate_kbps);
  }
}

TEST_CASE("build_curve rejects short input") {
  std::vector<RDPoint> pts = five_point_samples();
  pts.resize(3);
  CHECK_THROWS_WITH_AS(build_curve("clip", pts), doctest::Contains("TooFewPoints"),
                       Error);
}

TEST_CASE("build_curve de-duplicates equal qualities, keeping lower bitrate") {
  auto pts = five_point_samples();
  pts.push_back({58, 1001.0, 0.97, MetricId::kMsSsim});
  pts.push_back({57, 1000.0, 0.97, MetricId::kMsSsim});
  CHECK_THROWS_AS(build_curve("clip", pts), Error);  // 1000 < 1300 at q 0.931+

  // In isolation: the duplicate pair collapses to the cheaper point.
  std::vector<RDPoint> dup = {
      {63, 500.0, 0.90, MetricId::kMsSsim},
      {59, 900.0, 0.94, MetricId::kMsSsim},
      {49, 1001.0, 0.97, MetricId::kMsSsim},
      {48, 1000.0, 0.97, MetricId::kMsSsim},
      {39, 2000.0, 0.99, MetricId::kMsSsim},
  };
  RDCurve c = build_curve("clip", dup);
  CHECK(c.size() == 4);
  const RDPoint* p = c.point_at_qp(48);
  CHECK(p != nullptr);
  CHECK(p->bitrate_kbps == doctest::Approx(1000.0));
  CHECK(c.point_at_qp(49) == nullptr);
}

TEST_CASE("build_curve rejects non-monotone rate and mixed metrics") {
  auto pts = five_point_samples();
  pts[2].bitrate_kbps = 50000.0;  // more bits than the higher-quality points
  CHECK_THROWS_WITH_AS(build_curve("clip", pts), doctest::Contains("NonMonotone"),
                       Error);

  pts = five_point_samples();
  pts[1].metric = MetricId::kVmaf;
  CHECK_THROWS_WITH_AS(build_curve("clip", pts),
                       doctest::Contains("MixedMetrics"), Error);

  pts = five_point_samples();
  pts[0].bitrate_kbps = 0.0;
  CHECK_THROWS_AS(build_curve("clip", pts), Error);
}

TEST_CASE("interpolation is exact at knots") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    RDCurve c = random_curve(rng);
    for (const RDPoint& p : c.points()) {
      CHECK(interpolate_log_rate(c, p.quality) ==
            doctest::Approx(std::log10(p.bitrate_kbps)).epsilon(1e-14));
    }
  }
}

TEST_CASE("interpolation reproduces affine data at midpoints") {
  // log rates affine in quality -> interpolant is the same affine function.
  std::vector<RDPoint> pts;
  for (int i = 0; i < 5; ++i) {
    double q = 0.90 + 0.02 * i;
    pts.push_back({63 - 9 * i, std::pow(10.0, 2.0 + 5.0 * (q - 0.90)), q,
                   MetricId::kMsSsim});
  }
  RDCurve c = build_curve("affine", pts);
  for (int i = 0; i + 1 < 5; ++i) {
    double mid = 0.91 + 0.02 * i;
    CHECK(interpolate_log_rate(c, mid) ==
          doctest::Approx(2.0 + 5.0 * (mid - 0.90)).epsilon(1e-12));
  }
}

TEST_CASE("interpolation matches an independent monotone-cubic oracle") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    RDCurve c = random_curve(rng);
    std::vector<double> xs, ys;
    for (const RDPoint& p : c.points()) {
      xs.push_back(p.quality);
      ys.push_back(std::log10(p.bitrate_kbps));
    }
    for (int i = 0; i < 100; ++i) {
      double q = uniform(rng, c.min_quality(), c.max_quality());
      CHECK(std::abs(interpolate_log_rate(c, q) - pchip_oracle(xs, ys, q)) <=
            1e-12);
    }
  }
}

TEST_CASE("monotone data yields a monotone interpolant") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    RDCurve c = random_curve(rng);
    double prev = interpolate_log_rate(c, c.min_quality());
    for (int i = 1; i <= 500; ++i) {
      double q = c.min_quality() +
                 (c.max_quality() - c.min_quality()) * i / 500.0;
      double v = interpolate_log_rate(c, q);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("interpolation rejects out-of-range queries") {
  RDCurve c = build_curve("clip", five_point_samples());
  CHECK_THROWS_WITH_AS(interpolate_log_rate(c, 0.5),
                       doctest::Contains("OutOfRange"), Error);
  CHECK_THROWS_AS(interpolate_log_rate(c, 0.9999), Error);
}

TEST_CASE("bd_rate of a curve against itself is zero") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 25; ++i) {
    RDCurve c = random_curve(rng);
    BDRateResult r = bd_rate(c, c);
    CHECK(std::abs(r.value_percent) < 1e-12);
    CHECK(r.overlap_fraction == doctest::Approx(1.0));
  }
}

TEST_CASE("constant bitrate ratio forces the exact percentage") {
  RDCurve ref = build_curve("ref", five_point_samples());
  auto scaled = five_point_samples();
  for (RDPoint& p : scaled) p.bitrate_kbps *= 1.10;
  RDCurve test = build_curve("test", scaled);
  CHECK(std::abs(bd_rate(test, ref).value_percent - 10.0) < 1e-9);
}

TEST_CASE("bd_rate matches a 10,001-point trapezoid oracle on gentle curves") {
  // Tighter log-rate steps keep the quadrature truncation error well under
  // the 1e-6 gate at this point count.
  CurveShape gentle;
  gentle.log_rate_step_lo = 0.02;
  gentle.log_rate_step_hi = 0.05;
  std::mt19937_64 rng(15);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto [test, ref] = random_curve_pair(rng, gentle);
    double value = bd_rate(test, ref).value_percent;
    double d = trapezoid_mean_diff(test, ref, 10000);
    double oracle = (std::pow(10.0, d) - 1.0) * 100.0;
    worst = std::max(worst, std::abs(value - oracle));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("scale covariance") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 20; ++i) {
    auto [test, ref] = random_curve_pair(rng);
    double v = bd_rate(test, ref).value_percent;
    double s = uniform(rng, 0.5, 2.0);
    std::vector<RDPoint> pts(test.points().begin(), test.points().end());
    for (RDPoint& p : pts) p.bitrate_kbps *= s;
    RDCurve scaled = build_curve("scaled", pts);
    double expected = (s * (1.0 + v / 100.0) - 1.0) * 100.0;
    CHECK(bd_rate(scaled, ref).value_percent ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("quasi-antisymmetry at matched quality supports") {
  // With identical knot sets the mean log difference is exactly negated, so
  // the percentages satisfy the inverse relation.
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    RDCurve a = random_curve(rng);
    std::vector<RDPoint> pts(a.points().begin(), a.points().end());
    for (RDPoint& p : pts) {
      p.bitrate_kbps *= uniform(rng, 0.7, 1.4);
    }
    std::sort(pts.begin(), pts.end(), [](const RDPoint& x, const RDPoint& y) {
      return x.quality < y.quality;
    });
    for (size_t j = 1; j < pts.size(); ++j) {  // restore rate monotonicity
      pts[j].bitrate_kbps =
          std::max(pts[j].bitrate_kbps, pts[j - 1].bitrate_kbps * 1.01);
    }
    RDCurve b = build_curve("b", pts);
    double ab = bd_rate(a, b).value_percent;
    double ba = bd_rate(b, a).value_percent;
    double expected_ab = (1.0 / (1.0 + ba / 100.0) - 1.0) * 100.0;
    CHECK(ab == doctest::Approx(expected_ab).epsilon(1e-9));
  }
}

TEST_CASE("insufficient quality overlap raises NoOverlap") {
  CurveShape shape;
  shape.quality_step_lo = 0.01;
  shape.quality_step_hi = 0.015;
  std::mt19937_64 rng(18);
  RDCurve low = random_curve(rng, shape, 0.80);
  RDCurve high = random_curve(rng, shape, 0.92);  // barely touches `low`
  CHECK_THROWS_WITH_AS(bd_rate(high, low), doctest::Contains("NoOverlap"),
                       Error);
  // A configured minimum of zero admits any positive overlap.
  if (high.min_quality() < low.max_quality()) {
    CHECK_NOTHROW(bd_rate(high, low, 0.0));
  }
}

TEST_CASE("bd_rate rejects mixed metrics") {
  RDCurve a = build_curve("a", five_point_samples());
  auto pts = five_point_samples();
  for (RDPoint& p : pts) {
    p.metric = MetricId::kVmaf;
    p.quality *= 100.0;
  }
  RDCurve b = build_curve("b", pts);
  CHECK_THROWS_WITH_AS(bd_rate(a, b), doctest::Contains("MixedMetrics"), Error);
}

TEST_CASE("msssim_to_db fixed points") {
  CHECK(msssim_to_db(0.9) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(msssim_to_db(0.99) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(msssim_to_db(0.0) == doctest::Approx(0.0).scale(1));
  CHECK_THROWS_AS(msssim_to_db(1.0), Error);
  CHECK_THROWS_AS(msssim_to_db(-0.1), Error);
}

TEST_CASE("msssim_to_db is strictly increasing") {
  double prev = msssim_to_db(0.0);
  for (int i = 1; i < 100; ++i) {
    double v = msssim_to_db(i / 100.0);
    CHECK(v > prev);
    prev = v;
  }
}
