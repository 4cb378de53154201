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

#include "lforge/bdrate.h"

#include <algorithm>
#include <cmath>

#include "lforge/error.h"
#include "lforge/util.h"

namespace lforge {

namespace {

int sign_of(double v) { return (v > 0) - (v < 0); }

// Endpoint slope: one-sided three-point estimate, clamped so the first
// segment stays monotone (shape-preserving form of the PCHIP boundary rule).
double edge_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign_of(m) != sign_of(d0)) {
    m = 0.0;
  } else if (sign_of(d0) != sign_of(d1) && std::abs(m) > 3.0 * std::abs(d0)) {
    m = 3.0 * d0;
  }
  return m;
}

// Knot slopes for the monotone cubic through (x, y): harmonic-mean limiting
// with Fritsch-Butland weights at interior knots.
std::vector<double> pchip_slopes(std::span<const double> x,
                                 std::span<const double> y) {
  size_t n = x.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    d[i] = (y[i + 1] - y[i]) / h[i];
  }
  std::vector<double> m(n);
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || sign_of(d[i - 1]) != sign_of(d[i])) {
      m[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  m[0] = (n == 2) ? d[0] : edge_slope(h[0], h[1], d[0], d[1]);
  m[n - 1] = (n == 2) ? d[0] : edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return m;
}

// Index of the segment containing q (points sorted by quality).
size_t segment_index(const RDCurve& curve, double q) {
  auto pts = curve.points();
  size_t lo = 0, hi = pts.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (pts[mid].quality <= q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

struct SegmentPoly {
  // y(t) = c0 + c1 t + c2 t^2 + c3 t^3 on t in [0, 1], x = x0 + t*h.
  double c0, c1, c2, c3, h;
};

SegmentPoly segment_poly(const RDCurve& curve, size_t i) {
  auto pts = curve.points();
  auto y = curve.log_rates();
  auto m = curve.slopes();
  double h = pts[i + 1].quality - pts[i].quality;
  SegmentPoly p;
  p.h = h;
  p.c0 = y[i];
  p.c1 = h * m[i];
  p.c2 = -3.0 * y[i] + 3.0 * y[i + 1] - 2.0 * h * m[i] - h * m[i + 1];
  p.c3 = 2.0 * y[i] - 2.0 * y[i + 1] + h * m[i] + h * m[i + 1];
  return p;
}

// Integral of the segment polynomial in x over t in [t0, t1].
double segment_integral(const SegmentPoly& p, double t0, double t1) {
  auto antiderivative = [&](double t) {
    return ((p.c3 / 4.0 * t + p.c2 / 3.0) * t + p.c1 / 2.0) * t * t + p.c0 * t;
  };
  return p.h * (antiderivative(t1) - antiderivative(t0));
}

}  // namespace

const char* metric_name(MetricId id) {
  switch (id) {
    case MetricId::kMsSsim: return "ms_ssim";
    case MetricId::kPsnrDb: return "psnr";
    case MetricId::kVmaf: return "vmaf";
  }
  return "unknown";
}

MetricId metric_from_string(const std::string& name) {
  if (name == "ms_ssim") return MetricId::kMsSsim;
  if (name == "psnr") return MetricId::kPsnrDb;
  if (name == "vmaf") return MetricId::kVmaf;
  raise(Errc::kConfigError, "unknown metric '" + name + "'");
}

const RDPoint* RDCurve::point_at_qp(int qp) const {
  for (const RDPoint& p : points_) {
    if (p.qp == qp) return &p;
  }
  return nullptr;
}

RDCurve build_curve(const std::string& clip_id, std::vector<RDPoint> samples) {
  if (samples.size() < RDCurve::kMinPoints) {
    raise(Errc::kTooFewPoints, clip_id + ": " + std::to_string(samples.size()) +
                                   " samples, need at least " +
                                   std::to_string(RDCurve::kMinPoints));
  }
  MetricId metric = samples.front().metric;
  for (const RDPoint& p : samples) {
    if (p.metric != metric) {
      raise(Errc::kMixedMetrics, clip_id + ": samples mix quality metrics");
    }
    if (!(p.bitrate_kbps > 0.0) || !std::isfinite(p.bitrate_kbps)) {
      raise(Errc::kDomainError, clip_id + ": bitrate must be positive, got " +
                                    fmt_double(p.bitrate_kbps));
    }
    if (!std::isfinite(p.quality)) {
      raise(Errc::kDomainError, clip_id + ": quality must be finite");
    }
    if (metric == MetricId::kMsSsim && (p.quality <= 0.0 || p.quality > 1.0)) {
      raise(Errc::kDomainError, clip_id + ": MS-SSIM quality " +
                                    fmt_double(p.quality) + " outside (0, 1]");
    }
  }

  std::sort(samples.begin(), samples.end(),
            [](const RDPoint& a, const RDPoint& b) {
              if (a.quality != b.quality) return a.quality < b.quality;
              return a.bitrate_kbps < b.bitrate_kbps;
            });

  // Collapse near-equal qualities, keeping the cheaper point: spending more
  // bits for the same quality is dominated.
  std::vector<RDPoint> pts;
  pts.reserve(samples.size());
  for (const RDPoint& p : samples) {
    if (!pts.empty() &&
        p.quality - pts.back().quality < RDCurve::kQualityDedupEps) {
      continue;  // sorted order guarantees pts.back() has the lower bitrate
    }
    pts.push_back(p);
  }
  if (pts.size() < RDCurve::kMinPoints) {
    raise(Errc::kTooFewPoints,
          clip_id + ": only " + std::to_string(pts.size()) +
              " distinct qualities after de-duplication");
  }
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1].bitrate_kbps > pts[i].bitrate_kbps)) {
      raise(Errc::kNonMonotone,
            clip_id + ": bitrate not strictly increasing with quality (qp " +
                std::to_string(pts[i].qp) + " vs qp " +
                std::to_string(pts[i + 1].qp) + ")");
    }
  }

  RDCurve curve;
  curve.clip_id_ = clip_id;
  curve.metric_ = metric;
  curve.points_ = std::move(pts);
  curve.log_rate_.reserve(curve.points_.size());
  std::vector<double> qs;
  qs.reserve(curve.points_.size());
  for (const RDPoint& p : curve.points_) {
    curve.log_rate_.push_back(std::log10(p.bitrate_kbps));
    qs.push_back(p.quality);
  }
  curve.slope_ = pchip_slopes(qs, curve.log_rate_);
  return curve;
}

double interpolate_log_rate(const RDCurve& curve, double q) {
  if (curve.size() < 2) raise(Errc::kTooFewPoints, "curve not built");
  if (q < curve.min_quality() || q > curve.max_quality()) {
    raise(Errc::kOutOfRange, "quality " + fmt_double(q) + " outside [" +
                                 fmt_double(curve.min_quality()) + ", " +
                                 fmt_double(curve.max_quality()) + "]");
  }
  size_t i = segment_index(curve, q);
  SegmentPoly p = segment_poly(curve, i);
  double t = (q - curve.points()[i].quality) / p.h;
  return ((p.c3 * t + p.c2) * t + p.c1) * t + p.c0;
}

double integrate_log_rate(const RDCurve& curve, double a, double b) {
  if (curve.size() < 2) raise(Errc::kTooFewPoints, "curve not built");
  if (a > b) std::swap(a, b);
  if (a < curve.min_quality() || b > curve.max_quality()) {
    raise(Errc::kOutOfRange, "integration range exceeds curve support");
  }
  auto pts = curve.points();
  size_t first = segment_index(curve, a);
  size_t last = segment_index(curve, b);
  double total = 0.0;
  for (size_t i = first; i <= last; ++i) {
    SegmentPoly p = segment_poly(curve, i);
    double lo = std::max(a, pts[i].quality);
    double hi = std::min(b, pts[i + 1].quality);
    if (hi <= lo) continue;
    double t0 = (lo - pts[i].quality) / p.h;
    double t1 = (hi - pts[i].quality) / p.h;
    total += segment_integral(p, t0, t1);
  }
  return total;
}

BDRateResult bd_rate(const RDCurve& test, const RDCurve& reference,
                     double min_overlap_fraction) {
  if (test.metric() != reference.metric()) {
    raise(Errc::kMixedMetrics, "curves use different quality metrics");
  }
  double q1 = std::max(test.min_quality(), reference.min_quality());
  double q2 = std::min(test.max_quality(), reference.max_quality());
  double union_lo = std::min(test.min_quality(), reference.min_quality());
  double union_hi = std::max(test.max_quality(), reference.max_quality());
  double union_span = union_hi - union_lo;
  double fraction = (q2 > q1 && union_span > 0.0) ? (q2 - q1) / union_span : 0.0;
  if (q2 <= q1 || fraction < min_overlap_fraction) {
    raise(Errc::kNoOverlap,
          "quality overlap fraction " + fmt_double(fraction) +
              " below minimum " + fmt_double(min_overlap_fraction));
  }
  double mean_diff = (integrate_log_rate(test, q1, q2) -
                      integrate_log_rate(reference, q1, q2)) /
                     (q2 - q1);
  BDRateResult r;
  r.value_percent = (std::pow(10.0, mean_diff) - 1.0) * 100.0;
  r.overlap_low = q1;
  r.overlap_high = q2;
  r.overlap_fraction = fraction;
  return r;
}

double msssim_to_db(double msssim) {
  if (!(msssim >= 0.0) || msssim >= 1.0) {
    raise(Errc::kDomainError,
          "MS-SSIM " + fmt_double(msssim) + " outside [0, 1)");
  }
  return -10.0 * std::log10(1.0 - msssim);
}

}  // namespace lforge
