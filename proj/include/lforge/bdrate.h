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

#ifndef LFORGE_BDRATE_H_
#define LFORGE_BDRATE_H_

#include <span>
#include <string>
#include <vector>

namespace lforge {

enum class MetricId { kMsSsim, kPsnrDb, kVmaf };

const char* metric_name(MetricId id);
MetricId metric_from_string(const std::string& name);

// One rate/quality sample at a fixed quantizer setting.
struct RDPoint {
  int qp = 0;
  double bitrate_kbps = 0.0;  // > 0
  double quality = 0.0;       // metric-native units
  MetricId metric = MetricId::kMsSsim;
};

// Rate-distortion curve over one clip. Points are kept sorted by ascending
// quality; the monotone piecewise-cubic interpolant over
// (quality, log10 bitrate) is precomputed at build time.
//
// Interpolation uses Hermite segments with harmonic-mean limited slopes
// (Fritsch-Butland weights), which reproduces affine data exactly and never
// overshoots between knots on monotone data.
class RDCurve {
 public:
  // Qualities closer than this are treated as duplicates; the point with the
  // lower bitrate is kept.
  static constexpr double kQualityDedupEps = 1e-9;
  static constexpr size_t kMinPoints = 4;

  RDCurve() = default;

  const std::string& clip_id() const { return clip_id_; }
  MetricId metric() const { return metric_; }
  std::span<const RDPoint> points() const { return points_; }
  size_t size() const { return points_.size(); }
  double min_quality() const { return points_.front().quality; }
  double max_quality() const { return points_.back().quality; }
  std::span<const double> log_rates() const { return log_rate_; }
  std::span<const double> slopes() const { return slope_; }

  // Returns the point at a given qp anchor, or nullptr.
  const RDPoint* point_at_qp(int qp) const;

 private:
  friend RDCurve build_curve(const std::string& clip_id,
                             std::vector<RDPoint> samples);

  std::string clip_id_;
  MetricId metric_ = MetricId::kMsSsim;
  std::vector<RDPoint> points_;   // ascending quality
  std::vector<double> log_rate_;  // log10(bitrate) per point
  std::vector<double> slope_;     // interpolant slope at each knot
};

struct BDRateResult {
  double value_percent = 0.0;  // negative = bitrate savings
  double overlap_low = 0.0;    // integration lower bound
  double overlap_high = 0.0;   // integration upper bound
  double overlap_fraction = 0.0;  // integration span / union span
};

// Validates, sorts by quality, de-duplicates near-equal qualities and
// precomputes the interpolant.
// Errors: TooFewPoints, NonMonotone, MixedMetrics, DomainError.
RDCurve build_curve(const std::string& clip_id, std::vector<RDPoint> samples);

// Value of the interpolant at `quality`. Errors: OutOfRange.
double interpolate_log_rate(const RDCurve& curve, double quality);

// Exact integral of the interpolant over [a, b] (closed-form per segment).
// Errors: OutOfRange if [a, b] exceeds the curve support.
double integrate_log_rate(const RDCurve& curve, double a, double b);

// Average percentage bitrate difference of `test` against `reference` over
// the overlapping quality range. Errors: MixedMetrics, NoOverlap.
BDRateResult bd_rate(const RDCurve& test, const RDCurve& reference,
                     double min_overlap_fraction = 0.5);

// -10*log10(1 - s); the dB form MS-SSIM deltas are reported in.
// Errors: DomainError for s outside [0, 1).
double msssim_to_db(double msssim);

}  // namespace lforge

#endif  // LFORGE_BDRATE_H_
