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

#ifndef LFORGE_REPORTING_H_
#define LFORGE_REPORTING_H_

#include <optional>
#include <string>
#include <vector>

#include "lforge/optim.h"
#include "lforge/orchestrator.h"

namespace lforge {

// Per (shot group, mode) aggregate of final BD-rate and the companion
// columns. Only records with a finite bd_rate_final contribute.
struct GroupSummary {
  std::string shot_group;
  ModeKind mode = ModeKind::kAllFrames;
  std::vector<double> avg_k;
  double bd_rate_avg = 0.0;
  double bd_rate_min = 0.0;  // numeric minimum (largest saving)
  double bd_rate_max = 0.0;
  double iterations_avg = 0.0;
  std::optional<double> bitrate_savings_avg;
  std::optional<double> bitrate_savings_q39_avg;
  std::optional<double> msssim_change_db_avg;
  std::optional<double> vmaf_change_avg;
  int clip_count = 0;
};

// Deterministic order: shot group, then mode. Errors: EmptyInput.
std::vector<GroupSummary> summarize(const std::vector<OptimizationRecord>&);
std::string summary_csv(const std::vector<GroupSummary>&);

struct HistogramBin {
  double bin_low = 0.0;  // half-open bin [bin_low, bin_low + width)
  long count = 0;
};

// Bins of bd_rate_final anchored at zero; contiguous from the lowest to the
// highest occupied bin. Errors: EmptyInput, DomainError (width <= 0).
std::vector<HistogramBin> histogram(const std::vector<OptimizationRecord>&,
                                    double bin_width);
std::string histogram_csv(const std::vector<HistogramBin>&, double bin_width);

// 2-D scan as a CSV matrix (axis-0 values down the rows, axis-1 across the
// columns) with an optional optimizer path section appended. All exports use
// fixed 6-significant-digit formatting and are byte-stable.
// Errors: DimensionMismatch for non-2-D scans.
std::string export_contour(const GridScan& scan,
                           const std::vector<Evaluation>& path = {});

// Inverse of export_contour (values carry the export's 6-digit precision).
GridScan parse_contour(const std::string& csv,
                       std::vector<Evaluation>* path = nullptr);

// Long form: one (k1, k2, cost) row per lattice point.
std::string contour_long_csv(const GridScan& scan);

struct ProxyComparisonRow {
  std::string clip_id;
  ModeKind mode = ModeKind::kAllFrames;
  // Parallel to the profile label list of the table.
  std::vector<double> wall_clock_s;
  std::vector<std::vector<double>> final_k;
  std::vector<std::optional<double>> bd_rate_final;
  std::vector<double> speedup;  // slowest profile wall clock / this one
};

struct ProxyComparisonTable {
  std::vector<std::string> profiles;  // search-profile labels, sorted
  std::vector<ProxyComparisonRow> rows;
  std::vector<std::string> gaps;  // clip/mode pairs missing some profile
};

// Requires the same (clip, mode) pairs measured under >= 2 search profiles.
// Errors: MissingPairing.
ProxyComparisonTable proxy_comparison(const std::vector<OptimizationRecord>&);
std::string proxy_comparison_csv(const ProxyComparisonTable&);

}  // namespace lforge

#endif  // LFORGE_REPORTING_H_
