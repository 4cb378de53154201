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

#ifndef LFORGE_ORCHESTRATOR_H_
#define LFORGE_ORCHESTRATOR_H_

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lforge/config.h"
#include "lforge/corpus.h"
#include "lforge/encoders.h"
#include "lforge/log.h"
#include "lforge/pool.h"
#include "lforge/serialize.h"

namespace lforge {

struct PhaseTimings {
  double reference_s = 0.0;
  double search_s = 0.0;
  double final_s = 0.0;
};

// One per-clip optimization outcome; the row format every report is built
// from.
struct OptimizationRecord {
  std::string clip_id;
  std::string shot_group;
  ModeKind mode = ModeKind::kAllFrames;
  std::vector<double> final_k;
  std::optional<double> bd_rate_search;  // proxy vs. proxy reference
  std::optional<double> bd_rate_final;   // full fidelity vs. its reference
  bool no_overlap = false;               // a BD-rate was unset due to NoOverlap
  int iterations = 0;
  int cost_evals = 0;
  bool converged = false;
  std::optional<double> bitrate_savings_avg;  // % over anchors
  std::optional<double> bitrate_savings_q39;  // % at qp 39
  std::optional<double> msssim_change_db;
  std::optional<double> vmaf_change;
  PhaseTimings wall_clock;
  std::string search_profile;
  std::string final_profile;
  std::string error_phase;    // empty when the record is clean
  std::string error_message;
};

void to_json(Json& j, const OptimizationRecord& r);
void from_json(const Json& j, OptimizationRecord& r);

// Append-only JSON-lines record log; the campaign resume point. One line per
// record: {"key": ..., "record": {...}}.
class ResultsStore {
 public:
  explicit ResultsStore(std::string path);

  bool contains(const std::string& key) const;
  void append(const std::string& key, const OptimizationRecord& record);
  const std::vector<OptimizationRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

 private:
  std::string path_;
  std::set<std::string> keys_;
  std::vector<OptimizationRecord> records_;
  mutable std::mutex mutex_;
};

struct CampaignFailure {
  std::string clip_id;
  std::string mode;
  std::string message;
};

struct CampaignResult {
  std::vector<OptimizationRecord> records;  // store contents after the run
  std::vector<CampaignFailure> failures;
  int executed = 0;
  int skipped = 0;  // already present in the store
  bool cancelled = false;
};

// Drives the two-run workflow against a backend:
//   Run-A  encode the qp anchors at k = 1 (in parallel) -> reference curve
//   Run-B  numeric optimizer from k = 1, each cost evaluation encoding all
//          anchors at the trial k and scoring BD-rate against Run-A
//   Final  re-encode reference and optimum at the final profile and score
// All encodes go through the shared cache, so identical (clip, k, qp,
// profile) tuples never launch twice.
class Orchestrator {
 public:
  Orchestrator(const CampaignConfig& config,
               std::shared_ptr<CachedBackend> backend,
               std::vector<ManifestEntry> manifest, EventLog* log = nullptr);

  // Cooperative cancellation; checked between optimizer steps and pairs.
  void request_cancel() { cancel_.store(true); }
  bool cancel_requested() const { return cancel_.load(); }

  const std::vector<ManifestEntry>& manifest() const { return manifest_; }
  const ManifestEntry& entry(const std::string& clip_id) const;
  CachedBackend& backend() { return *backend_; }

  // Run-A: one encode per anchor with all multipliers at 1.
  RDCurve run_reference(const ManifestEntry& clip, const ProxyProfile& profile,
                        std::span<const int> qp_anchors);

  // The BD-rate cost callable for Run-B. Rejects non-positive multipliers
  // before any encode.
  VectorCost make_cost(const ManifestEntry& clip, const RDCurve& reference,
                       const OptimizationMode& mode,
                       const ProxyProfile& profile);

  OptimizationRecord optimize_clip(const ManifestEntry& clip,
                                   const OptimizationMode& mode,
                                   const ProxyProfile& search_profile,
                                   const ProxyProfile& final_profile,
                                   const OptimizerConfig& optimizer_config);

  // Every (clip, mode) pair, resumable through the store.
  CampaignResult run_campaign(ResultsStore& store);

  // Exhaustive 2-D scan for contour export, plus the Powell search path over
  // the same cost (the overlay a contour figure wants).
  std::pair<OptimizerTrace, GridScan> grid_scan(const ManifestEntry& clip,
                                                const ProxyProfile& profile,
                                                double step);

  std::string record_key(const ManifestEntry& clip, ModeKind mode) const;
  OptimizationMode mode_for(ModeKind kind) const;

 private:
  RDCurve curve_at(const ManifestEntry& clip, const MultiplierAssignment& k,
                   const ProxyProfile& profile,
                   std::vector<MeasuredPoint>* measured = nullptr);
  EncodeRequest base_request(const ManifestEntry& clip,
                             const ProxyProfile& profile) const;

  CampaignConfig config_;
  std::shared_ptr<CachedBackend> backend_;
  std::vector<ManifestEntry> manifest_;
  EventLog* log_;
  std::unique_ptr<WorkerPool> pool_;
  std::atomic<bool> cancel_{false};
};

}  // namespace lforge

#endif  // LFORGE_ORCHESTRATOR_H_
