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

#include "lforge/orchestrator.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lforge/util.h"

namespace lforge {

namespace {

void opt_to_json(Json& j, const char* key, const std::optional<double>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

std::optional<double> opt_from_json(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

// Identity assignment whose key matches the clip's reference encodes: raw
// dimensionality for synthetic models, frame-type groups for external clips.
MultiplierAssignment identity_for(const ManifestEntry& clip) {
  if (clip.is_synthetic() && clip.model->dimension() == 2) {
    return identity_assignment(ModeKind::kPowellKfGfArf);
  }
  return identity_assignment(ModeKind::kAllFrames);
}

}  // namespace

void to_json(Json& j, const OptimizationRecord& r) {
  j = Json{{"clip_id", r.clip_id},
           {"shot_group", r.shot_group},
           {"mode", mode_name(r.mode)},
           {"final_k", r.final_k},
           {"no_overlap", r.no_overlap},
           {"iterations", r.iterations},
           {"cost_evals", r.cost_evals},
           {"converged", r.converged},
           {"wall_clock",
            Json{{"reference_s", r.wall_clock.reference_s},
                 {"search_s", r.wall_clock.search_s},
                 {"final_s", r.wall_clock.final_s}}},
           {"search_profile", r.search_profile},
           {"final_profile", r.final_profile},
           {"error_phase", r.error_phase},
           {"error_message", r.error_message}};
  opt_to_json(j, "bd_rate_search", r.bd_rate_search);
  opt_to_json(j, "bd_rate_final", r.bd_rate_final);
  opt_to_json(j, "bitrate_savings_avg", r.bitrate_savings_avg);
  opt_to_json(j, "bitrate_savings_q39", r.bitrate_savings_q39);
  opt_to_json(j, "msssim_change_db", r.msssim_change_db);
  opt_to_json(j, "vmaf_change", r.vmaf_change);
}

void from_json(const Json& j, OptimizationRecord& r) {
  r = OptimizationRecord{};
  j.at("clip_id").get_to(r.clip_id);
  j.at("shot_group").get_to(r.shot_group);
  r.mode = mode_from_string(j.at("mode").get<std::string>());
  j.at("final_k").get_to(r.final_k);
  j.at("no_overlap").get_to(r.no_overlap);
  j.at("iterations").get_to(r.iterations);
  j.at("cost_evals").get_to(r.cost_evals);
  j.at("converged").get_to(r.converged);
  const Json& w = j.at("wall_clock");
  w.at("reference_s").get_to(r.wall_clock.reference_s);
  w.at("search_s").get_to(r.wall_clock.search_s);
  w.at("final_s").get_to(r.wall_clock.final_s);
  j.at("search_profile").get_to(r.search_profile);
  j.at("final_profile").get_to(r.final_profile);
  j.at("error_phase").get_to(r.error_phase);
  j.at("error_message").get_to(r.error_message);
  r.bd_rate_search = opt_from_json(j, "bd_rate_search");
  r.bd_rate_final = opt_from_json(j, "bd_rate_final");
  r.bitrate_savings_avg = opt_from_json(j, "bitrate_savings_avg");
  r.bitrate_savings_q39 = opt_from_json(j, "bitrate_savings_q39");
  r.msssim_change_db = opt_from_json(j, "msssim_change_db");
  r.vmaf_change = opt_from_json(j, "vmaf_change");
}

// ---------------------------------------------------------------------------
// ResultsStore

ResultsStore::ResultsStore(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // nothing persisted yet
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      keys_.insert(j.at("key").get<std::string>());
      records_.push_back(j.at("record").get<OptimizationRecord>());
    } catch (const std::exception& e) {
      raise(Errc::kParseFailure, path_ + ":" + std::to_string(line_no) + ": " +
                                     e.what());
    }
  }
}

bool ResultsStore::contains(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return keys_.count(key) > 0;
}

void ResultsStore::append(const std::string& key,
                          const OptimizationRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  Json j{{"key", key}, {"record", record}};
  std::ofstream out(path_, std::ios::app);
  if (!out) raise(Errc::kIoError, "cannot append to " + path_);
  out << j.dump() << "\n";
  out.flush();
  if (!out) raise(Errc::kIoError, "short write to " + path_);
  keys_.insert(key);
  records_.push_back(record);
}

// ---------------------------------------------------------------------------
// Orchestrator

Orchestrator::Orchestrator(const CampaignConfig& config,
                           std::shared_ptr<CachedBackend> backend,
                           std::vector<ManifestEntry> manifest, EventLog* log)
    : config_(config),
      backend_(std::move(backend)),
      manifest_(std::move(manifest)),
      log_(log),
      pool_(std::make_unique<WorkerPool>(config.pool_size)) {
  if (manifest_.empty()) {
    raise(Errc::kEmptyManifest, "campaign has no clips");
  }
}

const ManifestEntry& Orchestrator::entry(const std::string& clip_id) const {
  for (const ManifestEntry& e : manifest_) {
    if (e.clip_id == clip_id) return e;
  }
  raise(Errc::kConfigError, "clip '" + clip_id + "' not in manifest");
}

EncodeRequest Orchestrator::base_request(const ManifestEntry& clip,
                                         const ProxyProfile& profile) const {
  EncodeRequest req;
  req.clip_id = clip.clip_id;
  req.source_path = clip.path;
  req.multipliers = identity_for(clip);
  req.profile = profile;
  return req;
}

RDCurve Orchestrator::curve_at(const ManifestEntry& clip,
                               const MultiplierAssignment& k,
                               const ProxyProfile& profile,
                               std::vector<MeasuredPoint>* measured) {
  std::vector<std::future<MeasuredPoint>> futures;
  futures.reserve(config_.qp_anchors.size());
  for (int qp : config_.qp_anchors) {
    EncodeRequest req = base_request(clip, profile);
    req.qp = qp;
    req.multipliers = k;
    futures.push_back(
        pool_->submit([this, req] { return backend_->encode_and_measure_full(req); }));
  }
  std::vector<MeasuredPoint> results;
  results.reserve(futures.size());
  std::string first_error;
  int failed_qp = 0;
  for (size_t i = 0; i < futures.size(); ++i) {
    try {
      results.push_back(futures[i].get());
    } catch (const std::exception& e) {
      if (first_error.empty()) {
        first_error = e.what();
        failed_qp = config_.qp_anchors[i];
      }
    }
  }
  if (!first_error.empty()) {
    raise(Errc::kCostFailure, clip.clip_id + " at qp " +
                                  std::to_string(failed_qp) + ": " +
                                  first_error);
  }
  std::vector<RDPoint> points;
  points.reserve(results.size());
  for (const MeasuredPoint& m : results) points.push_back(m.point);
  if (measured) *measured = std::move(results);
  return build_curve(clip.clip_id, std::move(points));
}

RDCurve Orchestrator::run_reference(const ManifestEntry& clip,
                                    const ProxyProfile& profile,
                                    std::span<const int> qp_anchors) {
  if (qp_anchors.empty()) {
    raise(Errc::kEmptyInput, "no qp anchors configured");
  }
  if (log_) {
    log_->event(1, "reference",
                {{"clip", clip.clip_id}, {"profile", profile.label}});
  }
  return curve_at(clip, identity_for(clip), profile);
}

VectorCost Orchestrator::make_cost(const ManifestEntry& clip,
                                   const RDCurve& reference,
                                   const OptimizationMode& mode,
                                   const ProxyProfile& profile) {
  ModeKind kind = mode.kind;
  RDCurve ref = reference;  // cost owns an immutable copy
  return [this, clip, ref, kind, profile](const std::vector<double>& k) {
    if (cancel_.load()) {
      throw Error(Errc::kCancelled, "campaign cancelled");
    }
    MultiplierAssignment assignment = make_assignment(kind, k);
    RDCurve test = curve_at(clip, assignment, profile);
    double value = bd_rate(test, ref).value_percent;
    if (log_) {
      log_->event(2, "cost_eval",
                  {{"clip", clip.clip_id}, {"k", k}, {"bd_rate", value}});
    }
    return value;
  };
}

OptimizationMode Orchestrator::mode_for(ModeKind kind) const {
  OptimizationMode m = default_mode(kind, config_.k_bounds);
  m.grid_step = config_.grid_step;
  return m;
}

OptimizationRecord Orchestrator::optimize_clip(
    const ManifestEntry& clip, const OptimizationMode& mode,
    const ProxyProfile& search_profile, const ProxyProfile& final_profile,
    const OptimizerConfig& optimizer_config) {
  OptimizationRecord rec;
  rec.clip_id = clip.clip_id;
  rec.shot_group = clip.shot_group;
  rec.mode = mode.kind;
  rec.search_profile = search_profile.label;
  rec.final_profile = final_profile.label;
  int dim = mode_dimension(mode.kind);
  rec.final_k.assign(static_cast<size_t>(dim), 1.0);

  // Run-A: reference curve on the search profile.
  double t0 = now_seconds();
  RDCurve search_reference;
  try {
    search_reference = run_reference(clip, search_profile, config_.qp_anchors);
  } catch (const std::exception& e) {
    rec.wall_clock.reference_s = now_seconds() - t0;
    rec.error_phase = "reference";
    rec.error_message = e.what();
    return rec;
  }
  rec.wall_clock.reference_s = now_seconds() - t0;

  // Run-B: numeric search from k = 1.
  double t1 = now_seconds();
  try {
    VectorCost cost = make_cost(clip, search_reference, mode, search_profile);
    OptimizerTrace trace;
    switch (mode.optimizer) {
      case OptimizerChoice::kBrent:
      case OptimizerChoice::kGolden: {
        if (dim != 1) {
          raise(Errc::kDimensionMismatch,
                "scalar optimizer on a multi-axis mode");
        }
        ScalarCost f = [&cost](double t) {
          return cost(std::vector<double>{t});
        };
        trace = (mode.optimizer == OptimizerChoice::kBrent)
                    ? brent_minimize(f, mode.axis_bounds[0], optimizer_config)
                    : golden_section(f, mode.axis_bounds[0], optimizer_config);
        break;
      }
      case OptimizerChoice::kPowell: {
        std::vector<double> start(static_cast<size_t>(dim), 1.0);
        trace = powell_minimize(cost, start, mode.axis_bounds, optimizer_config);
        break;
      }
      case OptimizerChoice::kGrid: {
        std::vector<GridAxis> axes;
        for (const Bounds& b : mode.axis_bounds) {
          axes.push_back(GridAxis{b.low, b.high, mode.grid_step});
        }
        auto [gtrace, scan] = grid_search(cost, axes);
        trace = std::move(gtrace);
        break;
      }
    }
    rec.iterations = trace.iterations_used;
    rec.cost_evals = static_cast<int>(trace.evaluations.size());
    rec.converged = trace.converged;
    if (!trace.best_point.empty() &&
        trace.best_cost < -optimizer_config.f_tolerance) {
      rec.final_k = trace.best_point;
      rec.bd_rate_search = trace.best_cost;
    } else {
      // No measurable improvement over the k = 1 baseline: keep identity.
      rec.bd_rate_search = 0.0;
    }
  } catch (const CostFailure& e) {
    rec.wall_clock.search_s = now_seconds() - t1;
    rec.cost_evals = static_cast<int>(e.partial_trace().evaluations.size());
    rec.error_phase = "search";
    rec.error_message = e.what();
    return rec;
  } catch (const std::exception& e) {
    rec.wall_clock.search_s = now_seconds() - t1;
    rec.error_phase = "search";
    rec.error_message = e.what();
    return rec;
  }
  rec.wall_clock.search_s = now_seconds() - t1;

  // Final: full-fidelity re-evaluation of the found multipliers. When the
  // profiles differ the reference is re-encoded at the final profile.
  double t2 = now_seconds();
  try {
    MultiplierAssignment best = make_assignment(mode.kind, rec.final_k);
    std::vector<MeasuredPoint> ref_measured, opt_measured;
    RDCurve final_reference =
        (profile_fingerprint(final_profile) ==
         profile_fingerprint(search_profile))
            ? search_reference
            : run_reference(clip, final_profile, config_.qp_anchors);
    curve_at(clip, identity_for(clip), final_profile, &ref_measured);
    RDCurve final_opt = curve_at(clip, best, final_profile, &opt_measured);
    try {
      rec.bd_rate_final = bd_rate(final_opt, final_reference).value_percent;
    } catch (const Error& e) {
      if (e.code() != Errc::kNoOverlap) throw;
      rec.no_overlap = true;
    }

    // Table columns: per-anchor deltas of the optimized encode vs. the
    // reference at the final profile.
    double savings_sum = 0.0, db_sum = 0.0, vmaf_sum = 0.0;
    int n = 0, db_n = 0, vmaf_n = 0;
    for (int qp : config_.qp_anchors) {
      const RDPoint* opt = final_opt.point_at_qp(qp);
      const RDPoint* ref = final_reference.point_at_qp(qp);
      if (!opt || !ref) continue;
      double savings = 100.0 * (opt->bitrate_kbps - ref->bitrate_kbps) /
                       ref->bitrate_kbps;
      savings_sum += savings;
      ++n;
      if (qp == 39) rec.bitrate_savings_q39 = savings;
      if (opt->quality < 1.0 && ref->quality < 1.0 && opt->quality >= 0.0 &&
          ref->quality >= 0.0) {
        db_sum += msssim_to_db(opt->quality) - msssim_to_db(ref->quality);
        ++db_n;
      }
    }
    for (size_t i = 0; i < opt_measured.size() && i < ref_measured.size(); ++i) {
      if (opt_measured[i].metrics && ref_measured[i].metrics) {
        vmaf_sum += opt_measured[i].metrics->vmaf_pooled -
                    ref_measured[i].metrics->vmaf_pooled;
        ++vmaf_n;
      }
    }
    if (n > 0) rec.bitrate_savings_avg = savings_sum / n;
    if (db_n > 0) rec.msssim_change_db = db_sum / db_n;
    if (vmaf_n > 0) rec.vmaf_change = vmaf_sum / vmaf_n;
  } catch (const std::exception& e) {
    rec.wall_clock.final_s = now_seconds() - t2;
    rec.error_phase = "final";
    rec.error_message = e.what();
    return rec;  // search results survive a failed final phase
  }
  rec.wall_clock.final_s = now_seconds() - t2;
  if (log_) {
    Json fields{{"clip", clip.clip_id},
                {"mode", mode_name(mode.kind)},
                {"k", rec.final_k},
                {"iterations", rec.iterations}};
    if (rec.bd_rate_final) fields["bd_rate_final"] = *rec.bd_rate_final;
    log_->event(1, "optimized", fields);
  }
  return rec;
}

std::string Orchestrator::record_key(const ManifestEntry& clip,
                                     ModeKind mode) const {
  EncodeRequest req = base_request(
      clip, profile_by_label(config_, config_.search_profile));
  std::string digest = backend_->clip_digest(req);
  return to_hex(fnv1a64(digest + "|" + mode_name(mode) + "|" +
                        config_.search_profile + "|" + config_.final_profile +
                        "|" + config_digest(config_)));
}

CampaignResult Orchestrator::run_campaign(ResultsStore& store) {
  if (config_.modes.empty()) {
    raise(Errc::kConfigError, "campaign config lists no modes");
  }
  const ProxyProfile& search = profile_by_label(config_, config_.search_profile);
  const ProxyProfile& final = profile_by_label(config_, config_.final_profile);
  CampaignResult result;
  for (const ManifestEntry& clip : manifest_) {
    for (ModeKind kind : config_.modes) {
      if (cancel_.load()) {
        result.cancelled = true;
        break;
      }
      std::string key = record_key(clip, kind);
      if (store.contains(key)) {
        ++result.skipped;
        continue;
      }
      OptimizationRecord rec;
      try {
        rec = optimize_clip(clip, mode_for(kind), search, final,
                            config_.optimizer);
      } catch (const std::exception& e) {
        result.failures.push_back({clip.clip_id, mode_name(kind), e.what()});
        continue;
      }
      if (!rec.error_phase.empty() && rec.error_phase != "final") {
        // Pair did not reach a usable result; keep it retryable.
        result.failures.push_back(
            {clip.clip_id, mode_name(kind), rec.error_phase + ": " + rec.error_message});
        continue;
      }
      store.append(key, rec);
      ++result.executed;
    }
    if (result.cancelled) break;
  }
  result.records = store.records();
  return result;
}

std::pair<OptimizerTrace, GridScan> Orchestrator::grid_scan(
    const ManifestEntry& clip, const ProxyProfile& profile, double step) {
  OptimizationMode mode = mode_for(ModeKind::kGrid2d);
  mode.grid_step = step;
  RDCurve reference = run_reference(clip, profile, config_.qp_anchors);
  VectorCost cost = make_cost(clip, reference, mode, profile);
  std::vector<GridAxis> axes;
  for (const Bounds& b : mode.axis_bounds) {
    axes.push_back(GridAxis{b.low, b.high, step});
  }
  return grid_search(cost, axes);
}

}  // namespace lforge
