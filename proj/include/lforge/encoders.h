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

#ifndef LFORGE_ENCODERS_H_
#define LFORGE_ENCODERS_H_

#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lforge/bdrate.h"
#include "lforge/multiplier.h"
#include "lforge/rdmodel.h"

namespace lforge {

enum class DownscaleFilter { kLanczos5 };

const char* filter_name(DownscaleFilter f);

// Resolution/preset pair used for a phase of the optimization. Zero target
// dimensions mean "encode at native resolution".
struct ProxyProfile {
  std::string label;  // e.g. "4K-S2", "1080p-S6"
  int target_width = 0;
  int target_height = 0;
  int speed_preset = 2;
  DownscaleFilter filter = DownscaleFilter::kLanczos5;
};

void validate_profile(const ProxyProfile& profile);
std::string profile_fingerprint(const ProxyProfile& profile);

struct EncodeRequest {
  std::string clip_id;
  std::string source_path;  // Y4M; empty for synthetic clips
  int qp = 0;
  MultiplierAssignment multipliers;
  ProxyProfile profile;
  std::string work_dir;
};

// Per-frame metric series plus pooled scalars, as reported by the external
// metric tool. Pooling is the arithmetic mean over frames.
struct MetricReport {
  std::vector<double> msssim_frames;
  std::vector<double> vmaf_frames;
  double msssim_pooled = 0.0;
  double vmaf_pooled = 0.0;
  double bitrate_kbps = 0.0;
  int frame_count = 0;
};

// Parses the metric tool JSON contract:
//   {"pooled": {"ms_ssim": f, "vmaf": f}, "frames": [{"ms_ssim": f, ...}]}
// and checks pooled values against the frame means. Errors: ParseFailure.
MetricReport parse_metric_report(const std::string& json_text);

struct MeasuredPoint {
  RDPoint point;
  std::optional<MetricReport> metrics;  // absent for synthetic encodes
};

// Backend contract: produce an RDPoint for (clip, qp, k, profile).
class EncodeBackend {
 public:
  virtual ~EncodeBackend() = default;

  virtual MeasuredPoint encode_and_measure_full(const EncodeRequest& req) = 0;
  virtual std::pair<int, int> qp_range() const = 0;
  virtual std::string version_tag() const = 0;
  // Canonical multiplier encoding for cache keys. Two assignments that
  // produce the same encode must map to the same key.
  virtual std::string multiplier_key(const MultiplierAssignment& k) const = 0;
  virtual std::string clip_digest(const EncodeRequest& req) = 0;
  // External-process launches (or model evaluations for synthetic).
  virtual long launch_count() const = 0;
};

RDPoint encode_and_measure(EncodeBackend& backend, const EncodeRequest& req);

// Splits a command template into arguments (honoring quoted segments) and
// substitutes {input} {output} {qp} {k_all} {k_kf} {k_gf_arf} {preset}
// {width} {height}. Multiplier groups the active mode does not tune render
// as "1.0". Errors: UnknownPlaceholder.
std::vector<std::string> render_command(const std::string& command_template,
                                        const EncodeRequest& request,
                                        const std::string& output_path = {});

// Generic form used for the metric tool template: any {name} must be present
// in `values`. Errors: UnknownPlaceholder.
std::vector<std::string> render_template(
    const std::string& command_template,
    const std::map<std::string, std::string>& values);

// Writes a Y4M downscaled to the profile's target size with the profile's
// filter, preserving frame rate, count, bit depth and colorspace. The result
// is cached by (source digest, profile): repeated calls return the cached
// path. Errors: ParseFailure, UnsupportedColorspace, DomainError.
std::string downscale(const std::string& source_path,
                      const ProxyProfile& profile,
                      const std::string& cache_dir);

// Synthetic backend: closed-form models registered by clip id.
class SyntheticBackend : public EncodeBackend {
 public:
  void register_model(SyntheticClipModel model);
  const SyntheticClipModel* find_model(const std::string& clip_id) const;

  MeasuredPoint encode_and_measure_full(const EncodeRequest& req) override;
  std::pair<int, int> qp_range() const override;
  std::string version_tag() const override { return "synthetic-1"; }
  std::string multiplier_key(const MultiplierAssignment& k) const override;
  std::string clip_digest(const EncodeRequest& req) override;
  long launch_count() const override { return launches_.load(); }

 private:
  std::map<std::string, SyntheticClipModel> models_;
  std::atomic<long> launches_{0};
};

struct ExternalBackendConfig {
  std::string encoder_template;  // uses render_command placeholders
  std::string metric_template;   // uses {source} {encoded} {output} {width} {height}
  int qp_min = 0;
  int qp_max = 63;
  std::string version_tag = "external";
  std::string scratch_dir;  // per-job work dirs and proxy cache live here
};

// Drives a real encoder binary plus a metric tool through command templates.
// Quality is always measured against the full-resolution source: the metric
// tool receives the original Y4M and is responsible for decoding the
// bitstream and scaling it back before comparison.
class ExternalBackend : public EncodeBackend {
 public:
  explicit ExternalBackend(ExternalBackendConfig config);

  MeasuredPoint encode_and_measure_full(const EncodeRequest& req) override;
  std::pair<int, int> qp_range() const override;
  std::string version_tag() const override { return config_.version_tag; }
  std::string multiplier_key(const MultiplierAssignment& k) const override;
  std::string clip_digest(const EncodeRequest& req) override;
  long launch_count() const override { return launches_.load(); }

 private:
  struct SourceInfo {
    std::string digest;
    long frame_count = 0;
    double duration_s = 0.0;
    int width = 0, height = 0;
  };
  const SourceInfo& source_info(const std::string& path);

  ExternalBackendConfig config_;
  std::atomic<long> launches_{0};
  std::mutex mutex_;
  std::map<std::string, SourceInfo> sources_;
};

// Memoizing wrapper around any backend. An entry is persisted only after a
// fully successful encode+measure (write-to-temp, rename-on-success);
// concurrent requests for the same key share one underlying launch. An empty
// cache_dir keeps the cache in memory only (enough for synthetic backends).
class CachedBackend : public EncodeBackend {
 public:
  CachedBackend(std::shared_ptr<EncodeBackend> inner, std::string cache_dir);

  MeasuredPoint encode_and_measure_full(const EncodeRequest& req) override;
  std::pair<int, int> qp_range() const override { return inner_->qp_range(); }
  std::string version_tag() const override { return inner_->version_tag(); }
  std::string multiplier_key(const MultiplierAssignment& k) const override {
    return inner_->multiplier_key(k);
  }
  std::string clip_digest(const EncodeRequest& req) override {
    return inner_->clip_digest(req);
  }
  long launch_count() const override { return inner_->launch_count(); }

  std::string cache_key(const EncodeRequest& req);
  long hits() const { return hits_.load(); }
  long misses() const { return misses_.load(); }

 private:
  std::shared_ptr<EncodeBackend> inner_;
  std::string cache_dir_;
  std::atomic<long> hits_{0};
  std::atomic<long> misses_{0};
  std::mutex mutex_;
  std::map<std::string, MeasuredPoint> memory_;
  std::map<std::string, std::shared_future<MeasuredPoint>> in_flight_;
};

}  // namespace lforge

#endif  // LFORGE_ENCODERS_H_
