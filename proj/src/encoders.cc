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

#include "lforge/encoders.h"

#include <cmath>
#include <filesystem>
#include <numeric>

#include "lforge/process.h"
#include "lforge/resample.h"
#include "lforge/serialize.h"
#include "lforge/util.h"
#include "lforge/y4m.h"

namespace lforge {

namespace fs = std::filesystem;

const char* filter_name(DownscaleFilter f) {
  switch (f) {
    case DownscaleFilter::kLanczos5: return "lanczos5";
  }
  return "lanczos5";
}

void validate_profile(const ProxyProfile& profile) {
  bool both_zero = profile.target_width == 0 && profile.target_height == 0;
  bool both_pos = profile.target_width > 0 && profile.target_height > 0;
  if (!both_zero && !both_pos) {
    raise(Errc::kConfigError, "profile '" + profile.label +
                                  "': target dimensions must both be zero or "
                                  "both positive");
  }
}

std::string profile_fingerprint(const ProxyProfile& profile) {
  return profile.label + "/" + std::to_string(profile.target_width) + "x" +
         std::to_string(profile.target_height) + "/s" +
         std::to_string(profile.speed_preset) + "/" +
         filter_name(profile.filter);
}

MetricReport parse_metric_report(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    raise(Errc::kParseFailure, std::string("metric JSON: ") + e.what());
  }
  MetricReport m;
  try {
    const Json& pooled = j.at("pooled");
    pooled.at("ms_ssim").get_to(m.msssim_pooled);
    pooled.at("vmaf").get_to(m.vmaf_pooled);
    for (const Json& f : j.at("frames")) {
      m.msssim_frames.push_back(f.at("ms_ssim").get<double>());
      m.vmaf_frames.push_back(f.at("vmaf").get<double>());
    }
  } catch (const Json::exception& e) {
    raise(Errc::kParseFailure, std::string("metric JSON: ") + e.what());
  }
  m.frame_count = static_cast<int>(m.msssim_frames.size());
  if (m.frame_count == 0) {
    raise(Errc::kParseFailure, "metric JSON reports zero frames");
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  if (std::abs(mean(m.msssim_frames) - m.msssim_pooled) > 1e-6 ||
      std::abs(mean(m.vmaf_frames) - m.vmaf_pooled) > 1e-4) {
    raise(Errc::kParseFailure,
          "pooled metrics do not match per-frame arithmetic means");
  }
  return m;
}

RDPoint encode_and_measure(EncodeBackend& backend, const EncodeRequest& req) {
  return backend.encode_and_measure_full(req).point;
}

std::vector<std::string> render_template(
    const std::string& command_template,
    const std::map<std::string, std::string>& values) {
  // Tokenize first (so substituted values never re-split), honoring quotes.
  std::vector<std::string> tokens;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (char c : command_template) {
    if (quote != 0) {
      if (c == quote) {
        quote = 0;
      } else {
        current.push_back(c);
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
      continue;
    }
    if (c == ' ' || c == '\t') {
      if (in_token) {
        tokens.push_back(std::move(current));
        current.clear();
        in_token = false;
      }
      continue;
    }
    current.push_back(c);
    in_token = true;
  }
  if (quote != 0) {
    raise(Errc::kParseFailure, "unterminated quote in command template");
  }
  if (in_token) tokens.push_back(std::move(current));

  for (std::string& token : tokens) {
    std::string out;
    size_t pos = 0;
    while (pos < token.size()) {
      size_t open = token.find('{', pos);
      if (open == std::string::npos) {
        out.append(token, pos, std::string::npos);
        break;
      }
      size_t close = token.find('}', open + 1);
      if (close == std::string::npos) {
        out.append(token, pos, std::string::npos);
        break;
      }
      out.append(token, pos, open - pos);
      std::string name = token.substr(open + 1, close - open - 1);
      auto it = values.find(name);
      if (it == values.end()) {
        raise(Errc::kUnknownPlaceholder, "{" + name + "}");
      }
      out += it->second;
      pos = close + 1;
    }
    token = std::move(out);
  }
  return tokens;
}

std::vector<std::string> render_command(const std::string& command_template,
                                        const EncodeRequest& request,
                                        const std::string& output_path) {
  EffectiveMultipliers e = route_multipliers(request.multipliers);
  std::map<std::string, std::string> values;
  values["input"] = request.source_path;
  values["output"] = output_path.empty()
                         ? join_path(request.work_dir, "out.bin")
                         : output_path;
  values["qp"] = std::to_string(request.qp);
  values["k_all"] = fmt_multiplier(e.k_all);
  values["k_kf"] = fmt_multiplier(e.k_kf);
  values["k_gf_arf"] = fmt_multiplier(e.k_gf_arf);
  values["preset"] = std::to_string(request.profile.speed_preset);
  values["width"] = std::to_string(request.profile.target_width);
  values["height"] = std::to_string(request.profile.target_height);
  return render_template(command_template, values);
}

namespace {

std::mutex g_downscale_mutex;

}  // namespace

std::string downscale(const std::string& source_path,
                      const ProxyProfile& profile,
                      const std::string& cache_dir) {
  if (profile.target_width <= 0 || profile.target_height <= 0) {
    raise(Errc::kDomainError,
          "downscale needs positive target dimensions (profile '" +
              profile.label + "')");
  }
  ensure_dir(cache_dir);
  std::string digest = file_digest(source_path);
  std::string proxy_name = "proxy-" + digest + "-" +
                           std::to_string(profile.target_width) + "x" +
                           std::to_string(profile.target_height) + "-" +
                           filter_name(profile.filter) + ".y4m";
  std::string proxy_path = join_path(cache_dir, proxy_name);

  std::lock_guard<std::mutex> lock(g_downscale_mutex);
  if (fs::exists(proxy_path)) return proxy_path;

  Y4mReader reader(source_path);
  Y4mHeader out_header = reader.header();
  out_header.width = profile.target_width;
  out_header.height = profile.target_height;

  const int taps = 5;  // kLanczos5 is the only filter
  int max_value = (1 << reader.header().bit_depth()) - 1;

  std::string tmp_path = proxy_path + ".part";
  {
    Y4mWriter writer(tmp_path, out_header);
    Y4mFrame in_frame, out_frame;
    out_frame.planes.resize(static_cast<size_t>(out_header.plane_count()));
    while (reader.read_frame(&in_frame)) {
      out_frame.params = in_frame.params;
      for (int p = 0; p < out_header.plane_count(); ++p) {
        auto& dst = out_frame.planes[static_cast<size_t>(p)];
        dst.resize(out_header.plane_samples(p));
        resample_plane(in_frame.planes[static_cast<size_t>(p)].data(),
                       reader.header().plane_width(p),
                       reader.header().plane_height(p), dst.data(),
                       out_header.plane_width(p), out_header.plane_height(p),
                       taps, max_value);
      }
      writer.write_frame(out_frame);
    }
    writer.close();
  }
  std::error_code ec;
  fs::rename(tmp_path, proxy_path, ec);
  if (ec) {
    fs::remove(tmp_path, ec);
    raise(Errc::kIoError, "cannot finalize proxy " + proxy_path);
  }
  return proxy_path;
}

// ---------------------------------------------------------------------------
// SyntheticBackend

void SyntheticBackend::register_model(SyntheticClipModel model) {
  validate_model(model);
  models_[model.clip_id] = std::move(model);
}

const SyntheticClipModel* SyntheticBackend::find_model(
    const std::string& clip_id) const {
  auto it = models_.find(clip_id);
  return it == models_.end() ? nullptr : &it->second;
}

MeasuredPoint SyntheticBackend::encode_and_measure_full(
    const EncodeRequest& req) {
  const SyntheticClipModel* model = find_model(req.clip_id);
  if (!model) {
    raise(Errc::kSourceMissing, "no synthetic model for clip '" + req.clip_id + "'");
  }
  launches_.fetch_add(1);
  MeasuredPoint m;
  m.point = synthetic_encode(*model, req.qp, req.multipliers);
  return m;
}

std::pair<int, int> SyntheticBackend::qp_range() const {
  return {kSyntheticQpMin, kSyntheticQpMax};
}

std::string SyntheticBackend::multiplier_key(
    const MultiplierAssignment& k) const {
  // Synthetic models consume the raw vector positionally; the frame-type
  // grouping does not change the encode.
  std::string key = "v=";
  for (size_t i = 0; i < k.values.size(); ++i) {
    if (i) key += "|";
    key += fmt_multiplier(k.values[i]);
  }
  return key;
}

std::string SyntheticBackend::clip_digest(const EncodeRequest& req) {
  const SyntheticClipModel* model = find_model(req.clip_id);
  if (!model) {
    raise(Errc::kSourceMissing, "no synthetic model for clip '" + req.clip_id + "'");
  }
  Json j = *model;
  return json_digest(j);
}

// ---------------------------------------------------------------------------
// ExternalBackend

ExternalBackend::ExternalBackend(ExternalBackendConfig config)
    : config_(std::move(config)) {
  if (config_.encoder_template.empty() || config_.metric_template.empty()) {
    raise(Errc::kConfigError, "external backend needs encoder and metric templates");
  }
  if (config_.scratch_dir.empty()) {
    raise(Errc::kConfigError, "external backend needs a scratch directory");
  }
  ensure_dir(config_.scratch_dir);
}

const ExternalBackend::SourceInfo& ExternalBackend::source_info(
    const std::string& path) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = sources_.find(path);
    if (it != sources_.end()) return it->second;
  }
  // Scan outside the lock; duplicated work on a race is harmless.
  if (!fs::exists(path)) {
    raise(Errc::kSourceMissing, path);
  }
  SourceInfo info;
  info.digest = file_digest(path);
  Y4mReader reader(path);
  info.width = reader.header().width;
  info.height = reader.header().height;
  Y4mFrame frame;
  while (reader.read_frame(&frame)) {
  }
  info.frame_count = reader.frames_read();
  info.duration_s = reader.header().duration_seconds(info.frame_count);
  if (info.frame_count == 0 || info.duration_s <= 0.0) {
    raise(Errc::kParseFailure, path + ": no frames");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  return sources_.emplace(path, std::move(info)).first->second;
}

MeasuredPoint ExternalBackend::encode_and_measure_full(
    const EncodeRequest& req) {
  if (req.qp < config_.qp_min || req.qp > config_.qp_max) {
    raise(Errc::kOutOfRange, "qp " + std::to_string(req.qp) + " outside [" +
                                 std::to_string(config_.qp_min) + ", " +
                                 std::to_string(config_.qp_max) + "]");
  }
  for (double v : req.multipliers.values) {
    if (!(v > 0.0)) raise(Errc::kDomainError, "multiplier <= 0");
  }
  validate_profile(req.profile);
  const SourceInfo& src = source_info(req.source_path);

  EncodeRequest effective = req;
  bool proxied = req.profile.target_width > 0 &&
                 (req.profile.target_width != src.width ||
                  req.profile.target_height != src.height);
  if (proxied) {
    effective.source_path = downscale(req.source_path, req.profile,
                                      join_path(config_.scratch_dir, "proxy"));
  }
  // {width}/{height} always render the dimensions handed to the encoder.
  if (effective.profile.target_width == 0) {
    effective.profile.target_width = src.width;
    effective.profile.target_height = src.height;
  }
  std::string work = req.work_dir;
  if (work.empty()) {
    work = join_path(join_path(config_.scratch_dir, "jobs"),
                     to_hex(fnv1a64(src.digest + "|" + std::to_string(req.qp) +
                                    "|" + multiplier_key(req.multipliers) +
                                    "|" + profile_fingerprint(req.profile))));
  }
  ensure_dir(work);
  effective.work_dir = work;

  std::string out_final = join_path(work, "out.bin");
  std::string out_tmp = out_final + ".part";
  std::error_code ec;
  fs::remove(out_final, ec);
  fs::remove(out_tmp, ec);

  auto argv = render_command(config_.encoder_template, effective, out_tmp);
  launches_.fetch_add(1);
  ProcessResult enc = run_process(argv, join_path(work, "encoder.out.log"),
                                  join_path(work, "encoder.err.log"));
  if (enc.exit_code != 0) {
    fs::remove(out_tmp, ec);
    raise(Errc::kEncoderProcessFailure,
          req.clip_id + " qp " + std::to_string(req.qp) + ": encoder exited " +
              std::to_string(enc.exit_code) + ": " + enc.stderr_tail);
  }
  if (!fs::exists(out_tmp) || fs::file_size(out_tmp) == 0) {
    fs::remove(out_tmp, ec);
    raise(Errc::kEncoderProcessFailure,
          req.clip_id + " qp " + std::to_string(req.qp) +
              ": encoder produced no output");
  }
  fs::rename(out_tmp, out_final, ec);
  if (ec) raise(Errc::kIoError, "cannot finalize " + out_final);
  auto encoded_bytes = static_cast<double>(fs::file_size(out_final));

  std::string metrics_final = join_path(work, "metrics.json");
  std::string metrics_tmp = metrics_final + ".part";
  std::map<std::string, std::string> metric_values;
  metric_values["source"] = req.source_path;  // full-resolution reference
  metric_values["encoded"] = out_final;
  metric_values["output"] = metrics_tmp;
  metric_values["width"] = std::to_string(src.width);
  metric_values["height"] = std::to_string(src.height);
  auto margv = render_template(config_.metric_template, metric_values);
  launches_.fetch_add(1);
  ProcessResult met = run_process(margv, join_path(work, "metric.out.log"),
                                  join_path(work, "metric.err.log"));
  if (met.exit_code != 0) {
    fs::remove(metrics_tmp, ec);
    raise(Errc::kMetricProcessFailure,
          req.clip_id + " qp " + std::to_string(req.qp) + ": metric exited " +
              std::to_string(met.exit_code) + ": " + met.stderr_tail);
  }
  if (!fs::exists(metrics_tmp)) {
    raise(Errc::kMetricProcessFailure,
          req.clip_id + " qp " + std::to_string(req.qp) +
              ": metric tool wrote no report");
  }
  MetricReport report = parse_metric_report(read_file(metrics_tmp));
  fs::rename(metrics_tmp, metrics_final, ec);

  report.bitrate_kbps = encoded_bytes * 8.0 / src.duration_s / 1000.0;

  MeasuredPoint m;
  m.point.qp = req.qp;
  m.point.bitrate_kbps = report.bitrate_kbps;
  m.point.quality = report.msssim_pooled;
  m.point.metric = MetricId::kMsSsim;
  m.metrics = std::move(report);
  return m;
}

std::pair<int, int> ExternalBackend::qp_range() const {
  return {config_.qp_min, config_.qp_max};
}

std::string ExternalBackend::multiplier_key(
    const MultiplierAssignment& k) const {
  // Keyed on the effective per-group values, exactly as rendered on the
  // command line: assignments that produce identical flags share encodes.
  EffectiveMultipliers e = route_multipliers(k);
  return "a=" + fmt_multiplier(e.k_all) + ",kf=" + fmt_multiplier(e.k_kf) +
         ",gf=" + fmt_multiplier(e.k_gf_arf);
}

std::string ExternalBackend::clip_digest(const EncodeRequest& req) {
  return source_info(req.source_path).digest;
}

// ---------------------------------------------------------------------------
// CachedBackend

CachedBackend::CachedBackend(std::shared_ptr<EncodeBackend> inner,
                             std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
  if (!cache_dir_.empty()) ensure_dir(cache_dir_);
}

std::string CachedBackend::cache_key(const EncodeRequest& req) {
  return inner_->clip_digest(req) + "|qp" + std::to_string(req.qp) + "|" +
         inner_->multiplier_key(req.multipliers) + "|" +
         profile_fingerprint(req.profile) + "|" + inner_->version_tag();
}

MeasuredPoint CachedBackend::encode_and_measure_full(const EncodeRequest& req) {
  std::string key = cache_key(req);
  std::string file = cache_dir_.empty()
                         ? std::string()
                         : join_path(cache_dir_, to_hex(fnv1a64(key)) + ".json");

  std::shared_future<MeasuredPoint> future;
  std::promise<MeasuredPoint> promise;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto mem = memory_.find(key);
    if (mem != memory_.end()) {
      hits_.fetch_add(1);
      return mem->second;
    }
    if (!file.empty() && fs::exists(file)) {
      try {
        Json j = Json::parse(read_file(file));
        if (j.at("key").get<std::string>() == key) {
          hits_.fetch_add(1);
          MeasuredPoint m = j.at("measured").get<MeasuredPoint>();
          memory_.emplace(key, m);
          return m;
        }
      } catch (const std::exception&) {
        // Unreadable entry; fall through and recompute.
      }
    }
    auto it = in_flight_.find(key);
    if (it != in_flight_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      in_flight_.emplace(key, future);
      owner = true;
    }
  }
  if (!owner) {
    hits_.fetch_add(1);
    return future.get();  // rethrows the owner's failure, if any
  }

  misses_.fetch_add(1);
  try {
    MeasuredPoint m = inner_->encode_and_measure_full(req);
    if (!file.empty()) {
      Json j{{"key", key}, {"measured", m}};
      write_file_atomic(file, j.dump());
    }
    promise.set_value(m);
    std::lock_guard<std::mutex> lock(mutex_);
    memory_.emplace(key, m);
    in_flight_.erase(key);
    return m;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard<std::mutex> lock(mutex_);
    in_flight_.erase(key);
    throw;
  }
}

}  // namespace lforge
