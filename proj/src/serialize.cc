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

#include "lforge/serialize.h"

#include "lforge/util.h"

namespace lforge {

void to_json(Json& j, const RDPoint& p) {
  j = Json{{"qp", p.qp},
           {"bitrate_kbps", p.bitrate_kbps},
           {"quality", p.quality},
           {"metric", metric_name(p.metric)}};
}

void from_json(const Json& j, RDPoint& p) {
  j.at("qp").get_to(p.qp);
  j.at("bitrate_kbps").get_to(p.bitrate_kbps);
  j.at("quality").get_to(p.quality);
  p.metric = metric_from_string(j.at("metric").get<std::string>());
}

void to_json(Json& j, const MetricReport& m) {
  j = Json{{"msssim_frames", m.msssim_frames},
           {"vmaf_frames", m.vmaf_frames},
           {"msssim_pooled", m.msssim_pooled},
           {"vmaf_pooled", m.vmaf_pooled},
           {"bitrate_kbps", m.bitrate_kbps},
           {"frame_count", m.frame_count}};
}

void from_json(const Json& j, MetricReport& m) {
  j.at("msssim_frames").get_to(m.msssim_frames);
  j.at("vmaf_frames").get_to(m.vmaf_frames);
  j.at("msssim_pooled").get_to(m.msssim_pooled);
  j.at("vmaf_pooled").get_to(m.vmaf_pooled);
  j.at("bitrate_kbps").get_to(m.bitrate_kbps);
  j.at("frame_count").get_to(m.frame_count);
}

void to_json(Json& j, const MeasuredPoint& m) {
  j = Json{{"point", m.point}};
  if (m.metrics) {
    j["metrics"] = *m.metrics;
  } else {
    j["metrics"] = nullptr;
  }
}

void from_json(const Json& j, MeasuredPoint& m) {
  j.at("point").get_to(m.point);
  if (j.contains("metrics") && !j.at("metrics").is_null()) {
    m.metrics = j.at("metrics").get<MetricReport>();
  } else {
    m.metrics.reset();
  }
}

void to_json(Json& j, const SyntheticClipModel& m) {
  j = Json{{"clip_id", m.clip_id},   {"q_max", m.q_max},
           {"alpha", m.alpha},       {"beta0", m.beta0},
           {"beta1", m.beta1},       {"k_star", m.k_star},
           {"gamma", m.gamma},       {"cross", m.cross},
           {"noise_seed", m.noise_seed}, {"noise_scale", m.noise_scale},
           {"metric", metric_name(m.metric)}};
}

void from_json(const Json& j, SyntheticClipModel& m) {
  m = SyntheticClipModel{};
  if (j.contains("clip_id")) j.at("clip_id").get_to(m.clip_id);
  if (j.contains("q_max")) j.at("q_max").get_to(m.q_max);
  if (j.contains("alpha")) j.at("alpha").get_to(m.alpha);
  if (j.contains("beta0")) j.at("beta0").get_to(m.beta0);
  if (j.contains("beta1")) j.at("beta1").get_to(m.beta1);
  j.at("k_star").get_to(m.k_star);
  j.at("gamma").get_to(m.gamma);
  if (j.contains("cross")) j.at("cross").get_to(m.cross);
  if (j.contains("noise_seed")) j.at("noise_seed").get_to(m.noise_seed);
  if (j.contains("noise_scale")) j.at("noise_scale").get_to(m.noise_scale);
  if (j.contains("metric")) {
    m.metric = metric_from_string(j.at("metric").get<std::string>());
  }
}

void to_json(Json& j, const ProxyProfile& p) {
  j = Json{{"label", p.label},
           {"width", p.target_width},
           {"height", p.target_height},
           {"preset", p.speed_preset},
           {"filter", filter_name(p.filter)}};
}

void from_json(const Json& j, ProxyProfile& p) {
  p = ProxyProfile{};
  j.at("label").get_to(p.label);
  if (j.contains("width")) j.at("width").get_to(p.target_width);
  if (j.contains("height")) j.at("height").get_to(p.target_height);
  if (j.contains("preset")) j.at("preset").get_to(p.speed_preset);
  if (j.contains("filter")) {
    std::string f = j.at("filter").get<std::string>();
    if (f != "lanczos5") {
      raise(Errc::kConfigError, "unknown downscale filter '" + f + "'");
    }
    p.filter = DownscaleFilter::kLanczos5;
  }
}

void to_json(Json& j, const Bounds& b) {
  j = Json{{"low", b.low}, {"high", b.high}};
}

void from_json(const Json& j, Bounds& b) {
  j.at("low").get_to(b.low);
  j.at("high").get_to(b.high);
}

void to_json(Json& j, const OptimizerConfig& c) {
  j = Json{{"x_tolerance", c.x_tolerance},
           {"f_tolerance", c.f_tolerance},
           {"max_iterations", c.max_iterations},
           {"max_cost_evals", c.max_cost_evals}};
}

void from_json(const Json& j, OptimizerConfig& c) {
  c = OptimizerConfig{};
  if (j.contains("x_tolerance")) j.at("x_tolerance").get_to(c.x_tolerance);
  if (j.contains("f_tolerance")) j.at("f_tolerance").get_to(c.f_tolerance);
  if (j.contains("max_iterations")) j.at("max_iterations").get_to(c.max_iterations);
  if (j.contains("max_cost_evals")) j.at("max_cost_evals").get_to(c.max_cost_evals);
}

std::string json_digest(const Json& j) {
  return to_hex(fnv1a64(j.dump()));
}

}  // namespace lforge
