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

#include "lforge/config.h"

#include <cstdlib>
#include <thread>

#include "lforge/serialize.h"
#include "lforge/util.h"

namespace lforge {

namespace {

// Applies "a.b.c=value" onto the raw JSON tree. Values that parse as JSON
// (numbers, booleans, arrays) are taken as such, anything else as a string.
void apply_override(Json& root, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    raise(Errc::kConfigError, "override must be key=value: '" + assignment + "'");
  }
  std::string key = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);
  if (key == "mode") {  // shorthand: a single-mode campaign
    root["modes"] = Json::array({raw});
    return;
  }
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::exception&) {
    value = raw;
  }
  Json* node = &root;
  std::vector<std::string> parts = split(key, '.');
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

}  // namespace

CampaignConfig parse_config(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    raise(Errc::kConfigError, std::string("config: ") + e.what());
  }
  for (const std::string& o : overrides) apply_override(j, o);

  CampaignConfig cfg;
  try {
    if (j.contains("backend")) {
      const Json& b = j.at("backend");
      if (b.contains("type")) b.at("type").get_to(cfg.backend.type);
      if (b.contains("encoder_template"))
        b.at("encoder_template").get_to(cfg.backend.encoder_template);
      if (b.contains("metric_template"))
        b.at("metric_template").get_to(cfg.backend.metric_template);
      if (b.contains("qp_min")) b.at("qp_min").get_to(cfg.backend.qp_min);
      if (b.contains("qp_max")) b.at("qp_max").get_to(cfg.backend.qp_max);
      if (b.contains("version_tag"))
        b.at("version_tag").get_to(cfg.backend.version_tag);
    }
    if (j.contains("manifest")) j.at("manifest").get_to(cfg.manifest_path);
    if (j.contains("profiles")) {
      for (const Json& p : j.at("profiles")) {
        ProxyProfile profile = p.get<ProxyProfile>();
        validate_profile(profile);
        cfg.profiles[profile.label] = profile;
      }
    }
    if (j.contains("search_profile"))
      j.at("search_profile").get_to(cfg.search_profile);
    if (j.contains("final_profile"))
      j.at("final_profile").get_to(cfg.final_profile);
    if (j.contains("modes")) {
      for (const Json& m : j.at("modes")) {
        cfg.modes.push_back(mode_from_string(m.get<std::string>()));
      }
    }
    if (j.contains("optimizer")) j.at("optimizer").get_to(cfg.optimizer);
    if (j.contains("qp_anchors")) j.at("qp_anchors").get_to(cfg.qp_anchors);
    if (j.contains("k_bounds")) j.at("k_bounds").get_to(cfg.k_bounds);
    if (j.contains("grid_step")) j.at("grid_step").get_to(cfg.grid_step);
    if (j.contains("pool_size")) j.at("pool_size").get_to(cfg.pool_size);
    if (j.contains("store")) j.at("store").get_to(cfg.store_path);
    if (j.contains("scratch_dir")) j.at("scratch_dir").get_to(cfg.scratch_dir);
    if (j.contains("cache_dir")) j.at("cache_dir").get_to(cfg.cache_dir);
  } catch (const Json::exception& e) {
    raise(Errc::kConfigError, std::string("config: ") + e.what());
  }

  if (const char* env = std::getenv("LFORGE_SCRATCH")) {
    if (*env) cfg.scratch_dir = env;
  }
  if (const char* env = std::getenv("LFORGE_JOBS")) {
    if (*env) cfg.pool_size = std::atoi(env);
  }

  if (cfg.backend.type != "synthetic" && cfg.backend.type != "external") {
    raise(Errc::kConfigError, "backend.type must be synthetic or external");
  }
  if (cfg.qp_anchors.empty()) {
    raise(Errc::kConfigError, "qp_anchors must not be empty");
  }
  validate_bounds(cfg.k_bounds);
  validate_optimizer_config(cfg.optimizer);
  if (cfg.pool_size <= 0) {
    cfg.pool_size = static_cast<int>(std::thread::hardware_concurrency());
    if (cfg.pool_size <= 0) cfg.pool_size = 4;
  }
  if (cfg.scratch_dir.empty()) cfg.scratch_dir = "lforge-scratch";
  if (cfg.cache_dir.empty())
    cfg.cache_dir = join_path(cfg.scratch_dir, "cache");
  if (cfg.store_path.empty())
    cfg.store_path = join_path(cfg.scratch_dir, "records.jsonl");
  return cfg;
}

CampaignConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides) {
  return parse_config(read_file(path), overrides);
}

std::string config_digest(const CampaignConfig& cfg) {
  Json j{{"optimizer", cfg.optimizer},
         {"qp_anchors", cfg.qp_anchors},
         {"k_bounds", cfg.k_bounds},
         {"grid_step", cfg.grid_step},
         {"backend_version", cfg.backend.version_tag},
         {"backend_type", cfg.backend.type}};
  return json_digest(j);
}

const ProxyProfile& profile_by_label(const CampaignConfig& cfg,
                                     const std::string& label) {
  auto it = cfg.profiles.find(label);
  if (it == cfg.profiles.end()) {
    raise(Errc::kConfigError, "profile '" + label + "' not defined");
  }
  return it->second;
}

}  // namespace lforge
