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

#ifndef LFORGE_CONFIG_H_
#define LFORGE_CONFIG_H_

#include <map>
#include <string>
#include <vector>

#include "lforge/encoders.h"
#include "lforge/multiplier.h"
#include "lforge/optim.h"

namespace lforge {

struct BackendConfig {
  std::string type = "synthetic";  // "synthetic" | "external"
  std::string encoder_template;
  std::string metric_template;
  int qp_min = 0;
  int qp_max = 63;
  std::string version_tag = "external";
};

// One campaign: which clips, which modes, which profiles, how to search.
// Loaded from a JSON file; LFORGE_SCRATCH and LFORGE_JOBS environment
// variables override scratch_dir and pool_size.
struct CampaignConfig {
  BackendConfig backend;
  std::string manifest_path;
  std::map<std::string, ProxyProfile> profiles;  // by label
  std::string search_profile;  // label, used for Run-A/Run-B
  std::string final_profile;   // label, used for the closing re-evaluation
  std::vector<ModeKind> modes;
  OptimizerConfig optimizer;
  std::vector<int> qp_anchors = {27, 39, 49, 59, 63};
  Bounds k_bounds{0.2, 8.0};
  double grid_step = 0.1;
  int pool_size = 0;  // 0 = hardware concurrency
  std::string store_path;
  std::string scratch_dir;
  std::string cache_dir;
};

// Parse + validate. `overrides` are key=value pairs applied to the raw JSON
// after file parsing (dotted paths address nested keys; "mode=X" is shorthand
// for modes=[X]). Errors: ConfigError.
CampaignConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides = {});
CampaignConfig parse_config(const std::string& json_text,
                            const std::vector<std::string>& overrides = {});

// Digest over the fields that affect optimization results; part of the
// results-store resume key.
std::string config_digest(const CampaignConfig& cfg);

const ProxyProfile& profile_by_label(const CampaignConfig& cfg,
                                     const std::string& label);

}  // namespace lforge

#endif  // LFORGE_CONFIG_H_
