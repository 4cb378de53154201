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

#include "lforge/multiplier.h"

#include "lforge/util.h"

namespace lforge {

int mode_dimension(ModeKind kind) {
  switch (kind) {
    case ModeKind::kAllFrames:
    case ModeKind::kKeyframes:
    case ModeKind::kGoldenAltref:
    case ModeKind::kKeyGoldenAltref:
      return 1;
    case ModeKind::kPowellKfGfArf:
    case ModeKind::kGrid2d:
      return 2;
  }
  return 1;
}

const char* mode_name(ModeKind kind) {
  switch (kind) {
    case ModeKind::kAllFrames: return "ALL_FRAMES";
    case ModeKind::kKeyframes: return "KF";
    case ModeKind::kGoldenAltref: return "GF_ARF";
    case ModeKind::kKeyGoldenAltref: return "KF_GF_ARF";
    case ModeKind::kPowellKfGfArf: return "POWELL_KF_X_GFARF";
    case ModeKind::kGrid2d: return "GRID_2D";
  }
  return "ALL_FRAMES";
}

ModeKind mode_from_string(const std::string& name) {
  if (name == "ALL_FRAMES") return ModeKind::kAllFrames;
  if (name == "KF") return ModeKind::kKeyframes;
  if (name == "GF_ARF") return ModeKind::kGoldenAltref;
  if (name == "KF_GF_ARF") return ModeKind::kKeyGoldenAltref;
  if (name == "POWELL_KF_X_GFARF") return ModeKind::kPowellKfGfArf;
  if (name == "GRID_2D") return ModeKind::kGrid2d;
  raise(Errc::kConfigError, "unknown optimization mode '" + name + "'");
}

MultiplierAssignment make_assignment(ModeKind mode,
                                     std::vector<double> values) {
  int dim = mode_dimension(mode);
  if (static_cast<int>(values.size()) != dim) {
    raise(Errc::kDimensionMismatch,
          std::string(mode_name(mode)) + " expects " + std::to_string(dim) +
              " multipliers, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!(v > 0.0)) {
      raise(Errc::kDomainError,
            "multipliers must be positive, got " + fmt_double(v));
    }
  }
  return MultiplierAssignment{mode, std::move(values)};
}

MultiplierAssignment identity_assignment(ModeKind mode) {
  return MultiplierAssignment{
      mode, std::vector<double>(static_cast<size_t>(mode_dimension(mode)), 1.0)};
}

EffectiveMultipliers route_multipliers(const MultiplierAssignment& k) {
  EffectiveMultipliers e;
  switch (k.mode) {
    case ModeKind::kAllFrames:
      e.k_all = k.values.at(0);
      break;
    case ModeKind::kKeyframes:
      e.k_kf = k.values.at(0);
      break;
    case ModeKind::kGoldenAltref:
      e.k_gf_arf = k.values.at(0);
      break;
    case ModeKind::kKeyGoldenAltref:
      // One scalar covers all three keyframe types.
      e.k_kf = k.values.at(0);
      e.k_gf_arf = k.values.at(0);
      break;
    case ModeKind::kPowellKfGfArf:
    case ModeKind::kGrid2d:
      e.k_kf = k.values.at(0);
      e.k_gf_arf = k.values.at(1);
      break;
  }
  return e;
}

const char* optimizer_name(OptimizerChoice c) {
  switch (c) {
    case OptimizerChoice::kBrent: return "brent";
    case OptimizerChoice::kGolden: return "golden";
    case OptimizerChoice::kPowell: return "powell";
    case OptimizerChoice::kGrid: return "grid";
  }
  return "brent";
}

OptimizerChoice optimizer_from_string(const std::string& name) {
  if (name == "brent") return OptimizerChoice::kBrent;
  if (name == "golden") return OptimizerChoice::kGolden;
  if (name == "powell") return OptimizerChoice::kPowell;
  if (name == "grid") return OptimizerChoice::kGrid;
  raise(Errc::kConfigError, "unknown optimizer '" + name + "'");
}

OptimizationMode default_mode(ModeKind kind, Bounds per_axis) {
  OptimizationMode m;
  m.kind = kind;
  m.axis_bounds.assign(static_cast<size_t>(mode_dimension(kind)), per_axis);
  switch (kind) {
    case ModeKind::kPowellKfGfArf:
      m.optimizer = OptimizerChoice::kPowell;
      break;
    case ModeKind::kGrid2d:
      m.optimizer = OptimizerChoice::kGrid;
      break;
    default:
      m.optimizer = OptimizerChoice::kBrent;
      break;
  }
  return m;
}

}  // namespace lforge
