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

#ifndef LFORGE_MULTIPLIER_H_
#define LFORGE_MULTIPLIER_H_

#include <string>
#include <vector>

#include "lforge/optim.h"

namespace lforge {

// Which frame-type groups receive a tuned rate-control multiplier, and with
// what search dimensionality.
enum class ModeKind {
  kAllFrames,        // one k applied to every frame
  kKeyframes,        // one k for intra keyframes
  kGoldenAltref,     // one k shared by golden and alt-ref frames
  kKeyGoldenAltref,  // one k shared by all three keyframe types
  kPowellKfGfArf,    // two k values: (keyframes, golden/alt-ref), joint search
  kGrid2d,           // same two axes, exhaustive lattice scan
};

int mode_dimension(ModeKind kind);
const char* mode_name(ModeKind kind);          // e.g. "ALL_FRAMES"
ModeKind mode_from_string(const std::string&);  // inverse of mode_name

// The multiplier vector routed to frame-type groups.
struct MultiplierAssignment {
  ModeKind mode = ModeKind::kAllFrames;
  std::vector<double> values;  // length == mode_dimension(mode), all > 0
};

// Validates length and positivity. Errors: DimensionMismatch, DomainError.
MultiplierAssignment make_assignment(ModeKind mode, std::vector<double> values);
MultiplierAssignment identity_assignment(ModeKind mode);

// Per-group multipliers after routing; groups a mode does not tune stay 1.0.
struct EffectiveMultipliers {
  double k_all = 1.0;
  double k_kf = 1.0;
  double k_gf_arf = 1.0;
};

EffectiveMultipliers route_multipliers(const MultiplierAssignment& k);

enum class OptimizerChoice { kBrent, kGolden, kPowell, kGrid };

const char* optimizer_name(OptimizerChoice c);
OptimizerChoice optimizer_from_string(const std::string&);

// A fully-specified search mode: grouping, per-axis box, optimizer.
struct OptimizationMode {
  ModeKind kind = ModeKind::kAllFrames;
  std::vector<Bounds> axis_bounds;
  OptimizerChoice optimizer = OptimizerChoice::kBrent;
  double grid_step = 0.1;  // only used by kGrid
};

// Bounds default to [0.2, 8.0] per axis; optimizer defaults by kind.
OptimizationMode default_mode(ModeKind kind,
                              Bounds per_axis = Bounds{0.2, 8.0});

}  // namespace lforge

#endif  // LFORGE_MULTIPLIER_H_
