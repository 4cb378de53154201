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

#ifndef LFORGE_CORPUS_H_
#define LFORGE_CORPUS_H_

#include <optional>
#include <string>
#include <vector>

#include "lforge/rdmodel.h"

namespace lforge {

enum class DynamicRange { kSdr, kHdr };

const char* dynamic_range_name(DynamicRange dr);
DynamicRange dynamic_range_from_string(const std::string&);

struct Rational {
  long num = 0;
  long den = 1;
};

struct ClipRecord {
  std::string clip_id;
  std::string path;
  int width = 0;
  int height = 0;
  long frame_count = 0;
  Rational frame_rate;
  int bit_depth = 8;
  std::string shot_group;
  DynamicRange dynamic_range = DynamicRange::kSdr;
  std::optional<double> si;
  std::optional<double> ti;
};

// Header fields plus a streamed frame count; si/ti left unset.
// Errors: SourceMissing, ParseFailure (naming the frame index on truncation).
ClipRecord scan_clip(const std::string& path);

// Per-frame complexity series:
//   SI frame n: stddev over space of the Sobel gradient magnitude of luma,
//               excluding the 1-pixel border.
//   TI frame n: stddev over space of luma(n) - luma(n-1), all pixels.
// Luma is rescaled to the 8-bit range so clips of different bit depths are
// comparable. Standard deviations are population (divide by N).
struct SiTiSeries {
  std::vector<double> si_frames;
  std::vector<double> ti_frames;  // one fewer entry than frames
};

// Errors: TooFewFrames (< 2), ParseFailure.
SiTiSeries si_ti_series(const std::string& path);

// Max over time of the per-frame series, the scalar descriptors.
std::pair<double, double> compute_si_ti(const std::string& path);

// Corpus manifest entry: either a real Y4M clip (path) or a synthetic model.
struct ManifestEntry {
  std::string clip_id;
  std::string path;  // empty for synthetic entries
  std::optional<SyntheticClipModel> model;
  std::string shot_group;
  DynamicRange dynamic_range = DynamicRange::kSdr;

  bool is_synthetic() const { return model.has_value(); }
};

// JSON manifest:
//   {"clips": [{"clip_id": ..., "path": ...| "model": {...},
//               "shot_group": ..., "dynamic_range": "SDR"|"HDR"}]}
// Errors: ConfigError, EmptyManifest.
std::vector<ManifestEntry> load_manifest(const std::string& path);
std::vector<ManifestEntry> parse_manifest(const std::string& json_text);

}  // namespace lforge

#endif  // LFORGE_CORPUS_H_
