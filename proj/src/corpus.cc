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

#include "lforge/corpus.h"

#include <cmath>

#include "lforge/serialize.h"
#include "lforge/util.h"
#include "lforge/y4m.h"

namespace lforge {

const char* dynamic_range_name(DynamicRange dr) {
  return dr == DynamicRange::kHdr ? "HDR" : "SDR";
}

DynamicRange dynamic_range_from_string(const std::string& name) {
  if (name == "HDR") return DynamicRange::kHdr;
  if (name == "SDR") return DynamicRange::kSdr;
  raise(Errc::kConfigError, "dynamic range must be SDR or HDR, got '" + name + "'");
}

ClipRecord scan_clip(const std::string& path) {
  Y4mReader reader(path);
  const Y4mHeader& h = reader.header();
  ClipRecord rec;
  rec.path = path;
  rec.width = h.width;
  rec.height = h.height;
  rec.frame_rate = {h.fps_num, h.fps_den};
  rec.bit_depth = h.bit_depth();
  Y4mFrame frame;
  while (reader.read_frame(&frame)) {
  }
  rec.frame_count = reader.frames_read();
  return rec;
}

namespace {

// Population standard deviation.
double stddev(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

// Sobel gradient magnitudes over the interior (border excluded so every
// 3x3 window is fully inside the frame).
std::vector<double> sobel_magnitudes(const std::vector<double>& luma, int w,
                                     int h) {
  std::vector<double> mags;
  if (w < 3 || h < 3) return mags;
  mags.reserve(static_cast<size_t>(w - 2) * static_cast<size_t>(h - 2));
  auto at = [&](int y, int x) { return luma[static_cast<size_t>(y) * w + x]; };
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      double gx = (at(y - 1, x + 1) + 2.0 * at(y, x + 1) + at(y + 1, x + 1)) -
                  (at(y - 1, x - 1) + 2.0 * at(y, x - 1) + at(y + 1, x - 1));
      double gy = (at(y + 1, x - 1) + 2.0 * at(y + 1, x) + at(y + 1, x + 1)) -
                  (at(y - 1, x - 1) + 2.0 * at(y - 1, x) + at(y - 1, x + 1));
      mags.push_back(std::sqrt(gx * gx + gy * gy));
    }
  }
  return mags;
}

}  // namespace

SiTiSeries si_ti_series(const std::string& path) {
  Y4mReader reader(path);
  const Y4mHeader& h = reader.header();
  int w = h.width, hh = h.height;
  double scale = 255.0 / ((1 << h.bit_depth()) - 1);

  SiTiSeries series;
  std::vector<double> prev, cur;
  Y4mFrame frame;
  while (reader.read_frame(&frame)) {
    const auto& plane = frame.planes[0];
    cur.resize(plane.size());
    for (size_t i = 0; i < plane.size(); ++i) cur[i] = plane[i] * scale;

    series.si_frames.push_back(stddev(sobel_magnitudes(cur, w, hh)));
    if (!prev.empty()) {
      std::vector<double> diff(cur.size());
      for (size_t i = 0; i < cur.size(); ++i) diff[i] = cur[i] - prev[i];
      series.ti_frames.push_back(stddev(diff));
    }
    std::swap(prev, cur);
  }
  if (reader.frames_read() < 2) {
    raise(Errc::kTooFewFrames, path + ": temporal information needs >= 2 frames");
  }
  return series;
}

std::pair<double, double> compute_si_ti(const std::string& path) {
  SiTiSeries series = si_ti_series(path);
  double si = 0.0, ti = 0.0;
  for (double v : series.si_frames) si = std::max(si, v);
  for (double v : series.ti_frames) ti = std::max(ti, v);
  return {si, ti};
}

std::vector<ManifestEntry> parse_manifest(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    raise(Errc::kConfigError, std::string("manifest: ") + e.what());
  }
  std::vector<ManifestEntry> entries;
  try {
    for (const Json& c : j.at("clips")) {
      ManifestEntry e;
      c.at("clip_id").get_to(e.clip_id);
      if (c.contains("model")) {
        SyntheticClipModel model = c.at("model").get<SyntheticClipModel>();
        if (model.clip_id.empty()) model.clip_id = e.clip_id;
        validate_model(model);
        e.model = std::move(model);
      } else {
        c.at("path").get_to(e.path);
      }
      if (c.contains("shot_group")) c.at("shot_group").get_to(e.shot_group);
      if (c.contains("dynamic_range")) {
        e.dynamic_range = dynamic_range_from_string(
            c.at("dynamic_range").get<std::string>());
      }
      entries.push_back(std::move(e));
    }
  } catch (const Json::exception& e) {
    raise(Errc::kConfigError, std::string("manifest: ") + e.what());
  }
  if (entries.empty()) {
    raise(Errc::kEmptyManifest, "manifest lists no clips");
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  return parse_manifest(read_file(path));
}

}  // namespace lforge
