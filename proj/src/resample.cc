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

#include "lforge/resample.h"

#include <algorithm>
#include <cmath>

#include "lforge/error.h"

namespace lforge {

double lanczos_kernel(double x, int taps) {
  double ax = std::abs(x);
  if (ax >= taps) return 0.0;
  if (ax < 1e-12) return 1.0;
  double px = M_PI * x;
  return taps * std::sin(px) * std::sin(px / taps) / (px * px);
}

std::vector<ResampleTap> make_resample_taps(int src_size, int dst_size,
                                            int taps) {
  if (src_size < 1 || dst_size < 1 || taps < 1) {
    raise(Errc::kDomainError, "invalid resample geometry");
  }
  double scale = static_cast<double>(dst_size) / src_size;
  double filter_scale = std::min(1.0, scale);  // widen kernel when minifying
  double support = taps / filter_scale;
  std::vector<ResampleTap> out(static_cast<size_t>(dst_size));
  for (int o = 0; o < dst_size; ++o) {
    double center = (o + 0.5) / scale - 0.5;
    int lo = static_cast<int>(std::ceil(center - support));
    int hi = static_cast<int>(std::floor(center + support));
    ResampleTap tap;
    tap.first_sample = lo;
    tap.weights.resize(static_cast<size_t>(hi - lo + 1));
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      double w = lanczos_kernel((i - center) * filter_scale, taps);
      tap.weights[static_cast<size_t>(i - lo)] = w;
      sum += w;
    }
    if (sum != 0.0) {
      for (double& w : tap.weights) w /= sum;
    }
    out[static_cast<size_t>(o)] = std::move(tap);
  }
  return out;
}

namespace {

inline int clamp_index(int i, int size) {
  return std::clamp(i, 0, size - 1);
}

}  // namespace

void resample_plane(const uint16_t* src, int src_w, int src_h, uint16_t* dst,
                    int dst_w, int dst_h, int taps, int max_value) {
  auto htaps = make_resample_taps(src_w, dst_w, taps);
  auto vtaps = make_resample_taps(src_h, dst_h, taps);

  // Horizontal pass into an intermediate (dst_w x src_h) float plane.
  std::vector<double> mid(static_cast<size_t>(dst_w) * src_h);
  for (int y = 0; y < src_h; ++y) {
    const uint16_t* row = src + static_cast<size_t>(y) * src_w;
    double* mrow = mid.data() + static_cast<size_t>(y) * dst_w;
    for (int x = 0; x < dst_w; ++x) {
      const ResampleTap& t = htaps[static_cast<size_t>(x)];
      double acc = 0.0;
      for (size_t j = 0; j < t.weights.size(); ++j) {
        int si = clamp_index(t.first_sample + static_cast<int>(j), src_w);
        acc += t.weights[j] * row[si];
      }
      mrow[x] = acc;
    }
  }

  for (int y = 0; y < dst_h; ++y) {
    const ResampleTap& t = vtaps[static_cast<size_t>(y)];
    uint16_t* drow = dst + static_cast<size_t>(y) * dst_w;
    for (int x = 0; x < dst_w; ++x) {
      double acc = 0.0;
      for (size_t j = 0; j < t.weights.size(); ++j) {
        int si = clamp_index(t.first_sample + static_cast<int>(j), src_h);
        acc += t.weights[j] * mid[static_cast<size_t>(si) * dst_w + x];
      }
      long v = std::lround(acc);
      drow[x] = static_cast<uint16_t>(std::clamp<long>(v, 0, max_value));
    }
  }
}

}  // namespace lforge
