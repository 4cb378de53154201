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

#ifndef LFORGE_RESAMPLE_H_
#define LFORGE_RESAMPLE_H_

#include <cstdint>
#include <vector>

namespace lforge {

// Windowed-sinc kernel with `taps` lobes: sinc(x) * sinc(x / taps) for
// |x| < taps, else 0.
double lanczos_kernel(double x, int taps);

// Precomputed filter for one output coordinate of a 1-D resample.
struct ResampleTap {
  int first_sample;             // index of the first contributing source sample
  std::vector<double> weights;  // normalized to sum 1
};

// Taps for resizing a length-`src_size` axis to `dst_size`. Output centers
// map through (o + 0.5) * src/dst - 0.5; when minifying, the kernel is
// stretched by src/dst so it keeps `taps` lobes in source space
// (anti-aliasing). Edges clamp.
std::vector<ResampleTap> make_resample_taps(int src_size, int dst_size,
                                            int taps);

// Separable resize of a single plane. Samples must fit bit depth; results
// are rounded to nearest and clamped to [0, max_value].
void resample_plane(const uint16_t* src, int src_w, int src_h, uint16_t* dst,
                    int dst_w, int dst_h, int taps, int max_value);

}  // namespace lforge

#endif  // LFORGE_RESAMPLE_H_
