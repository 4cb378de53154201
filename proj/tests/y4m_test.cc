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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lforge/error.h"
#include "lforge/resample.h"
#include "lforge/util.h"
#include "lforge/y4m.h"
#include "test_util.h"

using namespace lforge;
using testutil::TempDir;

TEST_CASE("header parsing extracts the standard tokens") {
  Y4mHeader h = parse_y4m_header("YUV4MPEG2 W3840 H2160 F60:1 C420p10");
  CHECK(h.width == 3840);
  CHECK(h.height == 2160);
  CHECK(h.fps_num == 60);
  CHECK(h.fps_den == 1);
  CHECK(h.bit_depth() == 10);
  CHECK(h.chroma_shift_x() == 1);
  CHECK(h.chroma_shift_y() == 1);
  CHECK(h.frame_bytes() == 3840u * 2160 * 3 / 2 * 2);
}

TEST_CASE("header parsing keeps unknown tokens and rejects bad input") {
  Y4mHeader h = parse_y4m_header(
      "YUV4MPEG2 W16 H8 F30000:1001 Ip A1:1 C422 XYSCSS=422");
  CHECK(h.interlace == "p");
  CHECK(h.aspect == "1:1");
  CHECK(h.colorspace == "422");
  REQUIRE(h.extra.size() == 1);
  CHECK(h.extra[0] == "XYSCSS=422");
  CHECK(format_y4m_header(h) ==
        "YUV4MPEG2 W16 H8 F30000:1001 Ip A1:1 C422 XYSCSS=422\n");

  CHECK_THROWS_WITH_AS(parse_y4m_header("JUNK W16 H8"),
                       doctest::Contains("ParseFailure"), Error);
  CHECK_THROWS_WITH_AS(parse_y4m_header("YUV4MPEG2 W16"),
                       doctest::Contains("ParseFailure"), Error);
  CHECK_THROWS_WITH_AS(parse_y4m_header("YUV4MPEG2 W16 H8 C999"),
                       doctest::Contains("UnsupportedColorspace"), Error);
}

TEST_CASE("round trip is bit exact for 8-bit and 10-bit streams") {
  TempDir tmp("y4m-roundtrip");
  std::mt19937_64 rng(3);
  for (const std::string& cs : {std::string("420"), std::string("420p10"),
                                std::string("444"), std::string("mono")}) {
    Y4mHeader h;
    h.width = 12;
    h.height = 6;
    h.fps_num = 24;
    h.fps_den = 1;
    h.interlace = "p";
    h.colorspace = cs;
    int maxv = (1 << h.bit_depth()) - 1;
    std::string path = join_path(tmp.path, "t-" + cs + ".y4m");
    {
      Y4mWriter w(path, h);
      Y4mFrame f;
      f.planes.resize(static_cast<size_t>(h.plane_count()));
      for (int n = 0; n < 3; ++n) {
        for (int p = 0; p < h.plane_count(); ++p) {
          f.planes[static_cast<size_t>(p)].resize(h.plane_samples(p));
          for (auto& s : f.planes[static_cast<size_t>(p)]) {
            s = static_cast<uint16_t>(rng() % (maxv + 1));
          }
        }
        w.write_frame(f);
      }
      w.close();
    }
    std::string original = read_file(path);

    // Re-write what the reader sees; the byte stream must be identical.
    std::string copy = path + ".copy";
    {
      Y4mReader r(path);
      Y4mWriter w(copy, r.header());
      Y4mFrame f;
      while (r.read_frame(&f)) w.write_frame(f);
      w.close();
      CHECK(r.frames_read() == 3);
    }
    CHECK(read_file(copy) == original);
  }
}

TEST_CASE("truncated frames name the frame index") {
  TempDir tmp("y4m-trunc");
  std::string path = join_path(tmp.path, "trunc.y4m");
  testutil::write_gradient_clip(path, 16, 8, 3);
  std::string data = read_file(path);
  write_file(path, data.substr(0, data.size() - 10));
  Y4mReader r(path);
  Y4mFrame f;
  CHECK(r.read_frame(&f));
  CHECK(r.read_frame(&f));
  CHECK_THROWS_WITH_AS(r.read_frame(&f), doctest::Contains("frame 2"), Error);
}

TEST_CASE("missing files raise SourceMissing") {
  CHECK_THROWS_WITH_AS(Y4mReader("/nonexistent/clip.y4m"),
                       doctest::Contains("SourceMissing"), Error);
}

TEST_CASE("minimal two-frame clip scans correctly") {
  TempDir tmp("y4m-min");
  std::string path = join_path(tmp.path, "mini.y4m");
  testutil::write_gradient_clip(path, 8, 4, 2);
  Y4mReader r(path);
  CHECK(r.header().bit_depth() == 8);
  CHECK(count_y4m_frames(path) == 2);
}

TEST_CASE("lanczos kernel has unit center and zero crossings at integers") {
  CHECK(lanczos_kernel(0.0, 5) == doctest::Approx(1.0));
  for (int i = 1; i < 5; ++i) {
    CHECK(lanczos_kernel(static_cast<double>(i), 5) ==
          doctest::Approx(0.0).scale(1).epsilon(1e-12));
  }
  CHECK(lanczos_kernel(5.0, 5) == 0.0);
  CHECK(lanczos_kernel(-5.1, 5) == 0.0);
}

TEST_CASE("resample preserves constant planes to within one code") {
  std::vector<uint16_t> src(64 * 48, 123);
  std::vector<uint16_t> dst(32 * 24, 0);
  resample_plane(src.data(), 64, 48, dst.data(), 32, 24, 5, 255);
  for (uint16_t v : dst) {
    CHECK(std::abs(static_cast<int>(v) - 123) <= 1);
  }
}

TEST_CASE("impulse response matches hand-evaluated lanczos weights") {
  // 2:1 downscale. Output pixel o covers center (2o + 0.5); with the kernel
  // stretched by 2, the weight of source sample i for output o is
  // L((i - center) / 2) / sum, L = 5-lobe lanczos. An impulse at source
  // index s therefore reproduces column weights exactly.
  const int src_n = 64, dst_n = 32, taps = 5;
  const int s = 31;
  std::vector<uint16_t> src(static_cast<size_t>(src_n), 0);
  src[s] = 16000;
  std::vector<uint16_t> dst(static_cast<size_t>(dst_n), 0);
  // 1-D check via a 1-row plane.
  resample_plane(src.data(), src_n, 1, dst.data(), dst_n, 1, taps, 65535);
  auto lanczos = [&](double x) {
    if (std::abs(x) >= taps) return 0.0;
    if (std::abs(x) < 1e-12) return 1.0;
    double px = M_PI * x;
    return taps * std::sin(px) * std::sin(px / taps) / (px * px);
  };
  for (int o = 0; o < dst_n; ++o) {
    double center = (o + 0.5) * 2.0 - 0.5;
    double lo = std::ceil(center - 10.0), hi = std::floor(center + 10.0);
    double sum = 0.0, w_s = 0.0;
    for (int i = static_cast<int>(lo); i <= static_cast<int>(hi); ++i) {
      double w = lanczos((i - center) * 0.5);
      sum += w;
      int clamped = std::clamp(i, 0, src_n - 1);
      if (clamped == s) w_s += w;
    }
    double expected = 16000.0 * w_s / sum;
    CHECK(std::abs(dst[static_cast<size_t>(o)] -
                   std::clamp(expected, 0.0, 65535.0)) <= 1.0);
  }
}
