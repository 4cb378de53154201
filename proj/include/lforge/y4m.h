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

#ifndef LFORGE_Y4M_H_
#define LFORGE_Y4M_H_

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace lforge {

// Parsed YUV4MPEG2 stream header. Unrecognized tokens are preserved verbatim
// so that read + write round-trips bit-exactly.
struct Y4mHeader {
  int width = 0;
  int height = 0;
  int fps_num = 30;
  int fps_den = 1;
  std::string interlace;  // token after 'I', e.g. "p"; empty if absent
  std::string aspect;     // token after 'A'; empty if absent
  std::string colorspace = "420";  // token after 'C'; "420" when absent
  std::vector<std::string> extra;  // X... and any other tokens, in order

  int bit_depth() const;       // 8, 10 or 12
  int plane_count() const;     // 1 for mono, 3 otherwise
  int chroma_shift_x() const;  // log2 horizontal subsampling
  int chroma_shift_y() const;
  int plane_width(int plane) const;
  int plane_height(int plane) const;
  size_t plane_samples(int plane) const;
  size_t frame_bytes() const;
  double duration_seconds(long frame_count) const;
};

// Header line for a stream; errors: ParseFailure, UnsupportedColorspace.
Y4mHeader parse_y4m_header(const std::string& line);
std::string format_y4m_header(const Y4mHeader& header);

// One planar frame; samples widened to uint16 regardless of bit depth.
struct Y4mFrame {
  std::string params;  // text following the FRAME magic, usually empty
  std::vector<std::vector<uint16_t>> planes;
};

class Y4mReader {
 public:
  // Errors: SourceMissing, ParseFailure, UnsupportedColorspace.
  explicit Y4mReader(const std::string& path);

  const Y4mHeader& header() const { return header_; }
  // False at clean end of stream; ParseFailure names the frame index when a
  // frame is truncated.
  bool read_frame(Y4mFrame* frame);
  long frames_read() const { return frames_read_; }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
  };
  std::string path_;
  std::unique_ptr<std::FILE, FileCloser> file_;
  Y4mHeader header_;
  long frames_read_ = 0;
};

class Y4mWriter {
 public:
  // Errors: IoError.
  Y4mWriter(const std::string& path, const Y4mHeader& header);
  void write_frame(const Y4mFrame& frame);
  void close();

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
  };
  std::string path_;
  std::unique_ptr<std::FILE, FileCloser> file_;
  Y4mHeader header_;
};

// Streams the file once; errors as Y4mReader.
long count_y4m_frames(const std::string& path);

}  // namespace lforge

#endif  // LFORGE_Y4M_H_
