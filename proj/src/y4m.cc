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

#include "lforge/y4m.h"

#include <cstring>
#include <filesystem>

#include "lforge/error.h"
#include "lforge/util.h"

namespace lforge {

namespace {

constexpr const char* kStreamMagic = "YUV4MPEG2";
constexpr const char* kFrameMagic = "FRAME";

struct ColorspaceInfo {
  const char* token;
  int bit_depth;
  int planes;
  int shift_x;
  int shift_y;
};

constexpr ColorspaceInfo kColorspaces[] = {
    {"420", 8, 3, 1, 1},       {"420jpeg", 8, 3, 1, 1},
    {"420mpeg2", 8, 3, 1, 1},  {"420paldv", 8, 3, 1, 1},
    {"420p10", 10, 3, 1, 1},   {"420p12", 12, 3, 1, 1},
    {"422", 8, 3, 1, 0},       {"422p10", 10, 3, 1, 0},
    {"422p12", 12, 3, 1, 0},   {"444", 8, 3, 0, 0},
    {"444p10", 10, 3, 0, 0},   {"444p12", 12, 3, 0, 0},
    {"mono", 8, 1, 0, 0},
};

const ColorspaceInfo& colorspace_info(const std::string& token) {
  for (const ColorspaceInfo& c : kColorspaces) {
    if (token == c.token) return c;
  }
  throw Error(Errc::kUnsupportedColorspace, "colorspace C" + token);
}

// Reads bytes up to and including '\n'; empty string at EOF.
std::string read_line(std::FILE* f) {
  std::string line;
  int c;
  while ((c = std::fgetc(f)) != EOF) {
    if (c == '\n') return line;
    line.push_back(static_cast<char>(c));
    if (line.size() > 4096) {
      throw Error(Errc::kParseFailure, "header line longer than 4 KiB");
    }
  }
  return line;
}

long parse_long(const std::string& text, const char* what) {
  try {
    size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::kParseFailure,
                std::string("bad ") + what + " '" + text + "'");
  }
}

}  // namespace

int Y4mHeader::bit_depth() const { return colorspace_info(colorspace).bit_depth; }
int Y4mHeader::plane_count() const { return colorspace_info(colorspace).planes; }
int Y4mHeader::chroma_shift_x() const { return colorspace_info(colorspace).shift_x; }
int Y4mHeader::chroma_shift_y() const { return colorspace_info(colorspace).shift_y; }

int Y4mHeader::plane_width(int plane) const {
  if (plane == 0) return width;
  int s = chroma_shift_x();
  return (width + (1 << s) - 1) >> s;
}

int Y4mHeader::plane_height(int plane) const {
  if (plane == 0) return height;
  int s = chroma_shift_y();
  return (height + (1 << s) - 1) >> s;
}

size_t Y4mHeader::plane_samples(int plane) const {
  return static_cast<size_t>(plane_width(plane)) *
         static_cast<size_t>(plane_height(plane));
}

size_t Y4mHeader::frame_bytes() const {
  size_t samples = 0;
  for (int p = 0; p < plane_count(); ++p) samples += plane_samples(p);
  return samples * (bit_depth() > 8 ? 2 : 1);
}

double Y4mHeader::duration_seconds(long frame_count) const {
  if (fps_num <= 0 || fps_den <= 0) {
    throw Error(Errc::kParseFailure, "invalid frame rate");
  }
  return static_cast<double>(frame_count) * fps_den / fps_num;
}

Y4mHeader parse_y4m_header(const std::string& line) {
  std::vector<std::string> tokens = split(line, ' ');
  if (tokens.empty() || tokens[0] != kStreamMagic) {
    throw Error(Errc::kParseFailure, "missing YUV4MPEG2 magic");
  }
  Y4mHeader h;
  h.colorspace = "420";
  bool have_w = false, have_h = false;
  for (size_t i = 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.empty()) continue;
    std::string rest = t.substr(1);
    switch (t[0]) {
      case 'W':
        h.width = static_cast<int>(parse_long(rest, "width"));
        have_w = true;
        break;
      case 'H':
        h.height = static_cast<int>(parse_long(rest, "height"));
        have_h = true;
        break;
      case 'F': {
        auto parts = split(rest, ':');
        if (parts.size() != 2) {
          throw Error(Errc::kParseFailure, "bad frame rate '" + rest + "'");
        }
        h.fps_num = static_cast<int>(parse_long(parts[0], "fps numerator"));
        h.fps_den = static_cast<int>(parse_long(parts[1], "fps denominator"));
        break;
      }
      case 'I':
        h.interlace = rest;
        break;
      case 'A':
        h.aspect = rest;
        break;
      case 'C':
        h.colorspace = rest;
        colorspace_info(h.colorspace);  // reject unknown tokens early
        break;
      default:
        h.extra.push_back(t);
        break;
    }
  }
  if (!have_w || !have_h || h.width <= 0 || h.height <= 0) {
    throw Error(Errc::kParseFailure, "missing or invalid W/H tokens");
  }
  return h;
}

std::string format_y4m_header(const Y4mHeader& header) {
  std::string line = kStreamMagic;
  line += " W" + std::to_string(header.width);
  line += " H" + std::to_string(header.height);
  line += " F" + std::to_string(header.fps_num) + ":" +
          std::to_string(header.fps_den);
  if (!header.interlace.empty()) line += " I" + header.interlace;
  if (!header.aspect.empty()) line += " A" + header.aspect;
  line += " C" + header.colorspace;
  for (const std::string& t : header.extra) line += " " + t;
  line += "\n";
  return line;
}

Y4mReader::Y4mReader(const std::string& path) : path_(path) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::kSourceMissing, path);
  }
  file_.reset(std::fopen(path.c_str(), "rb"));
  if (!file_) throw Error(Errc::kIoError, "cannot open " + path);
  header_ = parse_y4m_header(read_line(file_.get()));
}

bool Y4mReader::read_frame(Y4mFrame* frame) {
  std::FILE* f = file_.get();
  int first = std::fgetc(f);
  if (first == EOF) return false;
  std::ungetc(first, f);
  std::string line = read_line(f);
  if (line.compare(0, std::strlen(kFrameMagic), kFrameMagic) != 0) {
    throw Error(Errc::kParseFailure,
                path_ + ": frame " + std::to_string(frames_read_) +
                    ": missing FRAME marker");
  }
  frame->params = line.substr(std::strlen(kFrameMagic));
  int planes = header_.plane_count();
  frame->planes.resize(planes);
  bool wide = header_.bit_depth() > 8;
  std::vector<uint8_t> raw;
  for (int p = 0; p < planes; ++p) {
    size_t samples = header_.plane_samples(p);
    size_t bytes = samples * (wide ? 2 : 1);
    raw.resize(bytes);
    size_t got = std::fread(raw.data(), 1, bytes, f);
    if (got != bytes) {
      throw Error(Errc::kParseFailure,
                  path_ + ": frame " + std::to_string(frames_read_) +
                      ": truncated (plane " + std::to_string(p) + ")");
    }
    auto& plane = frame->planes[p];
    plane.resize(samples);
    if (wide) {
      for (size_t i = 0; i < samples; ++i) {
        plane[i] = static_cast<uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
      }
    } else {
      for (size_t i = 0; i < samples; ++i) plane[i] = raw[i];
    }
  }
  ++frames_read_;
  return true;
}

Y4mWriter::Y4mWriter(const std::string& path, const Y4mHeader& header)
    : path_(path), header_(header) {
  file_.reset(std::fopen(path.c_str(), "wb"));
  if (!file_) throw Error(Errc::kIoError, "cannot open " + path + " for write");
  std::string line = format_y4m_header(header_);
  if (std::fwrite(line.data(), 1, line.size(), file_.get()) != line.size()) {
    throw Error(Errc::kIoError, "short write to " + path_);
  }
}

void Y4mWriter::write_frame(const Y4mFrame& frame) {
  if (!file_) throw Error(Errc::kIoError, "writer already closed");
  std::FILE* f = file_.get();
  std::string line = kFrameMagic + frame.params + "\n";
  if (std::fwrite(line.data(), 1, line.size(), f) != line.size()) {
    throw Error(Errc::kIoError, "short write to " + path_);
  }
  bool wide = header_.bit_depth() > 8;
  std::vector<uint8_t> raw;
  for (int p = 0; p < header_.plane_count(); ++p) {
    size_t samples = header_.plane_samples(p);
    if (frame.planes.size() <= static_cast<size_t>(p) ||
        frame.planes[p].size() != samples) {
      throw Error(Errc::kDimensionMismatch,
                  "frame plane " + std::to_string(p) + " has wrong size");
    }
    raw.resize(samples * (wide ? 2 : 1));
    const auto& plane = frame.planes[p];
    if (wide) {
      for (size_t i = 0; i < samples; ++i) {
        raw[2 * i] = static_cast<uint8_t>(plane[i] & 0xff);
        raw[2 * i + 1] = static_cast<uint8_t>(plane[i] >> 8);
      }
    } else {
      for (size_t i = 0; i < samples; ++i) {
        raw[i] = static_cast<uint8_t>(plane[i] & 0xff);
      }
    }
    if (std::fwrite(raw.data(), 1, raw.size(), f) != raw.size()) {
      throw Error(Errc::kIoError, "short write to " + path_);
    }
  }
}

void Y4mWriter::close() {
  if (file_) {
    if (std::fflush(file_.get()) != 0) {
      throw Error(Errc::kIoError, "flush failed for " + path_);
    }
    file_.reset();
  }
}

long count_y4m_frames(const std::string& path) {
  Y4mReader reader(path);
  Y4mFrame frame;
  while (reader.read_frame(&frame)) {
  }
  return reader.frames_read();
}

}  // namespace lforge
