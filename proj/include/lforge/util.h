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

#ifndef LFORGE_UTIL_H_
#define LFORGE_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lforge {

// FNV-1a, used for cache keys and store keys.
uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull);
std::string to_hex(uint64_t value);

// Shortest round-trip decimal representation ("2.5", "0.001").
std::string fmt_double(double value);
// Like fmt_double but guarantees a decimal point ("1.0" instead of "1"), the
// form multiplier flags are rendered in.
std::string fmt_multiplier(double value);
// Fixed 6-significant-digit formatting used by all report exports.
std::string fmt_g6(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);
// Write to <path>.tmp.<pid> then rename, so readers never observe a partial
// file.
void write_file_atomic(const std::string& path, std::string_view data);

// Size + content hash of a file, hex encoded.
std::string file_digest(const std::string& path);

double now_seconds();

std::string join_path(const std::string& a, const std::string& b);
void ensure_dir(const std::string& path);

std::vector<std::string> split(std::string_view text, char sep);

// SplitMix64; the deterministic perturbation source for synthetic models.
uint64_t splitmix64(uint64_t x);

}  // namespace lforge

#endif  // LFORGE_UTIL_H_
