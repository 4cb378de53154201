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

#ifndef LFORGE_ERROR_H_
#define LFORGE_ERROR_H_

#include <stdexcept>
#include <string>

namespace lforge {

// Every failure mode the library reports. Tests match on the code, not on
// message text.
enum class Errc {
  kTooFewPoints,
  kNonMonotone,
  kMixedMetrics,
  kOutOfRange,
  kNoOverlap,
  kDomainError,
  kDimensionMismatch,
  kCostFailure,
  kUnknownPlaceholder,
  kParseFailure,
  kUnsupportedColorspace,
  kTooFewFrames,
  kEncoderProcessFailure,
  kMetricProcessFailure,
  kSourceMissing,
  kEmptyInput,
  kEmptyManifest,
  kMissingPairing,
  kConfigError,
  kIoError,
  kCancelled,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace lforge

#endif  // LFORGE_ERROR_H_
