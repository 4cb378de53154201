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

#include "lforge/error.h"

namespace lforge {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kTooFewPoints: return "TooFewPoints";
    case Errc::kNonMonotone: return "NonMonotone";
    case Errc::kMixedMetrics: return "MixedMetrics";
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kNoOverlap: return "NoOverlap";
    case Errc::kDomainError: return "DomainError";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kCostFailure: return "CostFailure";
    case Errc::kUnknownPlaceholder: return "UnknownPlaceholder";
    case Errc::kParseFailure: return "ParseFailure";
    case Errc::kUnsupportedColorspace: return "UnsupportedColorspace";
    case Errc::kTooFewFrames: return "TooFewFrames";
    case Errc::kEncoderProcessFailure: return "EncoderProcessFailure";
    case Errc::kMetricProcessFailure: return "MetricProcessFailure";
    case Errc::kSourceMissing: return "SourceMissing";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kEmptyManifest: return "EmptyManifest";
    case Errc::kMissingPairing: return "MissingPairing";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kIoError: return "IoError";
    case Errc::kCancelled: return "Cancelled";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code) {}

void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lforge
