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

#ifndef LFORGE_SERIALIZE_H_
#define LFORGE_SERIALIZE_H_

#include "json.hpp"
#include "lforge/encoders.h"
#include "lforge/optim.h"
#include "lforge/rdmodel.h"

namespace lforge {

using Json = nlohmann::json;

// ADL hooks for nlohmann::json conversions.
void to_json(Json& j, const RDPoint& p);
void from_json(const Json& j, RDPoint& p);

void to_json(Json& j, const MetricReport& m);
void from_json(const Json& j, MetricReport& m);

void to_json(Json& j, const MeasuredPoint& m);
void from_json(const Json& j, MeasuredPoint& m);

void to_json(Json& j, const SyntheticClipModel& m);
void from_json(const Json& j, SyntheticClipModel& m);

void to_json(Json& j, const ProxyProfile& p);
void from_json(const Json& j, ProxyProfile& p);

void to_json(Json& j, const Bounds& b);
void from_json(const Json& j, Bounds& b);

void to_json(Json& j, const OptimizerConfig& c);
void from_json(const Json& j, OptimizerConfig& c);

// Digest of a canonical (sorted-key) JSON encoding; used for cache/store keys.
std::string json_digest(const Json& j);

}  // namespace lforge

#endif  // LFORGE_SERIALIZE_H_
