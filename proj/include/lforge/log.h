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

#ifndef LFORGE_LOG_H_
#define LFORGE_LOG_H_

#include <mutex>
#include <ostream>
#include <string>

#include "json.hpp"

namespace lforge {

// Structured logger: one JSON object per line, so phase timings and encode
// events can be analyzed straight from the run log.
class EventLog {
 public:
  EventLog() = default;
  EventLog(std::ostream* sink, int verbosity)
      : sink_(sink), verbosity_(verbosity) {}

  int verbosity() const { return verbosity_; }

  // level 0 events always print when a sink is set; level 1 for phases,
  // level 2 for per-encode detail.
  void event(int level, const std::string& name, nlohmann::json fields);

 private:
  std::ostream* sink_ = nullptr;
  int verbosity_ = 0;
  std::mutex mutex_;
};

}  // namespace lforge

#endif  // LFORGE_LOG_H_
