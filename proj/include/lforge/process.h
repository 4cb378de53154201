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

#ifndef LFORGE_PROCESS_H_
#define LFORGE_PROCESS_H_

#include <string>
#include <vector>

namespace lforge {

struct ProcessResult {
  int exit_code = -1;
  std::string stderr_tail;  // last part of captured stderr, for diagnostics
};

// Runs argv[0] with PATH lookup, stdout/stderr redirected to the given files
// (empty path = /dev/null). Never throws on nonzero exit; throws IoError when
// the process cannot be spawned.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdout_path,
                          const std::string& stderr_path);

}  // namespace lforge

#endif  // LFORGE_PROCESS_H_
