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

#ifndef LFORGE_SELFTEST_H_
#define LFORGE_SELFTEST_H_

#include <ostream>
#include <string>
#include <vector>

namespace lforge::selftest {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// The end-to-end verification suite over the synthetic backend and a mock
// external encoder. Each criterion pins its tolerances in code.
std::vector<CriterionResult> run_all();

// Prints one pass/fail line per criterion; returns process exit code
// (0 = all passed).
int run_and_report(std::ostream& out);

}  // namespace lforge::selftest

#endif  // LFORGE_SELFTEST_H_
