// Copyright 2026 The mdport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Built-in regression cases with known closed-form answers.

#include <string>
#include <vector>

namespace mdport {

struct GoldenResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // largest absolute deviation from the expected values
  std::string detail;
};

std::vector<GoldenResult> run_golden_cases();

}  // namespace mdport
