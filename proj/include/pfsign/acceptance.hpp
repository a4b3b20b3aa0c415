// Copyright 2026 The pfsign Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Self-checking experiment suites. Each criterion runs a fixed experiment,
// compares measured quantities with their thresholds, and reports one line.

#ifndef PFSIGN_ACCEPTANCE_HPP
#define PFSIGN_ACCEPTANCE_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pfsign {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Measured values, human readable.
  std::string detail;
  double seconds = 0.0;
  /// Wall-clock budget; 0 means none.
  double limit_seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_pass() const noexcept;
};

/// Suite ids in display order.
std::vector<std::string> acceptance_suites();

/// Criterion numbers a suite covers. Throws Error listing the valid ids.
std::vector<int> suite_criteria(const std::string& suite);

/// Runs a suite. Needs the committed fixtures in `fixture_dir` (Error if
/// missing). Writes one line per criterion to `log` as it finishes.
AcceptanceReport run_acceptance(const std::string& suite, const std::filesystem::path& fixture_dir,
                                std::ostream& log);

/// "criterion N name: PASS (...) [1.23 s / 5 s]"
std::string format_result(const CriterionResult& r);

}  // namespace pfsign

#endif  // PFSIGN_ACCEPTANCE_HPP
