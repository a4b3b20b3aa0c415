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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: pfsign_acceptance [suite] [fixture_dir]

#include <exception>
#include <iostream>
#include <string>

#include "pfsign/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "all";
  const std::string fixtures = argc > 2 ? argv[2] : PFSIGN_FIXTURE_DIR;
  try {
    const pfsign::AcceptanceReport rep = pfsign::run_acceptance(suite, fixtures, std::cout);
    std::size_t passed = 0;
    for (const auto& r : rep.results) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << rep.results.size() << " criteria passed\n";
    return rep.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
