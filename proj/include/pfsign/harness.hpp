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

#ifndef PFSIGN_HARNESS_HPP
#define PFSIGN_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfsign/numeric.hpp"
#include "pfsign/objective.hpp"
#include "pfsign/sos.hpp"
#include "pfsign/trace.hpp"

namespace pfsign {

/// Everything needed to reproduce one run. Parsed from a JSON document; see
/// README for the schema. Unknown keys are rejected with their path.
struct RunConfig {
  nlohmann::json doc;  // normalized document, with defaults filled in

  std::string tag;      // label used in CSV rows and table headers
  std::string method;   // method.name
  std::size_t T = 100;
  std::uint64_t seed = 0;
  std::size_t eval_every = 10;
};

/// Validates and normalizes. Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Command-line overrides applied on top of a config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> eval_every;
};

RunConfig apply_overrides(const RunConfig& cfg, const Overrides& o);

/// Objective and start point built from a config's problem section.
struct Problem {
  std::shared_ptr<const Objective> objective;
  DenseVector x_start;
  /// Known optimum value when available (synthetic quadratics).
  std::optional<double> f_star;
  /// Analytic smoothness bound when available.
  std::optional<double> linf_bound;
};

/// `fixture_dir` resolves dataset names of the form "fixture:<name>".
Problem build_problem(const RunConfig& cfg, const std::filesystem::path& fixture_dir);

struct RunResult {
  RunConfig config;
  Trace trace;
  std::optional<BisectionOutcome> bisection;
  int launches = 1;
  nlohmann::json summary;
};

RunResult execute(const RunConfig& cfg, const std::filesystem::path& fixture_dir);

/// "t,f,grad_l1,gamma,method,seed" rows; one per recorded iterate.
void write_trace_csv(const Trace& tr, const std::string& tag, std::uint64_t seed,
                     std::ostream& out);
inline constexpr const char* kCsvHeader = "t,f,grad_l1,gamma,method,seed";

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// run: <out>/<tag>.csv and <out>/<tag>.json.
RunResult run_and_write(const RunConfig& cfg, const std::filesystem::path& out_dir,
                        const std::filesystem::path& fixture_dir);

struct GridSpec {
  double lo = 1e-3;
  double hi = 1.0;
  double factor = 1.7782794100389228;  // 10^(1/4)
};

/// Points lo * factor^k for every k with the point <= hi (relative slack 1e-9).
std::vector<double> grid_points(const GridSpec& g);

struct GridResult {
  std::vector<double> grid;
  std::vector<RunResult> runs;
  std::size_t best = 0;
  RunConfig best_config;
};

/// Name of the step parameter a grid varies for a method ("gamma" or "c").
std::string grid_parameter(const std::string& method);

/// Runs every grid point (in parallel when threads allow) and keeps the one
/// with the smallest final average ||grad f||_1; ties go to the smaller step.
/// Throws Error when every run diverges.
GridResult grid_tune(const RunConfig& templ, const GridSpec& grid,
                     const std::filesystem::path& fixture_dir);

struct CompareResult {
  std::vector<std::string> tags;
  std::vector<RunResult> runs;
  std::string wide_csv;
  std::string markdown;
};

/// Runs each config; tags repeated earlier get "#2", "#3", ... appended.
/// Throws Error for an empty list or problems of different dimension.
CompareResult compare(const std::vector<RunConfig>& configs,
                      const std::filesystem::path& fixture_dir);

/// Reads {"runs": [...], "defaults": {...}}; defaults are merged under each run.
std::vector<RunConfig> load_compare_configs(const std::filesystem::path& path);

/// Reads {"base": {...run config...}, "grid": {"lo", "hi", "factor"}}.
std::pair<RunConfig, GridSpec> load_grid_config(const std::filesystem::path& path);

std::string markdown_table(const std::vector<std::string>& tags,
                           const std::vector<RunResult>& runs);

}  // namespace pfsign

#endif  // PFSIGN_HARNESS_HPP
