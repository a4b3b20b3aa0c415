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

// pfsign: run, grid-tune, compare and self-check the sign-based optimizers.
//
// Exit status: 0 on success, 1 on a failed acceptance criterion or runtime
// error, 2 on an invalid configuration or command line.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfsign/acceptance.hpp"
#include "pfsign/errors.hpp"
#include "pfsign/harness.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> eval_every;
  std::string fixtures = PFSIGN_FIXTURE_DIR;
};

pfsign::Overrides overrides(const Common& c) { return {c.seed, c.eval_every}; }

int cmd_run(const Common& c) {
  const pfsign::RunConfig cfg = pfsign::apply_overrides(pfsign::load_run_config(c.config),
                                                        overrides(c));
  const pfsign::RunResult r = pfsign::run_and_write(cfg, c.out, c.fixtures);
  const std::vector<std::string> tags = {cfg.tag};
  const std::vector<pfsign::RunResult> runs = {r};
  const std::string md = pfsign::markdown_table(tags, runs);
  pfsign::write_file_atomic(std::filesystem::path(c.out) / (cfg.tag + ".md"), md);
  std::cout << md;
  return 0;
}

int cmd_grid(const Common& c) {
  auto [base, spec] = pfsign::load_grid_config(c.config);
  base = pfsign::apply_overrides(base, overrides(c));
  const pfsign::GridResult g = pfsign::grid_tune(base, spec, c.fixtures);
  const std::string param = pfsign::grid_parameter(base.method);

  std::ostringstream csv;
  csv << pfsign::kCsvHeader << '\n';
  json points = json::array();
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < g.runs.size(); ++i) {
    const pfsign::RunResult& r = g.runs[i];
    std::ostringstream one;
    pfsign::write_trace_csv(r.trace, r.config.tag, r.config.seed, one);
    const std::string body = one.str();
    csv << body.substr(body.find('\n') + 1);
    const double crit = r.trace.avg_grad_l1();
    points.push_back({{param, g.grid[i]},
                      {"final_avg_grad_l1", std::isfinite(crit) ? json(crit) : json(nullptr)},
                      {"divergent", r.trace.divergent}});
    tags.push_back(r.config.tag);
  }
  const std::filesystem::path out = c.out;
  pfsign::write_file_atomic(out / (base.tag + "_grid.csv"), csv.str());
  json summary = {{"parameter", param},
                  {"points", points},
                  {"best_index", g.best},
                  {"best_value", g.grid[g.best]},
                  {"best_config", g.best_config.doc}};
  pfsign::write_file_atomic(out / (base.tag + "_grid.json"), summary.dump(2) + "\n");
  const std::string md = pfsign::markdown_table(tags, g.runs);
  pfsign::write_file_atomic(out / (base.tag + "_grid.md"), md);
  std::cout << md << "best " << param << " = " << g.grid[g.best] << "\n";
  return 0;
}

int cmd_compare(const Common& c) {
  std::vector<pfsign::RunConfig> cfgs = pfsign::load_compare_configs(c.config);
  for (auto& cfg : cfgs) cfg = pfsign::apply_overrides(cfg, overrides(c));
  const pfsign::CompareResult res = pfsign::compare(cfgs, c.fixtures);
  const std::filesystem::path out = c.out;
  pfsign::write_file_atomic(out / "compare.csv", res.wide_csv);
  pfsign::write_file_atomic(out / "compare.md", res.markdown);
  json runs = json::array();
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    std::ostringstream csv;
    pfsign::write_trace_csv(res.runs[i].trace, res.tags[i], res.runs[i].config.seed, csv);
    pfsign::write_file_atomic(out / (res.tags[i] + ".csv"), csv.str());
    runs.push_back(res.runs[i].summary);
  }
  pfsign::write_file_atomic(out / "compare.json", runs.dump(2) + "\n");
  std::cout << res.markdown;
  return 0;
}

int cmd_accept(const Common& c, const std::string& suite) {
  const pfsign::AcceptanceReport rep = pfsign::run_acceptance(suite, c.fixtures, std::cout);
  std::size_t passed = 0;
  for (const auto& r : rep.results) passed += r.pass ? 1 : 0;
  std::cout << passed << "/" << rep.results.size() << " criteria passed\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfsign: sign-based optimizers with automatic step sizes"};
  app.require_subcommand(1);
  Common c;
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--fixtures", c.fixtures, "directory holding the fixture datasets");

  auto add_run_flags = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "JSON config file");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "override the master seed");
    sub->add_option("--eval-every", c.eval_every, "exact-gradient reporting period")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "OpenMP worker threads")->check(CLI::NonNegativeNumber);
  };
  auto* run = app.add_subcommand("run", "execute one configured run");
  add_run_flags(run, true);
  auto* grid = app.add_subcommand("grid", "grid-tune a step size");
  add_run_flags(grid, true);
  auto* cmp = app.add_subcommand("compare", "run several configs and tabulate them");
  add_run_flags(cmp, true);
  auto* acc = app.add_subcommand("accept", "run an acceptance suite");
  std::string suite = "all";
  acc->add_option("suite", suite, "suite id (default: all)");
  acc->add_option("--threads", threads, "OpenMP worker threads")->check(CLI::NonNegativeNumber);
  acc->add_option("--fixtures", c.fixtures, "directory holding the fixture datasets");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) return cmd_run(c);
    if (*grid) return cmd_grid(c);
    if (*cmp) return cmd_compare(c);
    return cmd_accept(c, suite);
  } catch (const pfsign::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
