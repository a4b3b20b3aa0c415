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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pfsign/acceptance.hpp"
#include "pfsign/errors.hpp"
#include "pfsign/harness.hpp"

using namespace pfsign;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PFSIGN_FIXTURE_DIR;

json quad_sign_config(std::size_t T) {
  return {{"T", T},
          {"seed", 1},
          {"problem", {{"kind", "quadratic"}, {"dim", 5}, {"start", {{"radius", 0.5}}}}},
          {"method", {{"name", "sign_sgd"}, {"gamma", 0.01}}}};
}

std::string field_of(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pfsign_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("T = 10 gives 11 rows under the fixed header") {
  const RunResult r = execute(parse_run_config(quad_sign_config(10)), kFixtures);
  std::ostringstream os;
  write_trace_csv(r.trace, r.config.tag, r.config.seed, os);
  const auto rows = lines(os.str());
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == "t,f,grad_l1,gamma,method,seed");
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(rows[11].rfind("10,", 0) == 0);
  CHECK(rows[1].find(",sign_sgd,1") != std::string::npos);
}

TEST_CASE("identical configs write byte-identical files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  json doc = quad_sign_config(50);
  doc["oracle"] = {{"mode", "noisy"}, {"sigma", 0.1}};
  const RunConfig cfg = parse_run_config(doc);
  run_and_write(cfg, a, kFixtures);
  run_and_write(cfg, b, kFixtures);
  CHECK(read(a / "sign_sgd.csv") == read(b / "sign_sgd.csv"));
  CHECK(read(a / "sign_sgd.json") == read(b / "sign_sgd.json"));
  for (const auto& e : fs::directory_iterator(a)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("CSV rows increase strictly in t, including the pre-start row") {
  json doc = quad_sign_config(20);
  doc["method"] = {{"name", "sos_sign_sgd"}};
  doc["problem"]["start"]["radius"] = 0.01;
  const RunResult r = execute(parse_run_config(doc), kFixtures);
  std::ostringstream os;
  write_trace_csv(r.trace, "x", 0, os);
  const auto rows = lines(os.str());
  long prev = -2;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const long t = std::stol(rows[i].substr(0, rows[i].find(',')));
    CHECK(t > prev);
    prev = t;
  }
  CHECK(rows[1].rfind("-1,", 0) == 0);
}

TEST_CASE("config errors name the offending field") {
  json doc = quad_sign_config(10);
  doc["method"]["name"] = "adamw";
  CHECK(field_of(doc) == "method.name");

  doc = quad_sign_config(10);
  doc["method"]["gama"] = 0.1;
  CHECK(field_of(doc) == "method.gama");

  doc = quad_sign_config(10);
  doc["T"] = "ten";
  CHECK(field_of(doc) == "T");

  doc = quad_sign_config(10);
  doc["problem"]["start"]["radius"] = -1;
  CHECK(field_of(doc) == "problem.start.radius");

  doc = quad_sign_config(10);
  doc["oracle"] = {{"sigma", 1.0}};
  CHECK(field_of(doc) == "oracle.sigma");

  doc = quad_sign_config(10);
  doc["cluster"] = {{"nodes", 2}};
  CHECK(field_of(doc) == "cluster");

  doc = quad_sign_config(10);
  doc["tag"] = "a,b";
  CHECK(field_of(doc) == "tag");

  doc = quad_sign_config(10);
  doc["method"] = {{"name", "sos_sign_sgd"}, {"k", 12}};
  CHECK(field_of(doc) == "method.k");

  doc = quad_sign_config(10);
  doc["method"] = {{"name", "steepest"}};
  doc["oracle"] = {{"mode", "stochastic"}};
  CHECK(field_of(doc) == "oracle.mode");

  doc = quad_sign_config(10);
  doc.erase("problem");
  CHECK(field_of(doc) == "problem");

  CHECK(field_of(quad_sign_config(10)) == "<accepted>");
}

TEST_CASE("defaults are filled and overrides apply") {
  const RunConfig cfg = parse_run_config(quad_sign_config(10));
  CHECK(cfg.tag == "sign_sgd");
  CHECK(cfg.eval_every == 10);
  CHECK(cfg.doc["problem"]["condition"] == 10.0);
  CHECK(cfg.doc["oracle"]["mode"] == "exact");
  Overrides o;
  o.seed = 77;
  o.eval_every = 3;
  const RunConfig over = apply_overrides(cfg, o);
  CHECK(over.seed == 77);
  CHECK(over.eval_every == 3);
  CHECK(over.doc["seed"] == 77);
}

TEST_CASE("summary carries the documented keys") {
  json doc = quad_sign_config(30);
  doc["method"] = {{"name", "dist_sign_sgd"}, {"gamma", 0.01}};
  doc["oracle"] = {{"mode", "noisy"}, {"sigma", 0.1}};
  doc["cluster"] = {{"nodes", 3}};
  const RunResult r = execute(parse_run_config(doc), kFixtures);
  for (const char* key : {"final_avg_grad_l1", "min_f", "launches", "comm", "f_star", "divergent"}) {
    CAPTURE(key);
    CHECK(r.summary.contains(key));
  }
  CHECK(r.summary["comm"]["bits_up"] == 3 * 5 * 30);
  CHECK(r.summary["launches"] == 1);
}

TEST_CASE("every method runs from a config") {
  const char* names[] = {"sign_sgd", "sos_sign_sgd", "alias",         "alias_adam",
                         "steepest", "sos_steepest", "normalized_sgd", "dist_sign_sgd",
                         "dist_sos_sign_sgd", "dist_alias"};
  for (const char* name : names) {
    CAPTURE(name);
    json doc = quad_sign_config(40);
    doc["problem"]["start"]["radius"] = 0.01;
    doc["method"] = {{"name", name}};
    if (std::string(name).rfind("dist_", 0) == 0) {
      doc["oracle"] = {{"mode", "noisy"}, {"sigma", 0.0}};
      doc["cluster"] = {{"nodes", 3}};
    }
    const RunResult r = execute(parse_run_config(doc), kFixtures);
    CHECK_FALSE(r.trace.divergent);
    CHECK(r.trace.steps() == 40);
  }
}

TEST_CASE("logistic problems resolve fixture names") {
  const json doc = {{"T", 20},
                    {"problem", {{"kind", "logistic"}, {"dataset", "fixture:w8a"}, {"l2", 1e-3}}},
                    {"oracle", {{"mode", "stochastic"}, {"batch_size", 8}}},
                    {"method", {{"name", "alias"}}}};
  const RunConfig cfg = parse_run_config(doc);
  const Problem p = build_problem(cfg, kFixtures);
  CHECK(p.objective->dim() == 300);
  CHECK(p.x_start == DenseVector(300));
  const RunResult r = execute(cfg, kFixtures);
  CHECK(r.trace.at(0)->f == doctest::Approx(std::log(2.0)));
  json bad = doc;
  bad["problem"]["dataset"] = "fixture:nope";
  CHECK_THROWS_AS(execute(parse_run_config(bad), kFixtures), Error);
}

TEST_CASE("grid points") {
  CHECK(grid_points({1e-3, 1.0, std::pow(10.0, 0.25)}).size() == 13);
  CHECK(grid_points({1.0, 1.0, 2.0}).size() == 1);
  CHECK_THROWS_AS(grid_points({0.0, 1.0, 2.0}), ConfigError);
  CHECK(grid_parameter("steepest") == "c");
  CHECK(grid_parameter("sign_sgd") == "gamma");
}

TEST_CASE("grid search on a 1-D quadratic lands next to 1/L") {
  const json doc = {{"T", 20},
                    {"problem", {{"kind", "quadratic"}, {"dim", 1}, {"condition", 1.0}}},
                    {"method", {{"name", "steepest"}}}};
  const RunConfig cfg = parse_run_config(doc);
  const GridSpec spec;
  const GridResult g = grid_tune(cfg, spec, kFixtures);
  REQUIRE(g.grid.size() == 13);

  // Exhaustive evaluation of x <- x - c f'(x) with f = (x - x*)^2 / 2.
  const Problem p = build_problem(cfg, kFixtures);
  const double x_star = std::dynamic_pointer_cast<const QuadraticObjective>(p.objective)
                            ->problem().x_star[0];
  std::size_t best = 0;
  double best_val = INFINITY;
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    double x = p.x_start[0], sum = 0.0;
    for (int t = 0; t < 20; ++t) {
      const double gr = x - x_star;
      sum += std::abs(gr);
      x -= g.grid[k] * gr;
    }
    if (sum / 20 < best_val) {
      best_val = sum / 20;
      best = k;
    }
  }
  CHECK(g.best == best);
  const double c = g.grid[g.best];
  CHECK(c >= 1.0 / spec.factor * (1 - 1e-9));
  CHECK(c <= 1.0 * spec.factor * (1 + 1e-9));
  CHECK(g.best_config.doc["method"]["c"] == c);
}

TEST_CASE("a grid where every run diverges is an error") {
  const RunConfig cfg = parse_run_config(quad_sign_config(5));
  CHECK_THROWS_AS(grid_tune(cfg, {1e101, 1e102, 10.0}, kFixtures), Error);
}

TEST_CASE("compare aligns runs and suffixes duplicate tags") {
  std::vector<RunConfig> cfgs;
  for (const char* name : {"sign_sgd", "alias", "normalized_sgd", "sign_sgd"}) {
    const json doc = {{"T", 30},
                      {"problem", {{"kind", "logistic"}, {"dataset", "fixture:a9a"}}},
                      {"method", {{"name", name}}}};
    cfgs.push_back(parse_run_config(doc));
  }
  const CompareResult c = compare(cfgs, kFixtures);
  CHECK(c.tags == std::vector<std::string>{"sign_sgd", "alias", "normalized_sgd", "sign_sgd#2"});
  const auto rows = lines(c.wide_csv);
  CHECK(rows[0] == "t,sign_sgd,alias,normalized_sgd,sign_sgd#2");
  CHECK(rows.size() == 32);
  CHECK(c.markdown.find("sign_sgd#2") != std::string::npos);
  CHECK(compare(cfgs, kFixtures).wide_csv == c.wide_csv);

  CHECK_THROWS_AS(compare({}, kFixtures), Error);
  const json other = {{"T", 30},
                      {"problem", {{"kind", "logistic"}, {"dataset", "fixture:w8a"}}},
                      {"method", {{"name", "alias"}}}};
  cfgs.push_back(parse_run_config(other));
  CHECK_THROWS_AS(compare(cfgs, kFixtures), Error);
}

TEST_CASE("compare and grid files") {
  const fs::path dir = scratch("files");
  std::ofstream(dir / "cmp.json") << R"({
    "defaults": {"T": 10, "problem": {"kind": "quadratic", "dim": 3}},
    "runs": [{"method": {"name": "sign_sgd"}}, {"method": {"name": "alias"}, "tag": "A"}]
  })";
  const auto cfgs = load_compare_configs(dir / "cmp.json");
  REQUIRE(cfgs.size() == 2);
  CHECK(cfgs[1].tag == "A");
  CHECK(cfgs[0].T == 10);

  std::ofstream(dir / "bad.json") << R"({"runs": [{"method": {"name": "nope"}}],
    "defaults": {"problem": {"kind": "quadratic"}}})";
  try {
    load_compare_configs(dir / "bad.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "runs[0].method.name");
  }

  std::ofstream(dir / "grid.json") << R"({"base": {"T": 10, "problem": {"kind": "quadratic"},
    "method": {"name": "sign_sgd"}}, "grid": {"lo": 0.01, "hi": 0.1}})";
  const auto [base, spec] = load_grid_config(dir / "grid.json");
  CHECK(base.method == "sign_sgd");
  CHECK(spec.lo == 0.01);
  CHECK(grid_points(spec).size() == 5);
}

TEST_CASE("acceptance suite lookup") {
  CHECK(suite_criteria("lemmas") == std::vector<int>{2, 3, 4});
  CHECK(suite_criteria("theorem1") == std::vector<int>{1});
  CHECK(suite_criteria("all").size() == 11);
  try {
    suite_criteria("nonsense");
    FAIL("expected Error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    for (const auto& s : acceptance_suites()) CHECK(msg.find(s) != std::string::npos);
  }
  CriterionResult r{3, "bisection", true, "ok", 1.234, 0.0};
  CHECK(format_result(r).rfind("criterion 3 bisection: PASS (ok)", 0) == 0);
}
