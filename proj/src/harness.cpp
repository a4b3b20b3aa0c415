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

#include "pfsign/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pfsign/distributed.hpp"
#include "pfsign/errors.hpp"
#include "pfsign/libsvm.hpp"
#include "pfsign/optimizers.hpp"
#include "pfsign/rng.hpp"
#include "pfsign/synthetic.hpp"

namespace pfsign {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers. Each section is checked against a table of defaults; keys
// absent from the table are rejected.

const std::set<std::string> kMethods = {
    "sign_sgd",     "sos_sign_sgd",   "alias",         "alias_adam",        "steepest",
    "sos_steepest", "normalized_sgd", "dist_sign_sgd", "dist_sos_sign_sgd", "dist_alias"};

json schedule_defaults() {
  return {{"kind", "constant"}, {"warmup_frac", 0.1}, {"floor_frac", 0.1}};
}

json method_defaults(const std::string& name) {
  if (name == "sign_sgd") {
    return {{"gamma", "inv_sqrt_T"}, {"schedule", schedule_defaults()}, {"extra_step", false},
            {"tau_s", 1.0},          {"weight_decay", 0.0}};
  }
  if (name == "sos_sign_sgd" || name == "dist_sos_sign_sgd") {
    return {{"gamma_s", 1e-6}, {"k", 4}, {"tau_s", 1.0}};
  }
  if (name == "alias") {
    return {{"option", "II"}, {"d0", 1e-6}, {"f_tilde", 0.0}, {"bootstrap", nullptr},
            {"l_known", 0.0}};
  }
  if (name == "dist_alias") {
    return {{"f_tilde", 0.0}, {"bootstrap", nullptr}, {"l_known", 0.0}};
  }
  if (name == "alias_adam") {
    return {{"gamma", 1e-3},   {"schedule", schedule_defaults()}, {"beta1", 0.9},
            {"beta2", 0.999},  {"d_init", 1e-6},                  {"weight_decay", 0.0}};
  }
  if (name == "steepest") return {{"c", 1e-3}};
  if (name == "sos_steepest") return {{"c_s", "entry_bound"}, {"k", 4}, {"tau_s", 1.0}};
  if (name == "normalized_sgd") {
    return {{"gamma", 1e-3}, {"schedule", schedule_defaults()}};
  }
  if (name == "dist_sign_sgd") {
    return {{"gamma", "inv_sqrt_T"}, {"extra_step", false}, {"tau_s", 1.0}};
  }
  return json::object();
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
  return out;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

// Fills `defaults` from `given`, rejecting unknown keys and mismatched types.
// Keys listed in `flexible` accept any scalar; they are checked later.
json merge_section(const json& given, json defaults, const std::string& path,
                   const std::set<std::string>& flexible = {}) {
  if (given.is_null()) return defaults;
  if (!given.is_object()) throw ConfigError(path, "must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string key = it.key();
    const std::string field = path + "." + key;
    if (!defaults.contains(key)) throw ConfigError(field, "unknown key");
    if (flexible.count(key) == 0 && !defaults[key].is_null() && !same_kind(defaults[key], *it)) {
      throw ConfigError(field, std::string("expected ") + defaults[key].type_name() + ", got " +
                                   it->type_name());
    }
    defaults[key] = *it;
  }
  return defaults;
}

double positive(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be > 0");
  return v;
}

double nonneg(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "must be a number");
  const double v = j.get<double>();
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be >= 0");
  return v;
}

std::uint64_t count(const json& j, const std::string& field, std::uint64_t min) {
  if (!j.is_number_integer()) throw ConfigError(field, "must be an integer");
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v < min) throw ConfigError(field, "must be >= " + std::to_string(min));
    return v;
  }
  const auto v = j.get<std::int64_t>();
  if (v < static_cast<std::int64_t>(min)) {
    throw ConfigError(field, "must be >= " + std::to_string(min));
  }
  return static_cast<std::uint64_t>(v);
}

void one_of(const json& j, const std::string& field, const std::set<std::string>& allowed) {
  if (!j.is_string() || allowed.count(j.get<std::string>()) == 0) {
    throw ConfigError(field, "must be one of: " + join(allowed));
  }
}

void check_schedule(const json& s, const std::string& path) {
  one_of(s["kind"], path + ".kind", {"constant", "cosine"});
  const double w = nonneg(s["warmup_frac"], path + ".warmup_frac");
  if (w >= 1.0) throw ConfigError(path + ".warmup_frac", "must be < 1");
  const double f = positive(s["floor_frac"], path + ".floor_frac");
  if (f > 1.0) throw ConfigError(path + ".floor_frac", "must be <= 1");
}

void check_step(const json& g, const std::string& field) {
  if (g.is_string()) {
    if (g.get<std::string>() != "inv_sqrt_T") {
      throw ConfigError(field, "must be a positive number or \"inv_sqrt_T\"");
    }
    return;
  }
  positive(g, field);
}

void check_method(json& m) {
  const std::string name = m["name"];
  if (m.contains("gamma")) check_step(m["gamma"], "method.gamma");
  if (m.contains("schedule")) check_schedule(m["schedule"], "method.schedule");
  if (m.contains("tau_s")) positive(m["tau_s"], "method.tau_s");
  if (m.contains("weight_decay")) nonneg(m["weight_decay"], "method.weight_decay");
  if (m.contains("gamma_s")) positive(m["gamma_s"], "method.gamma_s");
  if (m.contains("k")) {
    const auto k = count(m["k"], "method.k", 1);
    if (k > 9) throw ConfigError("method.k", "must be in [1, 9]");
  }
  if (m.contains("option")) one_of(m["option"], "method.option", {"I", "II"});
  if (m.contains("d0")) positive(m["d0"], "method.d0");
  if (m.contains("f_tilde") && !m["f_tilde"].is_number()) {
    throw ConfigError("method.f_tilde", "must be a number");
  }
  if (m.contains("bootstrap") && !m["bootstrap"].is_null()) {
    positive(m["bootstrap"], "method.bootstrap");
  }
  if (m.contains("l_known")) nonneg(m["l_known"], "method.l_known");
  for (const char* b : {"beta1", "beta2"}) {
    if (!m.contains(b)) continue;
    const double v = positive(m[b], std::string("method.") + b);
    if (v >= 1.0) throw ConfigError(std::string("method.") + b, "must be < 1");
  }
  if (m.contains("d_init")) positive(m["d_init"], "method.d_init");
  if (m.contains("c")) positive(m["c"], "method.c");
  if (m.contains("c_s")) {
    if (m["c_s"].is_string()) {
      if (m["c_s"].get<std::string>() != "entry_bound") {
        throw ConfigError("method.c_s", "must be a positive number or \"entry_bound\"");
      }
    } else {
      positive(m["c_s"], "method.c_s");
    }
  }
}

json problem_defaults(const std::string& kind) {
  json start = {{"kind", kind == "quadratic" ? "optimum_offset" : "zero"},
                {"radius", 1.0},
                {"seed", nullptr},
                {"values", nullptr}};
  if (kind == "quadratic") {
    return {{"kind", kind}, {"dim", 10}, {"seed", 42}, {"condition", 10.0}, {"start", start}};
  }
  return {{"kind", kind}, {"dataset", nullptr}, {"dim", nullptr}, {"l2", 0.0},
          {"scale", "none"}, {"start", start}};
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  const std::set<std::string> top = {"tag", "T", "seed", "eval_every", "problem",
                                     "oracle", "cluster", "method"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (top.count(it.key()) == 0) throw ConfigError(it.key(), "unknown key");
  }
  json out;

  // method
  if (!doc.contains("method")) throw ConfigError("method", "missing");
  const json& m = doc["method"];
  if (!m.is_object()) throw ConfigError("method", "must be an object");
  if (!m.contains("name")) throw ConfigError("method.name", "missing");
  one_of(m["name"], "method.name", kMethods);
  const std::string name = m["name"];
  json mdef = method_defaults(name);
  mdef["name"] = name;
  json method = merge_section(m, mdef, "method", {"gamma", "c_s", "bootstrap"});
  check_method(method);
  out["method"] = method;

  // scalars
  out["T"] = count(doc.value("T", json(100)), "T", 1);
  out["seed"] = count(doc.value("seed", json(0)), "seed", 0);
  out["eval_every"] = count(doc.value("eval_every", json(10)), "eval_every", 1);
  const json tag = doc.value("tag", json(name));
  if (!tag.is_string() || tag.get<std::string>().empty()) {
    throw ConfigError("tag", "must be a non-empty string");
  }
  if (tag.get<std::string>().find_first_of(",\n\"") != std::string::npos) {
    throw ConfigError("tag", "must not contain commas, quotes or newlines");
  }
  out["tag"] = tag;

  // problem
  if (!doc.contains("problem")) throw ConfigError("problem", "missing");
  const json& p = doc["problem"];
  if (!p.is_object()) throw ConfigError("problem", "must be an object");
  if (!p.contains("kind")) throw ConfigError("problem.kind", "missing");
  one_of(p["kind"], "problem.kind", {"quadratic", "logistic", "nllsq"});
  const std::string kind = p["kind"];
  json pdef = problem_defaults(kind);
  json start_given = p.value("start", json());
  json pgiven = p;
  pgiven.erase("start");
  json problem = merge_section(pgiven, pdef, "problem", {"dim"});
  problem["start"] = merge_section(start_given, pdef["start"], "problem.start",
                                   {"seed", "values"});
  one_of(problem["start"]["kind"], "problem.start.kind",
         {"optimum_offset", "zero", "normal", "values"});
  nonneg(problem["start"]["radius"], "problem.start.radius");
  if (!problem["start"]["seed"].is_null()) count(problem["start"]["seed"], "problem.start.seed", 0);
  if (problem["start"]["kind"] == "values") {
    const json& v = problem["start"]["values"];
    if (!v.is_array() || v.empty()) {
      throw ConfigError("problem.start.values", "must be a non-empty array of numbers");
    }
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError("problem.start.values", "must contain numbers only");
    }
  }
  if (kind == "quadratic") {
    count(problem["dim"], "problem.dim", 1);
    count(problem["seed"], "problem.seed", 0);
    const double c = positive(problem["condition"], "problem.condition");
    if (c < 1.0) throw ConfigError("problem.condition", "must be >= 1");
  } else {
    if (!problem["dataset"].is_string()) throw ConfigError("problem.dataset", "missing");
    if (!problem["dim"].is_null()) count(problem["dim"], "problem.dim", 1);
    nonneg(problem["l2"], "problem.l2");
    one_of(problem["scale"], "problem.scale", {"none", "max_abs"});
    if (problem["start"]["kind"] == "optimum_offset") {
      throw ConfigError("problem.start.kind", "optimum_offset needs a quadratic problem");
    }
  }
  out["problem"] = problem;

  // oracle
  json odef = {{"mode", "exact"}, {"batch", "fixed"}, {"batch_size", 1},
               {"sigma", nullptr}, {"sigma_l1", nullptr}};
  json oracle = merge_section(doc.value("oracle", json()), odef, "oracle", {"sigma", "sigma_l1"});
  one_of(oracle["mode"], "oracle.mode", {"exact", "stochastic", "noisy"});
  one_of(oracle["batch"], "oracle.batch", {"fixed", "growing", "full"});
  count(oracle["batch_size"], "oracle.batch_size", 1);
  if (!oracle["sigma"].is_null() && !oracle["sigma_l1"].is_null()) {
    throw ConfigError("oracle.sigma", "give sigma or sigma_l1, not both");
  }
  if (!oracle["sigma"].is_null()) {
    if (oracle["sigma"].is_array()) {
      for (const json& s : oracle["sigma"]) nonneg(s, "oracle.sigma");
    } else {
      nonneg(oracle["sigma"], "oracle.sigma");
    }
  }
  if (!oracle["sigma_l1"].is_null()) nonneg(oracle["sigma_l1"], "oracle.sigma_l1");
  if (oracle["mode"] != "noisy" && (!oracle["sigma"].is_null() || !oracle["sigma_l1"].is_null())) {
    throw ConfigError("oracle.sigma", "only meaningful with mode \"noisy\"");
  }
  if ((name == "steepest" || name == "sos_steepest") && oracle["mode"] != "exact") {
    throw ConfigError("oracle.mode", name + " needs the exact oracle");
  }
  out["oracle"] = oracle;

  // cluster
  json cdef = {{"nodes", 1}, {"disjoint_shards", false}};
  const bool dist = name.rfind("dist_", 0) == 0;
  if (!dist && doc.contains("cluster")) {
    throw ConfigError("cluster", "only valid for dist_* methods");
  }
  json cluster = merge_section(doc.value("cluster", json()), cdef, "cluster");
  count(cluster["nodes"], "cluster.nodes", 1);
  if (dist) out["cluster"] = cluster;

  RunConfig cfg;
  cfg.doc = out;
  cfg.tag = out["tag"];
  cfg.method = name;
  cfg.T = out["T"].get<std::size_t>();
  cfg.seed = out["seed"].get<std::uint64_t>();
  cfg.eval_every = out["eval_every"].get<std::size_t>();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

RunConfig apply_overrides(const RunConfig& cfg, const Overrides& o) {
  json doc = cfg.doc;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.eval_every) doc["eval_every"] = *o.eval_every;
  return parse_run_config(doc);
}

namespace {

std::filesystem::path resolve_dataset(const std::string& name,
                                      const std::filesystem::path& fixture_dir) {
  const std::string prefix = "fixture:";
  if (name.rfind(prefix, 0) == 0) return fixture_dir / (name.substr(prefix.size()) + ".libsvm");
  return name;
}

DenseVector start_point(const json& s, std::size_t dim, std::uint64_t master,
                        const SyntheticQuadratic* q) {
  const std::string kind = s["kind"];
  const double radius = s["radius"];
  const std::uint64_t seed = s["seed"].is_null() ? master : s["seed"].get<std::uint64_t>();
  if (kind == "optimum_offset") return random_start(*q, seed, radius);
  if (kind == "zero") return DenseVector(dim);
  if (kind == "values") {
    const auto v = s["values"].get<std::vector<double>>();
    if (v.size() != dim) {
      throw ConfigError("problem.start.values", "length " + std::to_string(v.size()) +
                                                    " does not match dimension " +
                                                    std::to_string(dim));
    }
    return DenseVector(v);
  }
  Rng rng(derive_seed(seed, "START"));
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector x(dim);
  for (double& e : x) e = radius * normal(rng);
  return x;
}

}  // namespace

Problem build_problem(const RunConfig& cfg, const std::filesystem::path& fixture_dir) {
  const json& p = cfg.doc["problem"];
  const std::string kind = p["kind"];
  Problem out;
  if (kind == "quadratic") {
    auto q = std::make_shared<const SyntheticQuadratic>(make_quadratic(
        p["dim"].get<std::size_t>(), p["seed"].get<std::uint64_t>(), p["condition"].get<double>()));
    out.x_start = start_point(p["start"], q->dim(), cfg.seed, q.get());
    out.f_star = q->f_star;
    out.linf_bound = q->linf_bound;
    out.objective = std::make_shared<QuadraticObjective>(q);
    return out;
  }
  std::optional<std::size_t> dim;
  if (!p["dim"].is_null()) dim = p["dim"].get<std::size_t>();
  LibsvmDataset ds;
  try {
    ds = load_libsvm(resolve_dataset(p["dataset"], fixture_dir), dim);
  } catch (const ParseError& e) {
    throw ConfigError("problem.dataset", e.what());
  } catch (const DimensionError& e) {
    throw ConfigError("problem.dim", e.what());
  }
  try {
    ds = normalize_labels(ds, kind == "logistic" ? LabelScheme::pm_one : LabelScheme::zero_one);
  } catch (const Error& e) {
    throw ConfigError("problem.dataset", e.what());
  }
  if (p["scale"] == "max_abs") ds = max_abs_scale(ds);
  auto data = std::make_shared<const LibsvmDataset>(std::move(ds));
  const double l2 = p["l2"];
  if (kind == "logistic") {
    out.objective = std::make_shared<LogisticObjective>(data, l2);
  } else {
    out.objective = std::make_shared<NllsqObjective>(data, l2);
  }
  out.x_start = start_point(p["start"], data->dim(), cfg.seed, nullptr);
  return out;
}

namespace {

OracleConfig oracle_config(const RunConfig& cfg, std::size_t dim) {
  const json& o = cfg.doc["oracle"];
  OracleConfig oc;
  const std::string mode = o["mode"];
  oc.mode = mode == "exact" ? OracleMode::exact
            : mode == "stochastic" ? OracleMode::stochastic
                                   : OracleMode::noisy;
  const std::string batch = o["batch"];
  oc.batch = batch == "fixed" ? BatchPolicy::fixed
             : batch == "growing" ? BatchPolicy::growing
                                  : BatchPolicy::full;
  oc.batch_size = o["batch_size"];
  oc.seed = cfg.seed;
  if (o["sigma"].is_array()) {
    const auto v = o["sigma"].get<std::vector<double>>();
    if (v.size() != dim) throw ConfigError("oracle.sigma", "length does not match dimension");
    oc.noise.sigma = DenseVector(v);
  } else if (o["sigma"].is_number()) {
    oc.noise.sigma = DenseVector(dim, o["sigma"].get<double>());
  } else if (o["sigma_l1"].is_number()) {
    oc.noise.sigma = DenseVector(dim, o["sigma_l1"].get<double>() / static_cast<double>(dim));
  }
  return oc;
}

double step_value(const json& g, std::size_t T) {
  if (g.is_string()) return 1.0 / std::sqrt(static_cast<double>(T));
  return g.get<double>();
}

StepSchedule schedule_of(const json& m, std::size_t T) {
  const double base = step_value(m["gamma"], T);
  const json& s = m["schedule"];
  if (s["kind"] == "cosine") return StepSchedule::cosine(base, s["warmup_frac"], s["floor_frac"]);
  return StepSchedule::constant(base);
}

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json make_summary(const RunResult& r, const Problem& pb) {
  const Trace& tr = r.trace;
  json s;
  s["tag"] = r.config.tag;
  s["method"] = r.config.method;
  s["seed"] = r.config.seed;
  s["T"] = r.config.T;
  s["objective"] = to_string(pb.objective->kind());
  s["dim"] = pb.objective->dim();
  s["final_avg_grad_l1"] = nan_to_null(tr.avg_grad_l1());
  s["final_avg_grad_l1_sq"] = nan_to_null(tr.avg_grad_l1_sq());
  s["min_grad_l1"] = nan_to_null(tr.min_grad_l1());
  s["f0"] = nan_to_null(tr.f0());
  s["f_final"] = tr.records.empty() ? json(nullptr) : nan_to_null(tr.records.back().f);
  s["min_f"] = nan_to_null(tr.min_f());
  s["divergent"] = tr.divergent;
  s["flags"] = tr.flags;
  s["launches"] = r.launches;
  if (r.bisection) {
    const BisectionOutcome& b = *r.bisection;
    s["bisection"] = {{"kind", to_string(b.kind)},
                      {"gamma0", nan_to_null(b.gamma0)},
                      {"lo_star", nan_to_null(b.lo_star)},
                      {"hi_star", nan_to_null(b.hi_star)},
                      {"probe_launches", b.launches},
                      {"invariant_violations", b.invariant_violations}};
  } else {
    s["bisection"] = nullptr;
  }
  s["n_t"] = nan_to_null(tr.n_t);
  s["d_t"] = nan_to_null(tr.d_t);
  s["zeta"] = nan_to_null(tr.zeta);
  s["oracle_calls"] = {{"value", tr.value_calls}, {"grad", tr.grad_calls},
                       {"eval", tr.eval_calls}};
  s["comm"] = {{"bits_up", tr.bits_up},
               {"bits_down", tr.bits_down},
               {"bytes_up", (tr.bits_up + 7) / 8},
               {"bytes_down", (tr.bits_down + 7) / 8},
               {"scalar_uploads", tr.scalar_uploads}};
  if (tr.descent_tracked) {
    s["descent"] = {{"lhs", tr.descent_lhs},
                    {"rhs", tr.descent_rhs},
                    {"holds", tr.descent_lhs <= tr.descent_rhs + 1e-9}};
  } else {
    s["descent"] = nullptr;
  }
  if (pb.f_star) s["f_star"] = *pb.f_star;
  if (pb.linf_bound) s["linf_bound"] = *pb.linf_bound;
  return s;
}

RunResult execute_problem(const RunConfig& cfg, const Problem& pb) {
  const json& m = cfg.doc["method"];
  const Objective& obj = *pb.objective;
  const std::size_t T = cfg.T;
  RunResult res;
  res.config = cfg;

  const OracleConfig oc = oracle_config(cfg, obj.dim());
  const std::string& name = cfg.method;
  try {
    if (name.rfind("dist_", 0) == 0) {
      ClusterConfig cc;
      cc.nodes = cfg.doc["cluster"]["nodes"];
      cc.disjoint_shards = cfg.doc["cluster"]["disjoint_shards"];
      cc.seed = oc.seed;
      cc.mode = oc.mode;
      cc.batch = oc.batch;
      cc.batch_size = oc.batch_size;
      cc.noise = oc.noise;
      const Cluster cluster(obj, cc);
      if (name == "dist_sign_sgd") {
        DistributedParams p;
        p.T = T;
        p.gamma = step_value(m["gamma"], T);
        p.extra_step = m["extra_step"];
        p.tau_s = m["tau_s"];
        p.eval_every = cfg.eval_every;
        res.trace = distributed_sign_sgd_run(cluster, pb.x_start, p);
      } else if (name == "dist_sos_sign_sgd") {
        SosParams p;
        p.T = T;
        p.gamma_s = m["gamma_s"];
        p.k = m["k"];
        p.tau_s = m["tau_s"];
        p.eval_every = cfg.eval_every;
        SosResult r = distributed_sos_sign_sgd(cluster, pb.x_start, p);
        res.trace = std::move(r.trace);
        res.bisection = std::move(r.outcome);
        res.launches = r.total_launches;
      } else {
        DistributedAliasParams p;
        p.T = T;
        p.f_tilde = m["f_tilde"];
        if (!m["bootstrap"].is_null()) p.bootstrap = m["bootstrap"];
        p.l_known = m["l_known"];
        p.eval_every = cfg.eval_every;
        res.trace = distributed_alias_run(cluster, pb.x_start, p);
      }
    } else {
      const GradientOracle oracle(obj, oc);
      if (name == "sign_sgd") {
        SignSgdParams p;
        p.T = T;
        p.schedule = schedule_of(m, T);
        p.extra_step = m["extra_step"];
        p.tau_s = m["tau_s"];
        p.weight_decay = m["weight_decay"];
        p.eval_every = cfg.eval_every;
        res.trace = sign_sgd_run(oracle, pb.x_start, p);
      } else if (name == "sos_sign_sgd") {
        SosParams p;
        p.T = T;
        p.gamma_s = m["gamma_s"];
        p.k = m["k"];
        p.tau_s = m["tau_s"];
        p.eval_every = cfg.eval_every;
        SosResult r = sos_sign_sgd(oracle, pb.x_start, p);
        res.trace = std::move(r.trace);
        res.bisection = std::move(r.outcome);
        res.launches = r.total_launches;
      } else if (name == "alias") {
        AliasParams p;
        p.T = T;
        p.option = m["option"] == "I" ? AliasOption::I : AliasOption::II;
        p.d0 = m["d0"];
        p.f_tilde = m["f_tilde"];
        if (!m["bootstrap"].is_null()) p.bootstrap = m["bootstrap"];
        p.l_known = m["l_known"];
        p.eval_every = cfg.eval_every;
        res.trace = alias_run(oracle, pb.x_start, p);
      } else if (name == "alias_adam") {
        AliasAdamParams p;
        p.T = T;
        p.schedule = schedule_of(m, T);
        p.beta1 = m["beta1"];
        p.beta2 = m["beta2"];
        p.d_init = m["d_init"];
        p.weight_decay = m["weight_decay"];
        p.eval_every = cfg.eval_every;
        res.trace = alias_adam_run(oracle, pb.x_start, pb.x_start, p);
      } else if (name == "steepest") {
        SteepestParams p;
        p.T = T;
        p.c = m["c"];
        res.trace = steepest_run(oracle, pb.x_start, p);
      } else if (name == "sos_steepest") {
        SosSteepestParams p;
        p.T = T;
        p.k = m["k"];
        p.tau_s = m["tau_s"];
        if (m["c_s"].is_string()) {
          p.c_s = steepest_entry_bound(steepest_probe(oracle, pb.x_start, p.tau_s));
        } else {
          p.c_s = m["c_s"];
        }
        SosResult r = sos_steepest(oracle, pb.x_start, p);
        res.trace = std::move(r.trace);
        res.bisection = std::move(r.outcome);
        res.launches = r.total_launches;
      } else if (name == "normalized_sgd") {
        NormalizedSgdParams p;
        p.T = T;
        p.schedule = schedule_of(m, T);
        p.eval_every = cfg.eval_every;
        res.trace = normalized_sgd_run(oracle, pb.x_start, p);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("method", e.what());
  }
  res.trace.method = cfg.tag;
  res.summary = make_summary(res, pb);
  return res;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunResult execute(const RunConfig& cfg, const std::filesystem::path& fixture_dir) {
  const Problem pb = build_problem(cfg, fixture_dir);
  return execute_problem(cfg, pb);
}

void write_trace_csv(const Trace& tr, const std::string& tag, std::uint64_t seed,
                     std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const TraceRecord& r : tr.records) {
    out << r.t << ',' << format_double(r.f) << ',' << format_double(r.grad_l1) << ','
        << format_double(r.gamma) << ',' << tag << ',' << seed << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunResult run_and_write(const RunConfig& cfg, const std::filesystem::path& out_dir,
                        const std::filesystem::path& fixture_dir) {
  RunResult r = execute(cfg, fixture_dir);
  std::ostringstream csv;
  write_trace_csv(r.trace, cfg.tag, cfg.seed, csv);
  write_file_atomic(out_dir / (cfg.tag + ".csv"), csv.str());
  json j = r.summary;
  j["config"] = cfg.doc;
  write_file_atomic(out_dir / (cfg.tag + ".json"), j.dump(2) + "\n");
  return r;
}

std::vector<double> grid_points(const GridSpec& g) {
  if (!(g.lo > 0.0) || !(g.hi >= g.lo) || !(g.factor > 1.0)) {
    throw ConfigError("grid", "need 0 < lo <= hi and factor > 1");
  }
  std::vector<double> pts;
  for (int k = 0;; ++k) {
    const double v = g.lo * std::pow(g.factor, k);
    if (v > g.hi * (1.0 + 1e-9)) break;
    pts.push_back(v);
    if (pts.size() > 10000) throw ConfigError("grid", "more than 10000 points");
  }
  return pts;
}

std::string grid_parameter(const std::string& method) {
  if (method == "steepest") return "c";
  if (method == "sign_sgd" || method == "normalized_sgd" || method == "alias_adam" ||
      method == "dist_sign_sgd") {
    return "gamma";
  }
  throw ConfigError("method.name", method + " has no step size to grid over");
}

GridResult grid_tune(const RunConfig& templ, const GridSpec& grid,
                     const std::filesystem::path& fixture_dir) {
  const std::string param = grid_parameter(templ.method);
  GridResult out;
  out.grid = grid_points(grid);
  const Problem pb = build_problem(templ, fixture_dir);

  std::vector<RunConfig> cfgs;
  for (double g : out.grid) {
    json doc = templ.doc;
    doc["method"][param] = g;
    doc["tag"] = templ.tag + "@" + format_double(g);
    cfgs.push_back(parse_run_config(doc));
  }
  std::vector<RunResult> runs(cfgs.size());
  std::vector<std::string> errors(cfgs.size());
  const auto n = static_cast<std::ptrdiff_t>(cfgs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      runs[i] = execute_problem(cfgs[i], pb);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const std::string& e : errors) {
    if (!e.empty()) throw Error("grid run failed: " + e);
  }

  bool found = false;
  double best_val = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double v = runs[i].trace.avg_grad_l1();
    if (runs[i].trace.divergent || !std::isfinite(v)) continue;
    if (!found || v < best_val) {  // strict: ties keep the smaller step
      found = true;
      best_val = v;
      out.best = i;
    }
  }
  if (!found) throw Error("every grid run diverged");
  out.best_config = cfgs[out.best];
  out.runs = std::move(runs);
  return out;
}

std::string markdown_table(const std::vector<std::string>& tags,
                           const std::vector<RunResult>& runs) {
  std::ostringstream md;
  md << "| method | T | final avg grad_l1 | min grad_l1 | min f | launches | divergent |\n";
  md << "|---|---|---|---|---|---|---|\n";
  char buf[64];
  auto num = [&](double v) {
    if (!std::isfinite(v)) return std::string("n/a");
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Trace& tr = runs[i].trace;
    md << "| " << tags[i] << " | " << runs[i].config.T << " | " << num(tr.avg_grad_l1()) << " | "
       << num(tr.min_grad_l1()) << " | " << num(tr.min_f()) << " | " << runs[i].launches << " | "
       << (tr.divergent ? "yes" : "no") << " |\n";
  }
  return md.str();
}

CompareResult compare(const std::vector<RunConfig>& configs,
                      const std::filesystem::path& fixture_dir) {
  if (configs.empty()) throw Error("compare needs at least one run");
  CompareResult out;
  std::map<std::string, int> seen;
  for (const RunConfig& c : configs) {
    const int k = ++seen[c.tag];
    out.tags.push_back(k == 1 ? c.tag : c.tag + "#" + std::to_string(k));
  }
  std::vector<Problem> problems;
  for (const RunConfig& c : configs) problems.push_back(build_problem(c, fixture_dir));
  for (std::size_t i = 1; i < problems.size(); ++i) {
    if (problems[i].objective->dim() != problems[0].objective->dim()) {
      throw Error("compare: run '" + out.tags[i] + "' has dimension " +
                  std::to_string(problems[i].objective->dim()) + ", expected " +
                  std::to_string(problems[0].objective->dim()));
    }
  }
  out.runs.resize(configs.size());
  std::vector<std::string> errors(configs.size());
  const auto n = static_cast<std::ptrdiff_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      RunConfig c = configs[i];
      c.tag = out.tags[i];
      out.runs[i] = execute_problem(c, problems[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw Error("run '" + out.tags[i] + "' failed: " + errors[i]);
  }

  // Wide CSV aligned on t; blank where a run has no record.
  std::map<std::int64_t, std::vector<double>> rows;
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    for (const TraceRecord& r : out.runs[i].trace.records) {
      auto& row = rows[r.t];
      row.resize(out.runs.size(), kNaN);
      row[i] = r.grad_l1;
    }
  }
  std::ostringstream csv;
  csv << "t";
  for (const std::string& t : out.tags) csv << ',' << t;
  csv << '\n';
  for (auto& [t, vals] : rows) {
    vals.resize(out.runs.size(), kNaN);
    csv << t;
    for (double v : vals) csv << ',' << (std::isnan(v) ? std::string() : format_double(v));
    csv << '\n';
  }
  out.wide_csv = csv.str();
  out.markdown = markdown_table(out.tags, out.runs);
  return out;
}

std::vector<RunConfig> load_compare_configs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array()) {
    throw ConfigError("runs", "compare config needs a \"runs\" array");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "runs" && it.key() != "defaults") throw ConfigError(it.key(), "unknown key");
  }
  const json defaults = doc.value("defaults", json::object());
  std::vector<RunConfig> out;
  for (std::size_t i = 0; i < doc["runs"].size(); ++i) {
    json run = defaults;
    run.merge_patch(doc["runs"][i]);
    try {
      out.push_back(parse_run_config(run));
    } catch (const ConfigError& e) {
      throw ConfigError("runs[" + std::to_string(i) + "]." + e.field(), e.what());
    }
  }
  return out;
}

std::pair<RunConfig, GridSpec> load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("base")) {
    throw ConfigError("base", "grid config needs a \"base\" run config");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "base" && it.key() != "grid") throw ConfigError(it.key(), "unknown key");
  }
  RunConfig base;
  try {
    base = parse_run_config(doc["base"]);
  } catch (const ConfigError& e) {
    throw ConfigError("base." + e.field(), e.what());
  }
  GridSpec g;
  json gdef = {{"lo", g.lo}, {"hi", g.hi}, {"factor", g.factor}};
  const json gj = merge_section(doc.value("grid", json()), gdef, "grid");
  g.lo = positive(gj["lo"], "grid.lo");
  g.hi = positive(gj["hi"], "grid.hi");
  g.factor = positive(gj["factor"], "grid.factor");
  return {base, g};
}

}  // namespace pfsign
