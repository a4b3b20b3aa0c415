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

#include "pfsign/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "pfsign/distributed.hpp"
#include "pfsign/errors.hpp"
#include "pfsign/harness.hpp"
#include "pfsign/libsvm.hpp"
#include "pfsign/objective.hpp"
#include "pfsign/optimizers.hpp"
#include "pfsign/rng.hpp"
#include "pfsign/sos.hpp"
#include "pfsign/synthetic.hpp"

namespace pfsign {

namespace {

// Quadratic fixture shared by the synthetic criteria.
constexpr std::size_t kQuadDim = 10;
constexpr std::uint64_t kQuadSeed = 42;
constexpr double kQuadCondition = 10.0;
// Small enough that gamma_hi = 2^16 * 1e-6 exceeds (f(x^-1) - f*) / ||grad f(x^0)||_1,
// which the search needs to enter with k = 4.
constexpr double kStartRadius = 0.1;

constexpr double kSlack = 1e-9;

// Step grids for the tuned baselines, all with ratio 10^(1/4).
constexpr double kGridFactor = 1.7782794100389228;
// Wide enough that the tuned optimum is interior on both fixtures.
constexpr double kGridLo = 1e-5, kGridHi = 100.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g6(double v) { return fmt("%.6g", v); }

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

// Runs `n` independent jobs on the OpenMP pool. A job that throws leaves its
// message in the returned vector.
std::vector<std::string> parallel_jobs(std::size_t n, const std::function<void(std::size_t)>& job) {
  std::vector<std::string> errors(n);
  const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  return errors;
}

std::size_t count_errors(const std::vector<std::string>& errs, std::string* first) {
  std::size_t n = 0;
  for (const auto& e : errs) {
    if (e.empty()) continue;
    if (n++ == 0 && first != nullptr) *first = e;
  }
  return n;
}

struct SosJob {
  std::size_t T = 0;
  std::uint64_t seed = 0;
  std::string dataset;  // empty for the quadratic
  std::optional<SosResult> result;
  double delta_star = kNaN;
  double g0_l1 = kNaN;
};

struct Fig1Panel {
  std::string dataset;
  Trace alias, vanilla;
  GridResult sign_grid, norm_grid;
  std::optional<SosResult> sos, steepest;
  std::string sos_error, steepest_error;
};

// Lazily built fixtures and the runs several criteria share.
class Context {
 public:
  explicit Context(std::filesystem::path fixture_dir) : fixture_dir_(std::move(fixture_dir)) {
    for (const char* name : {"a9a", "w8a"}) {
      const auto p = fixture_dir_ / (std::string(name) + ".libsvm");
      if (!std::filesystem::exists(p)) throw Error("missing fixture " + p.string());
    }
    quad_ = std::make_shared<const SyntheticQuadratic>(
        make_quadratic(kQuadDim, kQuadSeed, kQuadCondition));
    quad_obj_ = std::make_shared<QuadraticObjective>(quad_);
  }

  const SyntheticQuadratic& quad() const { return *quad_; }
  const Objective& quad_obj() const { return *quad_obj_; }
  DenseVector quad_start(std::uint64_t seed) const {
    return random_start(*quad_, seed, kStartRadius);
  }
  const std::filesystem::path& fixture_dir() const { return fixture_dir_; }

  std::shared_ptr<const LibsvmDataset> dataset(const std::string& name, LabelScheme scheme) {
    const std::string key = name + (scheme == LabelScheme::pm_one ? "+-" : "01");
    auto it = data_.find(key);
    if (it != data_.end()) return it->second;
    auto ds = std::make_shared<const LibsvmDataset>(
        normalize_labels(load_libsvm(fixture_dir_ / (name + ".libsvm")), scheme));
    data_[key] = ds;
    return ds;
  }

  std::shared_ptr<const Objective> logistic(const std::string& name, double l2 = 0.0) {
    return std::make_shared<LogisticObjective>(dataset(name, LabelScheme::pm_one), l2);
  }

  std::vector<SosJob>& theorem1_runs(double* secs) { return sos_runs(c1_, c1_secs_, {100, 500, 2000}, secs); }
  std::vector<SosJob>& rate_runs(double* secs) { return sos_runs(c6_, c6_secs_, {100, 1000, 10000}, secs); }
  std::vector<Fig1Panel>& fig1_runs(double* secs);

 private:
  std::vector<SosJob>& sos_runs(std::optional<std::vector<SosJob>>& cache, double& cache_secs,
                                const std::vector<std::size_t>& horizons, double* secs);

  std::filesystem::path fixture_dir_;
  std::shared_ptr<const SyntheticQuadratic> quad_;
  std::shared_ptr<const Objective> quad_obj_;
  std::map<std::string, std::shared_ptr<const LibsvmDataset>> data_;
  std::optional<std::vector<SosJob>> c1_, c6_;
  double c1_secs_ = 0.0, c6_secs_ = 0.0;
  std::optional<std::vector<Fig1Panel>> c5_;
  double c5_secs_ = 0.0;
};

std::vector<SosJob>& Context::sos_runs(std::optional<std::vector<SosJob>>& cache,
                                       double& cache_secs, const std::vector<std::size_t>& horizons,
                                       double* secs) {
  if (!cache) {
    const auto t0 = Clock::now();
    std::vector<SosJob> jobs;
    for (std::size_t T : horizons) {
      for (std::uint64_t s = 1; s <= 20; ++s) jobs.push_back({T, s, "", std::nullopt});
    }
    const OracleConfig oc;  // exact
    parallel_jobs(jobs.size(), [&](std::size_t i) {
      SosJob& j = jobs[i];
      const GradientOracle oracle(*quad_obj_, oc);
      SosParams p;
      p.T = j.T;
      p.gamma_s = 1e-6;
      p.k = 4;
      j.result = sos_sign_sgd(oracle, quad_start(j.seed), p);
      const Trace& tr = j.result->trace;
      j.delta_star = tr.at(-1)->f - quad_->f_star;
      j.g0_l1 = tr.at(0)->grad_l1;
    });
    cache = std::move(jobs);
    cache_secs = seconds_since(t0);
  }
  *secs = cache_secs;
  return *cache;
}

RunConfig fig1_config(const std::string& dataset, const nlohmann::json& method) {
  nlohmann::json doc = {
      {"tag", method["name"]},
      {"T", 2000},
      {"seed", 0},
      {"eval_every", 1},
      {"problem", {{"kind", "logistic"}, {"dataset", "fixture:" + dataset}}},
      {"method", method}};
  return parse_run_config(doc);
}

std::vector<Fig1Panel>& Context::fig1_runs(double* secs) {
  if (!c5_) {
    const auto t0 = Clock::now();
    std::vector<Fig1Panel> panels;
    for (const char* name : {"a9a", "w8a"}) {
      Fig1Panel p;
      p.dataset = name;
      const RunConfig alias_cfg =
          fig1_config(name, {{"name", "alias"}, {"option", "II"}, {"f_tilde", 0.0}});
      p.alias = execute(alias_cfg, fixture_dir_).trace;
      p.vanilla =
          execute(fig1_config(name, {{"name", "sign_sgd"}, {"gamma", "inv_sqrt_T"}}), fixture_dir_)
              .trace;
      p.sign_grid = grid_tune(fig1_config(name, {{"name", "sign_sgd"}}),
                              {kGridLo, kGridHi, kGridFactor}, fixture_dir_);
      p.norm_grid = grid_tune(fig1_config(name, {{"name", "normalized_sgd"}}),
                              {kGridLo, kGridHi, kGridFactor}, fixture_dir_);
      auto search = [&](const nlohmann::json& method, std::optional<SosResult>& out,
                        std::string& err) {
        try {
          RunResult r = execute(fig1_config(name, method), fixture_dir_);
          out = SosResult{std::move(r.trace), std::move(*r.bisection), r.launches};
        } catch (const ConfigError& e) {
          err = e.what();
        }
      };
      search({{"name", "sos_sign_sgd"}, {"gamma_s", 1e-6}, {"k", 4}}, p.sos, p.sos_error);
      search({{"name", "sos_steepest"}, {"c_s", "entry_bound"}, {"k", 4}}, p.steepest,
             p.steepest_error);
      panels.push_back(std::move(p));
    }
    c5_ = std::move(panels);
    c5_secs_ = seconds_since(t0);
  }
  *secs = c5_secs_;
  return *c5_;
}

// ---------------------------------------------------------------------------

CriterionResult theorem1(Context& ctx) {
  CriterionResult r{1, "theorem1", false, "", 0.0, 5.0};
  double run_secs = 0.0;
  const auto t0 = Clock::now();
  auto& jobs = ctx.theorem1_runs(&run_secs);
  const double L = ctx.quad().linf_bound;
  std::ostringstream d;
  std::size_t failures = 0, missing = 0;
  std::string first_error;
  std::map<std::size_t, std::pair<double, double>> worst;  // T -> (lhs, rhs) at max ratio
  for (const SosJob& j : jobs) {
    if (!j.result) {
      ++missing;
      continue;
    }
    const double lhs = j.result->trace.avg_grad_l1();
    const double T = static_cast<double>(j.T);
    const double rhs = 6.0 * std::sqrt(j.delta_star * L / T) + 3.0 * j.g0_l1 / T;
    if (!(lhs <= rhs + kSlack)) ++failures;
    auto& w = worst[j.T];
    if (w.second == 0.0 || lhs / rhs > w.first / w.second) w = {lhs, rhs};
  }
  for (const auto& [T, lr] : worst) {
    d << "T=" << T << " worst lhs=" << g6(lr.first) << " rhs=" << g6(lr.second) << "; ";
  }
  d << "violations=" << failures << "/" << jobs.size();
  if (missing > 0) d << ", search failed on " << missing << " runs";
  r.pass = failures == 0 && missing == 0;
  r.detail = d.str();
  r.seconds = run_secs + seconds_since(t0);
  return r;
}

CriterionResult alias_sequence(Context& ctx) {
  CriterionResult r{2, "alias_sequence", false, "", 0.0, 10.0};
  const auto t0 = Clock::now();
  constexpr std::size_t kSeeds = 100;
  std::vector<std::size_t> mono(kSeeds, 0), above(kSeeds, 0), checked(kSeeds, 0);
  std::vector<double> max_ratio(kSeeds, 0.0);
  const auto errs = parallel_jobs(kSeeds, [&](std::size_t i) {
    const GradientOracle oracle(ctx.quad_obj(), OracleConfig{});
    const DenseVector x0 = ctx.quad_start(i + 1);
    const double delta = ctx.quad_obj().value(x0) - ctx.quad().f_star;
    AliasParams p;
    p.T = 1000;
    p.option = AliasOption::I;
    p.d0 = 0.1 * delta;
    const Trace tr = alias_run(oracle, x0, p);
    double prev = -std::numeric_limits<double>::infinity();
    for (const TraceRecord& rec : tr.records) {
      if (std::isnan(rec.d)) continue;
      ++checked[i];
      if (rec.d < prev) ++mono[i];
      if (rec.d > delta) ++above[i];
      max_ratio[i] = std::max(max_ratio[i], rec.d / delta);
      prev = rec.d;
    }
    if (tr.divergent) ++mono[i];
  });
  std::string err;
  const std::size_t n_err = count_errors(errs, &err);
  std::size_t m = 0, a = 0, c = 0;
  double mr = 0.0;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    m += mono[i];
    a += above[i];
    c += checked[i];
    mr = std::max(mr, max_ratio[i]);
  }
  r.pass = m == 0 && a == 0 && n_err == 0 && c >= kSeeds * 1000;
  r.detail = "checked " + std::to_string(c) + " iterates over " + std::to_string(kSeeds) +
             " seeds; decreases=" + std::to_string(m) + " above_delta=" + std::to_string(a) +
             " max d/delta*=" + g6(mr);
  if (n_err > 0) r.detail += "; errors: " + err;
  r.seconds = seconds_since(t0);
  return r;
}

// Invariant audit of one converged bisection. Returns the number of failed checks.
std::size_t audit_bisection(const BisectionOutcome& b, double* worst_ratio) {
  std::size_t bad = 0;
  for (const BisectionStep& s : b.steps) {
    if (!(s.lo < s.phi_lo)) ++bad;
    if (!(s.hi > s.phi_hi)) ++bad;
  }
  const double ratio = b.hi_star / b.lo_star;
  *worst_ratio = std::max(*worst_ratio, ratio);
  if (!(ratio <= 2.0)) ++bad;
  const PhiEvaluation& e0 = b.eval_at_gamma0();
  const double lower = e0.n_t / (2.0 * b.eval_hi.d_t);
  const double upper = b.eval_lo.n_t / e0.d_t;
  if (!(lower <= b.gamma0)) ++bad;
  if (!(b.gamma0 <= upper)) ++bad;
  bad += static_cast<std::size_t>(b.invariant_violations);
  return bad;
}

CriterionResult bisection_invariants(Context& ctx) {
  CriterionResult r{3, "bisection_invariants", false, "", 0.0, 0.0};
  const auto t0 = Clock::now();
  double s1 = 0.0, s5 = 0.0;
  auto& c1 = ctx.theorem1_runs(&s1);
  auto& c5 = ctx.fig1_runs(&s5);
  std::vector<const BisectionOutcome*> outcomes;
  std::size_t not_converged = 0;
  for (const SosJob& j : c1) {
    if (!j.result) continue;
    outcomes.push_back(&j.result->outcome);
  }
  for (const Fig1Panel& p : c5) {
    if (p.sos) outcomes.push_back(&p.sos->outcome);
    if (p.steepest) outcomes.push_back(&p.steepest->outcome);
  }
  std::size_t audited = 0, bad = 0, steps = 0;
  double worst = 0.0;
  for (const BisectionOutcome* b : outcomes) {
    if (!b->converged()) {
      ++not_converged;
      continue;
    }
    ++audited;
    steps += b->steps.size();
    bad += audit_bisection(*b, &worst);
  }
  r.pass = bad == 0 && audited > 0;
  r.detail = "audited " + std::to_string(audited) + " converged searches (" +
             std::to_string(steps) + " loop iterations, " + std::to_string(not_converged) +
             " early exits skipped); violations=" + std::to_string(bad) +
             " max hi*/lo*=" + g6(worst);
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult extra_step_check(Context& ctx) {
  CriterionResult r{4, "extra_step", false, "", 0.0, 5.0};
  const auto t0 = Clock::now();
  const auto obj = ctx.logistic("a9a");
  constexpr std::size_t kStarts = 50;
  std::vector<int> halvings(kStarts, -1);
  std::vector<bool> ok(kStarts, false);
  const auto errs = parallel_jobs(kStarts, [&](std::size_t i) {
    Rng rng(derive_seed(2026, "EXTRA_STEP_START", i));
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseVector x(obj->dim());
    for (double& v : x) v = normal(rng);
    const ExtraStepResult es = extra_step(*obj, x, 1.0, 60);
    halvings[i] = es.halvings;
    ok[i] = es.status == ExtraStepResult::Status::decreased && es.f0 < es.f_minus1 &&
            es.halvings <= 60;
  });
  std::string err;
  const std::size_t n_err = count_errors(errs, &err);
  const auto n_ok = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), true));
  const int max_h = *std::max_element(halvings.begin(), halvings.end());
  r.pass = n_ok == kStarts && n_err == 0;
  r.detail = "decreased from " + std::to_string(n_ok) + "/" + std::to_string(kStarts) +
             " starts, max halvings=" + std::to_string(max_h);
  if (n_err > 0) r.detail += "; errors: " + err;
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult fig1(Context& ctx) {
  CriterionResult r{5, "fig1_ordering", false, "", 0.0, 60.0};
  double run_secs = 0.0;
  const auto t0 = Clock::now();
  auto& panels = ctx.fig1_runs(&run_secs);
  bool pass = true;
  std::ostringstream d;
  for (const Fig1Panel& p : panels) {
    const double a = p.alias.avg_grad_l1();
    const double v = p.vanilla.avg_grad_l1();
    const auto& sg = p.sign_grid;
    const double tuned = sg.runs[sg.best].trace.avg_grad_l1();
    const double steep = p.steepest ? p.steepest->trace.avg_grad_l1() : kNaN;
    const double norm = p.norm_grid.runs[p.norm_grid.best].trace.avg_grad_l1();
    const bool ok = !p.alias.divergent && p.steepest && a <= v && a <= 1.5 * tuned &&
                    steep > tuned && norm > tuned;
    pass = pass && ok;
    d << p.dataset << ": alias=" << g6(a) << " vanilla=" << g6(v) << " tuned_sign=" << g6(tuned)
      << " (gamma=" << g6(sg.grid[sg.best]) << ") alias/tuned=" << g6(a / tuned)
      << " sos_steepest=" << g6(steep) << " normalized=" << g6(norm);
    if (p.sos) d << " sos_sign=" << g6(p.sos->trace.avg_grad_l1());
    if (!p.steepest_error.empty()) d << " steepest search failed: " << p.steepest_error;
    d << (ok ? "" : " [order broken]") << "; ";
  }
  r.pass = pass;
  r.detail = d.str();
  r.seconds = run_secs + seconds_since(t0);
  return r;
}

CriterionResult rate(Context& ctx) {
  CriterionResult r{6, "rate_slope", false, "", 0.0, 30.0};
  double run_secs = 0.0;
  const auto t0 = Clock::now();
  auto& jobs = ctx.rate_runs(&run_secs);
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  std::size_t missing = 0;
  for (const SosJob& j : jobs) {
    if (!j.result) {
      ++missing;
      continue;
    }
    auto& a = acc[j.T];
    a.first += j.result->trace.min_grad_l1();
    a.second += 1;
  }
  std::vector<double> lx, ly;
  std::ostringstream d;
  for (const auto& [T, a] : acc) {
    const double mean = a.first / static_cast<double>(a.second);
    lx.push_back(std::log10(static_cast<double>(T)));
    ly.push_back(std::log10(mean));
    d << "T=" << T << " mean min ||grad||_1=" << g6(mean) << "; ";
  }
  double slope = kNaN;
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  d << "slope=" << g6(slope);
  if (missing > 0) d << ", search failed on " << missing << " runs";
  r.pass = missing == 0 && slope >= -1.2 && slope <= -0.4;
  r.detail = d.str();
  r.seconds = run_secs + seconds_since(t0);
  return r;
}

CriterionResult stochastic(Context& ctx) {
  CriterionResult r{7, "stochastic_neighborhood", false, "", 0.0, 60.0};
  const auto t0 = Clock::now();
  const std::vector<double> sigmas = {0.0, 0.1, 1.0};
  constexpr std::size_t kSeeds = 20;
  // Cases 0..2: fixed batch at each sigma; case 3: growing batch at sigma 1.
  struct Case {
    double sigma;
    BatchPolicy batch;
  };
  std::vector<Case> cases;
  for (double s : sigmas) cases.push_back({s, BatchPolicy::fixed});
  cases.push_back({1.0, BatchPolicy::growing});
  std::vector<double> crit(cases.size() * kSeeds, kNaN);
  const std::size_t d = ctx.quad().dim();
  const auto errs = parallel_jobs(crit.size(), [&](std::size_t i) {
    const Case& c = cases[i / kSeeds];
    const std::uint64_t seed = i % kSeeds + 1;
    OracleConfig oc;
    oc.mode = OracleMode::noisy;
    oc.batch = c.batch;
    oc.batch_size = 1;
    oc.seed = seed;
    oc.noise.sigma = DenseVector(d, c.sigma / static_cast<double>(d));
    const GradientOracle oracle(ctx.quad_obj(), oc);
    AliasParams p;
    p.T = 5000;
    p.option = AliasOption::II;
    p.f_tilde = ctx.quad().f_star;
    p.eval_every = 10;
    const Trace tr = alias_run(oracle, ctx.quad_start(seed), p);
    crit[i] = tr.divergent ? std::numeric_limits<double>::infinity() : tr.avg_grad_l1();
  });
  std::string err;
  const std::size_t n_err = count_errors(errs, &err);
  std::vector<double> mean(cases.size(), 0.0);
  for (std::size_t i = 0; i < crit.size(); ++i) mean[i / kSeeds] += crit[i] / kSeeds;
  const bool mono = mean[0] <= mean[1] && mean[1] <= mean[2];
  const double gain = mean[2] / mean[3];
  r.pass = n_err == 0 && mono && gain >= 2.0;
  std::ostringstream o;
  o << "mean criterion sigma_l1=0: " << g6(mean[0]) << ", 0.1: " << g6(mean[1])
    << ", 1.0: " << g6(mean[2]) << (mono ? " (monotone)" : " (NOT monotone)")
    << "; growing batch at 1.0: " << g6(mean[3]) << " gain=" << g6(gain) << "x";
  if (n_err > 0) o << "; errors: " << err;
  r.detail = o.str();
  r.seconds = seconds_since(t0);
  return r;
}

bool same_traces(const Trace& a, const Trace& b) {
  if (a.records.size() != b.records.size() || a.divergent != b.divergent) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const TraceRecord& x = a.records[i];
    const TraceRecord& y = b.records[i];
    if (x.t != y.t || !same_double(x.f, y.f) || !same_double(x.grad_l1, y.grad_l1) ||
        !same_double(x.gamma, y.gamma) || !same_double(x.oracle_l1, y.oracle_l1)) {
      return false;
    }
  }
  return a.x_final == b.x_final && same_double(a.n_t, b.n_t) && same_double(a.d_t, b.d_t);
}

CriterionResult distributed(Context& ctx) {
  CriterionResult r{8, "distributed_degeneracies", false, "", 0.0, 10.0};
  const auto t0 = Clock::now();
  const auto a9a = ctx.logistic("a9a");
  const Objective& quad = ctx.quad_obj();
  std::ostringstream d;

  // (a) one node equals the single-machine stochastic run.
  std::size_t single_bad = 0, single_runs = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (int variant = 0; variant < 2; ++variant) {
      const Objective& obj = variant == 0 ? *a9a : quad;
      OracleConfig oc;
      oc.mode = variant == 0 ? OracleMode::stochastic : OracleMode::noisy;
      oc.batch_size = 4;
      oc.seed = seed;
      if (variant == 1) oc.noise.sigma = DenseVector(obj.dim(), 0.3);
      const GradientOracle oracle(obj, oc);
      const DenseVector x0 = variant == 0 ? DenseVector(obj.dim()) : ctx.quad_start(seed);
      SignSgdParams sp;
      sp.T = 300;
      sp.schedule = StepSchedule::constant(variant == 0 ? 1e-2 : 1e-3);
      sp.extra_step = true;
      sp.eval_every = 10;
      const Trace single = sign_sgd_run(oracle, x0, sp);

      ClusterConfig cc;
      cc.nodes = 1;
      cc.seed = seed;
      cc.mode = oc.mode;
      cc.batch_size = oc.batch_size;
      cc.noise = oc.noise;
      const Cluster cluster(obj, cc);
      DistributedParams dp;
      dp.T = sp.T;
      dp.gamma = sp.schedule.base;
      dp.extra_step = true;
      dp.eval_every = sp.eval_every;
      const Trace dist = distributed_sign_sgd_run(cluster, x0, dp);
      ++single_runs;
      if (!same_traces(single, dist)) ++single_bad;
    }
  }
  d << "M=1 bit-identical " << (single_runs - single_bad) << "/" << single_runs << "; ";

  // (b) noiseless identical nodes follow exact Sign-SGD.
  double max_dev = 0.0;
  std::size_t len_bad = 0;
  for (std::size_t nodes : {2, 5, 8}) {
    for (int variant = 0; variant < 2; ++variant) {
      const Objective& obj = variant == 0 ? *a9a : quad;
      const DenseVector x0 = variant == 0 ? DenseVector(obj.dim()) : ctx.quad_start(nodes);
      const GradientOracle exact(obj, OracleConfig{});
      SignSgdParams sp;
      sp.T = 300;
      sp.schedule = StepSchedule::constant(variant == 0 ? 1e-2 : 1e-3);
      const Trace ref = sign_sgd_run(exact, x0, sp);
      ClusterConfig cc;
      cc.nodes = nodes;
      cc.seed = 7;
      cc.mode = OracleMode::noisy;
      cc.noise.sigma = DenseVector(obj.dim(), 0.0);
      const Cluster cluster(obj, cc);
      DistributedParams dp;
      dp.T = sp.T;
      dp.gamma = sp.schedule.base;
      dp.eval_every = 1;
      const Trace dist = distributed_sign_sgd_run(cluster, x0, dp);
      if (dist.records.size() != ref.records.size()) {
        ++len_bad;
        continue;
      }
      for (std::size_t i = 0; i < ref.records.size(); ++i) {
        max_dev = std::max(max_dev, std::abs(ref.records[i].f - dist.records[i].f));
      }
      max_dev = std::max(max_dev, linf_distance(ref.x_final, dist.x_final));
    }
  }
  const bool noiseless_ok = len_bad == 0 && max_dev <= 1e-12;
  d << "noiseless cluster max deviation=" << g6(max_dev) << "; ";

  // (c) vote properties against a direct count.
  Rng rng(derive_seed(99, "VOTE_TABLES"));
  std::uniform_int_distribution<int> entry(-1, 1);
  std::uniform_int_distribution<std::size_t> m_dist(1, 16), d_dist(1, 32);
  std::size_t vote_bad = 0;
  constexpr std::size_t kTables = 10000;
  for (std::size_t k = 0; k < kTables; ++k) {
    const std::size_t m = m_dist(rng), dim = d_dist(rng);
    std::vector<DenseVector> table(m, DenseVector(dim));
    for (auto& row : table) {
      for (double& v : row) v = entry(rng);
    }
    const VoteRecord v = majority_vote(table, Backend::serial);
    const VoteRecord v_omp = majority_vote(table, Backend::omp);
    std::vector<DenseVector> neg = table;
    for (auto& row : neg) {
      for (double& x : row) x = -x;
    }
    std::vector<DenseVector> perm = table;
    std::shuffle(perm.begin(), perm.end(), rng);
    const VoteRecord vn = majority_vote(neg);
    const VoteRecord vp = majority_vote(perm);
    bool ok = v.sign == v_omp.sign && v.sums == v_omp.sums && vp.sign == v.sign &&
              vp.sums == v.sums;
    for (std::size_t j = 0; j < dim && ok; ++j) {
      long direct = 0;
      for (const auto& row : table) direct += static_cast<long>(row[j]);
      const double s = direct > 0 ? 1.0 : (direct < 0 ? -1.0 : 0.0);
      ok = v.sums[j] == direct && v.sign[j] == s && vn.sign[j] == -s && vn.sums[j] == -direct;
    }
    if (!ok) ++vote_bad;
  }
  d << "vote tables failing=" << vote_bad << "/" << kTables;
  r.pass = single_bad == 0 && noiseless_ok && vote_bad == 0;
  r.detail = d.str();
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult descent(Context& ctx) {
  CriterionResult r{9, "descent_telemetry", false, "", 0.0, 0.0};
  const auto t0 = Clock::now();
  double s = 0.0;
  std::size_t checked = 0, bad = 0, untracked = 0, skipped = 0;
  double worst = -std::numeric_limits<double>::infinity();
  auto check = [&](const Trace& tr) {
    if (!tr.descent_tracked) {
      if (!tr.divergent) ++untracked;
      return;
    }
    ++checked;
    const double gap = tr.descent_lhs - tr.descent_rhs;
    worst = std::max(worst, gap);
    if (!(gap <= kSlack)) ++bad;
  };
  auto check_sos = [&](const SosResult& res) {
    check(res.trace);
    for (const PhiEvaluation& e : res.outcome.evaluations) {
      if (e.trace) check(*e.trace);
    }
  };
  for (const SosJob& j : ctx.theorem1_runs(&s)) {
    if (j.result) check_sos(*j.result);
  }
  for (const SosJob& j : ctx.rate_runs(&s)) {
    if (j.result) check_sos(*j.result);
  }
  for (const Fig1Panel& p : ctx.fig1_runs(&s)) {
    check(p.alias);
    check(p.vanilla);
    for (const RunResult& rr : p.sign_grid.runs) check(rr.trace);
    skipped += p.norm_grid.runs.size();  // not a sign method
    if (p.sos) check_sos(*p.sos);
    if (p.steepest) check_sos(*p.steepest);
  }
  r.pass = bad == 0 && untracked == 0 && checked > 0;
  r.detail = "checked " + std::to_string(checked) + " sign-type runs, violations=" +
             std::to_string(bad) + ", untracked=" + std::to_string(untracked) +
             ", max lhs-rhs=" + g6(worst) + " (" + std::to_string(skipped) +
             " normalized-SGD runs not applicable)";
  r.seconds = seconds_since(t0);
  return r;
}

double fd_rel_error(const Objective& obj, const DenseVector& x) {
  const DenseVector g = obj.grad(x);
  DenseVector fd(x.size());
  DenseVector y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    y[i] = x[i] + h;
    const double fp = obj.value(y);
    y[i] = x[i] - h;
    const double fm = obj.value(y);
    y[i] = x[i];
    fd[i] = (fp - fm) / (2.0 * h);
  }
  return norm_l2(g - fd) / std::max(norm_l2(g), 1e-300);
}

CriterionResult oracles(Context& ctx) {
  CriterionResult r{10, "gradient_oracles", false, "", 0.0, 5.0};
  const auto t0 = Clock::now();
  const auto logistic = ctx.logistic("a9a", 1e-3);
  const auto nllsq =
      std::make_shared<NllsqObjective>(ctx.dataset("a9a", LabelScheme::zero_one), 1e-3);
  const std::vector<std::pair<std::string, const Objective*>> objs = {
      {"logistic", logistic.get()}, {"nllsq", nllsq.get()}, {"quadratic", &ctx.quad_obj()}};
  constexpr std::size_t kPoints = 100;
  std::vector<double> err(objs.size() * kPoints, kNaN);
  const auto errs = parallel_jobs(err.size(), [&](std::size_t i) {
    const Objective& obj = *objs[i / kPoints].second;
    Rng rng(derive_seed(5, "FD_POINT", i));
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseVector x(obj.dim());
    for (double& v : x) v = normal(rng);
    err[i] = fd_rel_error(obj, x);
  });
  std::string e;
  const std::size_t n_err = count_errors(errs, &e);
  bool pass = n_err == 0;
  std::ostringstream d;
  for (std::size_t k = 0; k < objs.size(); ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < kPoints; ++i) {
      const double v = err[k * kPoints + i];
      worst = std::isnan(v) ? v : std::max(worst, v);
      if (!(v <= 1e-5)) pass = false;
    }
    d << objs[k].first << " max rel err=" << g6(worst) << "; ";
  }
  d << kPoints << " points each";
  if (n_err > 0) d << "; errors: " << e;
  r.pass = pass;
  r.detail = d.str();
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult steepest(Context& ctx) {
  CriterionResult r{11, "sos_steepest", false, "", 0.0, 5.0};
  const auto t0 = Clock::now();
  constexpr std::size_t kSeeds = 20;
  constexpr std::size_t kT = 1000;
  const double L = ctx.quad().linf_bound;
  std::vector<double> lhs(kSeeds, kNaN), rhs(kSeeds, kNaN);
  const auto errs = parallel_jobs(kSeeds, [&](std::size_t i) {
    const GradientOracle oracle(ctx.quad_obj(), OracleConfig{});
    const DenseVector xm1 = ctx.quad_start(i + 1);
    SosSteepestParams p;
    p.T = kT;
    p.k = 4;
    p.c_s = steepest_entry_bound(steepest_probe(oracle, xm1, p.tau_s));
    const SosResult res = sos_steepest(oracle, xm1, p);
    const double delta = res.trace.f0() - ctx.quad().f_star;
    lhs[i] = res.trace.avg_grad_l1_sq();
    rhs[i] = 8.0 * delta * L / static_cast<double>(kT);
  });
  std::string e;
  const std::size_t n_err = count_errors(errs, &e);
  std::size_t bad = 0;
  double worst = 0.0;
  std::size_t wi = 0;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    if (!(lhs[i] <= rhs[i] + kSlack)) ++bad;
    if (lhs[i] / rhs[i] > worst) {
      worst = lhs[i] / rhs[i];
      wi = i;
    }
  }
  r.pass = bad == 0 && n_err == 0;
  r.detail = "violations=" + std::to_string(bad) + "/" + std::to_string(kSeeds) +
             "; worst lhs=" + g6(lhs[wi]) + " rhs=" + g6(rhs[wi]);
  if (n_err > 0) r.detail += "; errors: " + e;
  r.seconds = seconds_since(t0);
  return r;
}

using CriterionFn = CriterionResult (*)(Context&);

const std::map<int, CriterionFn>& criteria() {
  static const std::map<int, CriterionFn> m = {
      {1, theorem1}, {2, alias_sequence}, {3, bisection_invariants}, {4, extra_step_check},
      {5, fig1},     {6, rate},           {7, stochastic},           {8, distributed},
      {9, descent},  {10, oracles},       {11, steepest}};
  return m;
}

const std::vector<std::pair<std::string, std::vector<int>>>& suites() {
  static const std::vector<std::pair<std::string, std::vector<int>>> s = {
      {"theorem1", {1}},    {"alias", {2}},      {"bisection", {3}},  {"extra_step", {4}},
      {"fig1", {5}},        {"rate", {6}},       {"stochastic", {7}}, {"distributed", {8}},
      {"descent", {9}},     {"oracles", {10}},   {"steepest", {11}},  {"lemmas", {2, 3, 4}},
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}}};
  return s;
}

}  // namespace

bool AcceptanceReport::all_pass() const noexcept {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

std::vector<std::string> acceptance_suites() {
  std::vector<std::string> out;
  for (const auto& [name, ids] : suites()) out.push_back(name);
  return out;
}

std::vector<int> suite_criteria(const std::string& suite) {
  for (const auto& [name, ids] : suites()) {
    if (name == suite) return ids;
  }
  std::string list;
  for (const auto& n : acceptance_suites()) list += (list.empty() ? "" : ", ") + n;
  throw Error("unknown suite '" + suite + "'; available suites: " + list);
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << "criterion " << r.id << " " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " ("
    << r.detail << ") [" << fmt("%.2f", r.seconds) << " s";
  if (r.limit_seconds > 0.0) o << " / limit " << g6(r.limit_seconds) << " s";
  o << "]";
  return o.str();
}

AcceptanceReport run_acceptance(const std::string& suite, const std::filesystem::path& fixture_dir,
                                std::ostream& log) {
  const std::vector<int> ids = suite_criteria(suite);
  Context ctx(fixture_dir);
  AcceptanceReport report;
  for (int id : ids) {
    CriterionResult r;
    try {
      r = criteria().at(id)(ctx);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion";
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    if (r.limit_seconds > 0.0 && r.seconds > r.limit_seconds) {
      r.pass = false;
      r.detail += "; over time budget";
    }
    log << format_result(r) << std::endl;
    report.results.push_back(std::move(r));
  }
  return report;
}

}  // namespace pfsign
