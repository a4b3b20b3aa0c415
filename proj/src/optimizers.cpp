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

#include "pfsign/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pfsign/errors.hpp"
#include "pfsign/sos.hpp"
#include "run_recorder.hpp"

namespace pfsign {

bool is_divergent_value(double f) noexcept {
  return !std::isfinite(f) || std::abs(f) > kDivergenceThreshold;
}

double apply_schedule(const StepSchedule& s, std::size_t t, std::size_t T) {
  if (s.kind == StepSchedule::Kind::constant) return s.base;
  if (!(s.warmup_frac >= 0.0 && s.warmup_frac < 1.0)) {
    throw std::invalid_argument("warmup_frac must be in [0, 1)");
  }
  if (!(s.floor_frac > 0.0 && s.floor_frac <= 1.0)) {
    throw std::invalid_argument("floor_frac must be in (0, 1]");
  }
  const auto W = static_cast<std::size_t>(std::floor(s.warmup_frac * static_cast<double>(T)));
  if (t < W) return s.base * static_cast<double>(t) / static_cast<double>(W);
  const double span = T > W + 1 ? static_cast<double>(T - 1 - W) : 0.0;
  const double p = span > 0.0 ? std::min(1.0, static_cast<double>(t - W) / span) : 1.0;
  const double lo = s.floor_frac * s.base;
  return lo + (s.base - lo) * 0.5 * (1.0 + std::cos(std::numbers::pi * p));
}

double default_bootstrap(const DenseVector& x0) noexcept { return 1e-3 * (1.0 + norm_linf(x0)); }

namespace {

void require_steps(std::size_t T) {
  if (T < 1) throw std::invalid_argument("T must be >= 1");
}

void sign_step(DenseVector& x, double gamma, const DenseVector& dir) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= gamma * sign_of(dir[i]);
}

void decay(DenseVector& x, double gamma, double wd) {
  if (wd == 0.0) return;
  const double keep = gamma * wd;
  for (double& v : x) v -= keep * v;
}

}  // namespace

Trace sign_sgd_run(const GradientOracle& oracle, const DenseVector& x_start,
                   const SignSgdParams& p) {
  require_steps(p.T);
  if (p.schedule.kind == StepSchedule::Kind::constant && !(p.schedule.base > 0.0)) {
    throw std::invalid_argument("Sign-SGD step size must be > 0");
  }
  const bool exact = oracle.mode() == OracleMode::exact;
  detail::RunRecorder rec(oracle, p.method, p.eval_every);
  DenseVector x = x_start;

  double f_ref = kNaN;
  if (p.extra_step) {
    const DenseVector g = oracle.grad(x, oracle.realization(p.launch, -1));
    TraceRecord* R = rec.observe(-1, x, exact ? &g : nullptr, true);
    if (R == nullptr) return rec.finish(x);
    R->oracle_l1 = norm_l1(g);
    f_ref = R->f;
    ExtraStepResult es = extra_step(oracle, x, g, p.tau_s, p.max_halvings);
    if (es.status == ExtraStepResult::Status::at_optimum) rec.add_flag("extra_step_at_optimum");
    if (es.status == ExtraStepResult::Status::exhausted) rec.add_flag("extra_step_exhausted");
    R = &rec.trace().records.back();
    R->gamma = es.f_decreased ? es.tau_final : 0.0;
    R->step = linf_distance(es.x0, x);
    x = std::move(es.x0);
  }

  DenseVector g_prev, x_prev;
  double gamma_prev = 0.0;
  double dsum = 0.0;
  double zeta = std::numeric_limits<double>::infinity();
  double lhs = 0.0;
  double weighted_diff = 0.0;
  double lmax = kNaN;
  for (std::size_t t = 0; t <= p.T; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    const DenseVector g = oracle.grad(x, oracle.realization(p.launch, ti));
    TraceRecord* R = rec.observe(ti, x, exact ? &g : nullptr, t == p.T);
    if (R == nullptr) break;
    R->oracle_l1 = norm_l1(g);
    zeta = std::min(zeta, R->oracle_l1);
    if (t == 0 && std::isnan(f_ref)) f_ref = R->f;
    if (t > 0) {
      const double diff = l1_distance(g, g_prev);
      dsum += diff;
      weighted_diff += gamma_prev * diff;
      const double dx = linf_distance(x, x_prev);
      if (dx > 0.0) {
        R->local_l = diff / dx;
        lmax = std::isnan(lmax) ? R->local_l : std::max(lmax, R->local_l);
      }
    }
    if (t == p.T) break;

    const double gamma = apply_schedule(p.schedule, t, p.T);
    R->gamma = gamma;
    lhs += gamma * R->oracle_l1;
    x_prev = x;
    decay(x, gamma, p.weight_decay);
    sign_step(x, gamma, g);
    R->step = linf_distance(x, x_prev);
    g_prev = g;
    gamma_prev = gamma;
  }

  Trace& tr = rec.trace();
  tr.l_max = lmax;
  if (!tr.divergent) {
    tr.n_t = f_ref - tr.min_f();
    tr.d_t = dsum + zeta;
    tr.zeta = zeta;
    if (exact && p.weight_decay == 0.0) {
      tr.descent_tracked = true;
      tr.descent_lhs = lhs;
      tr.descent_rhs = tr.f0() - tr.records.back().f + weighted_diff;
    }
  }
  return rec.finish(x);
}

Trace alias_run(const GradientOracle& oracle, const DenseVector& x0, const AliasParams& p) {
  require_steps(p.T);
  if (p.l_known < 0.0) throw std::invalid_argument("l_known must be >= 0");
  const double bootstrap = std::isnan(p.bootstrap) ? default_bootstrap(x0) : p.bootstrap;
  if (!(bootstrap > 0.0)) throw std::invalid_argument("bootstrap must be > 0");
  if (p.option == AliasOption::I && !(p.d0 > 0.0)) {
    throw std::invalid_argument("Option I needs d0 > 0");
  }

  const bool exact = oracle.mode() == OracleMode::exact;
  detail::RunRecorder rec(oracle, p.method, p.eval_every);
  if (!exact && p.option == AliasOption::I) rec.add_flag("option_I_stochastic_no_theory");

  DenseVector x = x0;
  DenseVector g = oracle.grad(x, oracle.realization(p.launch, 0));
  double lsum = 0.0;
  double d = p.d0;
  double dtilde = 0.0;
  double gap = kNaN;
  double lhs = 0.0, weighted_diff = 0.0;

  for (std::size_t t = 0; t <= p.T; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    TraceRecord* R = rec.observe(ti, x, exact ? &g : nullptr, t == p.T);
    if (R == nullptr) break;
    R->oracle_l1 = norm_l1(g);
    if (t == 0 && p.option == AliasOption::II) {
      gap = R->f - p.f_tilde;
      if (!(gap > 0.0)) rec.add_flag("nonpositive_gap");
      gap = std::max(gap, 0.0);
    }
    if (t == p.T) break;

    const double denom = p.l_known + lsum;
    double gamma = 0.0;
    if (denom > 0.0) {
      const double lambda = 1.0 / std::sqrt(denom);
      R->lambda = lambda;
      gamma = lambda * std::sqrt(p.option == AliasOption::I ? d : gap);
    } else {
      gamma = bootstrap;
      rec.add_flag(t == 0 ? "bootstrap" : "bootstrap_repeat");
    }
    if (p.option == AliasOption::I) R->d = d;
    R->gamma = gamma;

    DenseVector x_next = x;
    sign_step(x_next, gamma, g);
    const double dx = linf_distance(x_next, x);
    R->step = dx;

    // Two queries per iteration: the next realization at both ends.
    const Realization r_next = oracle.realization(p.launch, ti + 1);
    DenseVector g_next = oracle.grad(x_next, r_next);
    const DenseVector g_here = exact ? g : oracle.grad(x, r_next);
    const double diff = l1_distance(g_next, g_here);
    if (dx > 0.0) {
      const double L = diff / dx;
      R->local_l = L;
      lsum += L;
    }
    if (exact) {
      lhs += gamma * R->oracle_l1;
      weighted_diff += gamma * diff;
    }
    if (p.option == AliasOption::I) {
      dtilde += gamma * inner(g_next, sign_vec(g));
      d = std::max(d, dtilde);
    }
    x = std::move(x_next);
    g = std::move(g_next);
  }

  Trace& tr = rec.trace();
  if (!tr.divergent && exact) {
    tr.descent_tracked = true;
    tr.descent_lhs = lhs;
    tr.descent_rhs = tr.f0() - tr.records.back().f + weighted_diff;
  }
  if (!tr.divergent && p.option == AliasOption::I) tr.records.back().d = d;
  return rec.finish(x);
}

Trace alias_adam_run(const GradientOracle& oracle, const DenseVector& x_minus1,
                     const DenseVector& x0, const AliasAdamParams& p) {
  require_steps(p.T);
  if (!(p.d_init > 0.0)) throw std::invalid_argument("d_init must be > 0");
  if (!(p.beta1 > 0.0 && p.beta1 < 1.0) || !(p.beta2 > 0.0 && p.beta2 < 1.0)) {
    throw std::invalid_argument("betas must lie in (0, 1)");
  }
  if (x_minus1.size() != x0.size()) throw DimensionError("x_minus1 and x0 differ in length");
  const bool exact = oracle.mode() == OracleMode::exact;
  detail::RunRecorder rec(oracle, p.method, p.eval_every);

  const std::size_t n = x0.size();
  DenseVector g_prev = oracle.grad(x_minus1, oracle.realization(p.launch, -1));
  DenseVector x = x0;
  DenseVector m(n), v(n);
  double r = 0.0;
  double d_prev = p.d_init;
  const double sb2 = std::sqrt(p.beta2);

  for (std::size_t t = 0; t <= p.T; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    const DenseVector g = oracle.grad(x, oracle.realization(p.launch, ti));
    TraceRecord* R = rec.observe(ti, x, exact ? &g : nullptr, t == p.T);
    if (R == nullptr) break;
    R->oracle_l1 = norm_l1(g);
    if (t == p.T) break;

    r = sb2 * r + (1.0 - sb2) * d_prev * inner(g, sign_vec(g_prev));
    const double d = std::max(d_prev, r);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * d * g[i];
      v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * d * d * g[i] * g[i];
    }
    const double gamma = apply_schedule(p.schedule, t, p.T);
    const DenseVector x_old = x;
    decay(x, gamma, p.weight_decay);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = d * std::abs(m[i]) / std::sqrt(v[i] + p.eps);
      x[i] -= gamma * scale * sign_of(m[i]);
    }
    R->r = r;
    R->d = d;
    R->gamma = gamma;
    R->step = linf_distance(x, x_old);
    d_prev = d;
    g_prev = g;
  }
  return rec.finish(x);
}

Trace steepest_run(const GradientOracle& oracle, const DenseVector& x0, const SteepestParams& p) {
  require_steps(p.T);
  if (!(p.c > 0.0)) throw std::invalid_argument("steepest descent needs c > 0");
  if (oracle.mode() != OracleMode::exact) {
    throw std::invalid_argument("steepest descent needs an exact oracle");
  }
  detail::RunRecorder rec(oracle, p.method, 1);
  DenseVector x = x0;
  DenseVector g_prev, x_prev;
  double lmax = p.l_init;
  double gamma_prev = 0.0;
  double lhs = 0.0;
  double weighted_diff = 0.0;
  const Realization none;
  for (std::size_t t = 0; t <= p.T; ++t) {
    const DenseVector g = oracle.grad(x, none);
    TraceRecord* R = rec.observe(static_cast<std::int64_t>(t), x, &g, true);
    if (R == nullptr) break;
    R->oracle_l1 = norm_l1(g);
    if (t > 0) {
      const double diff = l1_distance(g, g_prev);
      weighted_diff += gamma_prev * diff;
      const double dx = linf_distance(x, x_prev);
      if (dx > 0.0) {
        R->local_l = diff / dx;
        lmax = std::isnan(lmax) ? R->local_l : std::max(lmax, R->local_l);
      }
    }
    if (t == p.T) break;
    const double gamma = p.c * R->oracle_l1;
    R->gamma = gamma;
    lhs += gamma * R->oracle_l1;
    x_prev = x;
    sign_step(x, gamma, g);
    R->step = linf_distance(x, x_prev);
    g_prev = g;
    gamma_prev = gamma;
  }
  Trace& tr = rec.trace();
  tr.l_max = lmax;
  if (!tr.divergent) {
    // A steepest step is a sign step of length c ||g||_1.
    tr.descent_tracked = true;
    tr.descent_lhs = lhs;
    tr.descent_rhs = tr.f0() - tr.records.back().f + weighted_diff;
  }
  return rec.finish(x);
}

Trace normalized_sgd_run(const GradientOracle& oracle, const DenseVector& x0,
                         const NormalizedSgdParams& p) {
  require_steps(p.T);
  const bool exact = oracle.mode() == OracleMode::exact;
  detail::RunRecorder rec(oracle, p.method, p.eval_every);
  DenseVector x = x0;
  for (std::size_t t = 0; t <= p.T; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    const DenseVector g = oracle.grad(x, oracle.realization(p.launch, ti));
    TraceRecord* R = rec.observe(ti, x, exact ? &g : nullptr, t == p.T);
    if (R == nullptr) break;
    R->oracle_l1 = norm_l1(g);
    if (t == p.T) break;
    const double gamma = apply_schedule(p.schedule, t, p.T);
    R->gamma = gamma;
    const double n2 = norm_l2(g);
    if (n2 > 0.0) {
      const DenseVector x_old = x;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= gamma * (g[i] / n2);
      R->step = linf_distance(x, x_old);
    } else {
      R->step = 0.0;
    }
  }
  return rec.finish(x);
}

}  // namespace pfsign
