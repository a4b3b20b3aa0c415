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

#include "pfsign/sos.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pfsign/errors.hpp"
#include "pfsign/optimizers.hpp"

namespace pfsign {

namespace {

template <typename ValueFn>
ExtraStepResult extra_step_impl(ValueFn value, const DenseVector& x_minus1,
                                const DenseVector& g_minus1, double tau_s, int max_halvings) {
  if (!(tau_s > 0.0)) throw std::invalid_argument("tau_s must be > 0");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
  ExtraStepResult res;
  res.x0 = x_minus1;
  res.f_minus1 = value(x_minus1);
  res.f0 = res.f_minus1;
  const DenseVector e = sign_vec(g_minus1);
  if (all_zero(e)) {
    res.status = ExtraStepResult::Status::at_optimum;
    return res;
  }
  double tau = tau_s;
  for (int h = 0; h <= max_halvings; ++h, tau *= 0.5) {
    DenseVector plus = x_minus1, minus = x_minus1;
    axpy(tau, e, plus);
    axpy(-tau, e, minus);
    const double fp = value(plus);
    const double fm = value(minus);
    // Prefer the descent side on ties; NaN never wins.
    const bool take_minus = !(fp < fm);
    const double best = take_minus ? fm : fp;
    if (best < res.f_minus1) {
      res.x0 = take_minus ? std::move(minus) : std::move(plus);
      res.f0 = best;
      res.tau_final = tau;
      res.halvings = h;
      res.f_decreased = true;
      res.status = ExtraStepResult::Status::decreased;
      return res;
    }
  }
  res.halvings = max_halvings;
  res.status = ExtraStepResult::Status::exhausted;
  return res;
}

}  // namespace

ExtraStepResult extra_step(const Objective& obj, const DenseVector& x_minus1, double tau_s,
                           int max_halvings) {
  return extra_step_impl([&](const DenseVector& x) { return obj.value(x); }, x_minus1,
                         obj.grad(x_minus1), tau_s, max_halvings);
}

ExtraStepResult extra_step(const GradientOracle& oracle, const DenseVector& x_minus1,
                           const DenseVector& g_minus1, double tau_s, int max_halvings) {
  return extra_step_impl([&](const DenseVector& x) { return oracle.value(x); }, x_minus1,
                         g_minus1, tau_s, max_halvings);
}

PhiEvaluation phi_from_trace(double gamma, std::shared_ptr<const Trace> trace) {
  PhiEvaluation e;
  e.gamma = gamma;
  e.divergent = trace->divergent;
  if (e.divergent) {
    e.phi = 0.0;
  } else {
    e.n_t = trace->n_t;
    e.d_t = trace->d_t;
    e.zeta = trace->zeta;
    if (e.d_t > 0.0) {
      e.phi = e.n_t / e.d_t;
    } else {
      e.phi = e.n_t > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
  }
  e.trace = std::move(trace);
  return e;
}

PhiEvaluation evaluate_phi(const GradientOracle& oracle, const DenseVector& x_minus1, double gamma,
                           const PhiOptions& opt, std::uint64_t launch) {
  SignSgdParams p;
  p.T = opt.T;
  p.schedule = StepSchedule::constant(gamma);
  p.extra_step = opt.extra_step;
  p.tau_s = opt.tau_s;
  p.max_halvings = opt.max_halvings;
  p.launch = launch;
  p.eval_every = opt.eval_every;
  p.method = "sos_probe";
  auto tr = std::make_shared<const Trace>(sign_sgd_run(oracle, x_minus1, p));
  PhiEvaluation e = phi_from_trace(gamma, std::move(tr));
  e.launch = launch;
  return e;
}

std::string to_string(BisectionKind k) {
  switch (k) {
    case BisectionKind::infinite_early: return "infinite_early";
    case BisectionKind::lo_early: return "lo_early";
    case BisectionKind::converged_lo: return "converged_lo";
    case BisectionKind::converged_hi: return "converged_hi";
  }
  return "unknown";
}

BisectionOutcome bisection(const PhiFn& phi, double lo, double hi) {
  if (!(lo > 0.0 && lo < hi && std::isfinite(hi))) {
    throw std::invalid_argument("bisection needs 0 < gamma_lo < gamma_hi < inf");
  }
  BisectionOutcome out;
  std::uint64_t launch = 0;
  auto eval = [&](double g) {
    out.evaluations.push_back(phi(g, launch++));
    ++out.launches;
    return out.evaluations.back();
  };

  PhiEvaluation e_hi = eval(hi);
  if (hi <= e_hi.phi) {
    out.kind = BisectionKind::infinite_early;
    out.eval_hi = e_hi;
    return out;
  }
  PhiEvaluation e_lo = eval(lo);
  if (lo > e_lo.phi) {
    out.kind = BisectionKind::lo_early;
    out.gamma0 = lo;
    out.lo_star = lo;
    out.eval_lo = e_lo;
    out.eval_hi = e_hi;
    return out;
  }

  while (hi > 2.0 * lo) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    PhiEvaluation e = eval(mid);
    if (mid <= e.phi) {
      lo = mid;
      e_lo = std::move(e);
    } else {
      hi = mid;
      e_hi = std::move(e);
    }
    BisectionStep s{lo, hi, mid, e_lo.phi, e_hi.phi, lo < e_lo.phi && hi > e_hi.phi};
    if (!s.invariants_hold) ++out.invariant_violations;
    out.steps.push_back(s);
  }

  out.lo_star = lo;
  out.hi_star = hi;
  out.eval_lo = e_lo;
  out.eval_hi = e_hi;
  if (e_hi.n_t <= e_lo.n_t * e_hi.phi / hi) {
    out.kind = BisectionKind::converged_hi;
    out.gamma0 = hi;
  } else {
    out.kind = BisectionKind::converged_lo;
    out.gamma0 = lo;
  }
  return out;
}

namespace {

void check_k(int k) {
  if (k < 1 || k > 9) throw ConfigError("method.k", "must be in [1, 9]");
}

}  // namespace

SosResult sos_sign_sgd(const GradientOracle& oracle, const DenseVector& x_minus1,
                       const SosParams& p) {
  check_k(p.k);
  if (!(p.gamma_s > 0.0)) throw ConfigError("method.gamma_s", "must be > 0");
  const double hi = std::ldexp(p.gamma_s, 1 << p.k);
  if (!std::isfinite(hi)) throw ConfigError("method.k", "gamma_s * 2^(2^k) overflows");

  PhiOptions opt;
  opt.T = p.T;
  opt.tau_s = p.tau_s;
  opt.max_halvings = p.max_halvings;
  opt.eval_every = p.eval_every;
  SosResult res;
  res.outcome = bisection(
      [&](double g, std::uint64_t launch) { return evaluate_phi(oracle, x_minus1, g, opt, launch); },
      p.gamma_s, hi);
  if (res.outcome.kind == BisectionKind::infinite_early) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "early infinite termination: phi(gamma_hi) = " << res.outcome.eval_hi.phi
        << " >= gamma_hi = " << hi
        << "; gamma_hi must reach (f(x^-1) - f*) / ||grad f(x^0)||_1, raise k or gamma_s";
    throw ConfigError("method.k", msg.str());
  }

  SignSgdParams sp;
  sp.T = p.T;
  sp.schedule = StepSchedule::constant(res.outcome.gamma0);
  sp.extra_step = true;
  sp.tau_s = p.tau_s;
  sp.max_halvings = p.max_halvings;
  sp.launch = static_cast<std::uint64_t>(res.outcome.launches);
  sp.eval_every = p.eval_every;
  sp.method = "sos_sign_sgd";
  res.trace = sign_sgd_run(oracle, x_minus1, sp);
  res.total_launches = res.outcome.launches + 1;
  return res;
}

SteepestProbe steepest_probe(const GradientOracle& oracle, const DenseVector& x_minus1,
                             double tau_s, int max_halvings) {
  const Realization none;
  SteepestProbe probe;
  const DenseVector g_m1 = oracle.grad(x_minus1, none);
  probe.step = extra_step(oracle, x_minus1, g_m1, tau_s, max_halvings);
  if (probe.step.f_decreased) {
    const DenseVector g0 = oracle.grad(probe.step.x0, none);
    probe.l_minus1 = l1_distance(g0, g_m1) / linf_distance(probe.step.x0, x_minus1);
  }
  return probe;
}

double steepest_entry_bound(const SteepestProbe& probe) noexcept {
  // phi(c) <= 1 / L^{-1} for every c, with equality when no launch ratio
  // exceeds the probe's. One ulp above keeps the entry test strict.
  return std::nextafter(1.0 / probe.l_minus1, std::numeric_limits<double>::infinity());
}

SosResult sos_steepest(const GradientOracle& oracle, const DenseVector& x_minus1,
                       const SosSteepestParams& p) {
  check_k(p.k);
  if (!(p.c_s > 0.0) || !std::isfinite(p.c_s)) throw ConfigError("method.c_s", "must be > 0");
  if (oracle.mode() != OracleMode::exact) {
    throw ConfigError("oracle.mode", "SOS steepest descent needs the exact oracle");
  }
  const SteepestProbe probe = steepest_probe(oracle, x_minus1, p.tau_s, p.max_halvings);
  if (!probe.step.f_decreased || !(probe.l_minus1 > 0.0)) {
    throw Error("steepest probe did not move: start is stationary or the probe failed");
  }
  const DenseVector& x0 = probe.step.x0;

  auto phi = [&](double c, std::uint64_t launch) {
    SteepestParams sp;
    sp.T = p.T;
    sp.c = c;
    sp.l_init = probe.l_minus1;
    sp.method = "sos_steepest_probe";
    auto tr = std::make_shared<const Trace>(steepest_run(oracle, x0, sp));
    PhiEvaluation e;
    e.gamma = c;
    e.launch = launch;
    e.divergent = tr->divergent;
    if (e.divergent) {
      e.phi = 0.0;
    } else {
      e.n_t = 1.0;
      e.d_t = tr->l_max;
      e.phi = 1.0 / tr->l_max;
    }
    e.trace = std::move(tr);
    return e;
  };

  SosResult res;
  res.outcome = bisection(phi, std::ldexp(p.c_s, -(1 << p.k)), p.c_s);
  if (res.outcome.kind == BisectionKind::infinite_early) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "early infinite termination at c_hi = " << p.c_s
        << "; a c_hi above 1/L^-1 = " << 1.0 / probe.l_minus1 << " is needed";
    throw ConfigError("method.c_s", msg.str());
  }

  SteepestParams sp;
  sp.T = p.T;
  sp.c = res.outcome.gamma0 / 2.0;
  sp.l_init = probe.l_minus1;
  sp.method = "sos_steepest";
  res.trace = steepest_run(oracle, x0, sp);
  TraceRecord pre;
  pre.t = -1;
  pre.f = probe.step.f_minus1;
  pre.grad_l1 = norm_l1(oracle.eval_grad(x_minus1));
  pre.gamma = probe.step.tau_final;
  pre.step = linf_distance(x0, x_minus1);
  res.trace.records.insert(res.trace.records.begin(), pre);
  res.total_launches = res.outcome.launches + 1;
  return res;
}

}  // namespace pfsign
