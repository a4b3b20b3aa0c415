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

#include "pfsign/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pfsign/errors.hpp"
#include "pfsign/optimizers.hpp"
#include "pfsign/rng.hpp"
#include "run_recorder.hpp"

namespace pfsign {

Cluster::Cluster(const Objective& obj, ClusterConfig cfg)
    : cfg_(std::move(cfg)), server_(obj, OracleConfig{}) {
  if (cfg_.nodes == 0) throw std::invalid_argument("cluster needs at least one node");
  const std::size_t n = obj.num_samples();
  if (cfg_.disjoint_shards && cfg_.nodes > n) {
    throw std::invalid_argument("more nodes than rows for disjoint shards");
  }
  for (std::size_t j = 0; j < cfg_.nodes; ++j) {
    std::vector<std::size_t> rows;
    if (cfg_.disjoint_shards) {
      for (std::size_t i = n * j / cfg_.nodes; i < n * (j + 1) / cfg_.nodes; ++i) rows.push_back(i);
    }
    const std::uint64_t seed = j == 0 ? cfg_.seed : derive_seed(cfg_.seed, "NODE", j);
    OracleConfig oc{cfg_.mode, cfg_.batch, cfg_.batch_size, cfg_.noise, seed};
    nodes_.emplace_back(obj, oc, rows);
    shards_.push_back(std::move(rows));
    seeds_.push_back(seed);
  }
}

VoteRecord majority_vote(std::span<const DenseVector> signs, Backend backend) {
  if (signs.empty()) throw std::invalid_argument("majority vote needs at least one node");
  const std::size_t d = signs.front().size();
  for (const DenseVector& s : signs) {
    if (s.size() != d) throw DimensionError("vote vectors differ in length");
    for (double v : s) {
      if (v != 1.0 && v != -1.0 && v != 0.0) {
        throw std::invalid_argument("vote entries must be -1, 0 or 1");
      }
    }
  }
  VoteRecord rec;
  rec.sums.resize(d);
  kernels::vote_tally(backend, signs, rec.sums);
  rec.sign = DenseVector(d);
  for (std::size_t j = 0; j < d; ++j) {
    rec.sign[j] = rec.sums[j] > 0 ? 1.0 : (rec.sums[j] < 0 ? -1.0 : 0.0);
  }
  return rec;
}

namespace {

struct NodeRound {
  std::vector<DenseVector> grads;
  std::vector<DenseVector> signs;
  double mean_l1 = 0.0;
};

NodeRound node_round(const Cluster& c, const DenseVector& x, std::uint64_t launch,
                     std::int64_t t) {
  NodeRound r;
  const std::size_t M = c.size();
  r.grads.reserve(M);
  r.signs.reserve(M);
  for (std::size_t j = 0; j < M; ++j) {
    const GradientOracle& o = c.node(j);
    r.grads.push_back(o.grad(x, o.realization(launch, t)));
    r.signs.push_back(sign_vec(r.grads.back()));
    r.mean_l1 += norm_l1(r.grads.back());
  }
  r.mean_l1 /= static_cast<double>(M);
  return r;
}

struct CallBase {
  std::uint64_t v = 0, g = 0;
};

CallBase node_calls(const Cluster& c) {
  CallBase b;
  for (std::size_t j = 0; j < c.size(); ++j) {
    b.v += c.node(j).counter().value_calls.load();
    b.g += c.node(j).counter().grad_calls.load();
  }
  return b;
}

void add_node_calls(Trace& tr, const Cluster& c, CallBase before) {
  const CallBase after = node_calls(c);
  tr.value_calls += after.v - before.v;
  tr.grad_calls += after.g - before.g;
}

}  // namespace

Trace distributed_sign_sgd_run(const Cluster& c, const DenseVector& x_start,
                               const DistributedParams& p) {
  if (p.T < 1) throw std::invalid_argument("T must be >= 1");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("step size must be > 0");
  const std::size_t M = c.size();
  const std::size_t d = x_start.size();
  const CallBase before = node_calls(c);
  detail::RunRecorder rec(c.server(), p.method, p.eval_every);
  DenseVector x = x_start;

  double f_ref = kNaN;
  if (p.extra_step) {
    const NodeRound nr = node_round(c, x, p.launch, -1);
    TraceRecord* R = rec.observe(-1, x, nullptr, true);
    if (R == nullptr) {
      Trace tr = rec.finish(x);
      add_node_calls(tr, c, before);
      return tr;
    }
    R->oracle_l1 = nr.mean_l1;
    f_ref = R->f;
    const VoteRecord vote = majority_vote(nr.signs);
    rec.trace().bits_up += M * d;
    rec.trace().bits_down += d;
    ExtraStepResult es = extra_step(c.server(), x, vote.sign, p.tau_s, p.max_halvings);
    if (es.status == ExtraStepResult::Status::at_optimum) rec.add_flag("extra_step_at_optimum");
    if (es.status == ExtraStepResult::Status::exhausted) rec.add_flag("extra_step_exhausted");
    R = &rec.trace().records.back();
    R->gamma = es.f_decreased ? es.tau_final : 0.0;
    R->step = linf_distance(es.x0, x);
    x = std::move(es.x0);
  }

  // Node-local accumulators: sum of ||g_j^{t+1} - g_j^t||_1 and min ||g_j^t||_1.
  std::vector<double> local_sum(M, 0.0);
  std::vector<double> local_min(M, std::numeric_limits<double>::infinity());
  std::vector<DenseVector> g_prev;
  DenseVector x_prev;
  double lmax = kNaN;
  for (std::size_t t = 0; t <= p.T; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    NodeRound nr = node_round(c, x, p.launch, ti);
    TraceRecord* R = rec.observe(ti, x, nullptr, t == p.T);
    if (R == nullptr) break;
    R->oracle_l1 = nr.mean_l1;
    if (t == 0 && std::isnan(f_ref)) f_ref = R->f;
    double mean_diff = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      local_min[j] = std::min(local_min[j], norm_l1(nr.grads[j]));
      if (t > 0) {
        const double diff = l1_distance(nr.grads[j], g_prev[j]);
        local_sum[j] += diff;
        mean_diff += diff;
      }
    }
    if (t > 0) {
      mean_diff /= static_cast<double>(M);
      const double dx = linf_distance(x, x_prev);
      if (dx > 0.0) {
        R->local_l = mean_diff / dx;
        lmax = std::isnan(lmax) ? R->local_l : std::max(lmax, R->local_l);
      }
    }
    if (t == p.T) break;

    const VoteRecord vote = majority_vote(nr.signs);
    rec.trace().bits_up += M * d;
    rec.trace().bits_down += d;
    R->gamma = p.gamma;
    x_prev = x;
    for (std::size_t i = 0; i < d; ++i) x[i] -= p.gamma * vote.sign[i];
    R->step = linf_distance(x, x_prev);
    g_prev = std::move(nr.grads);
  }

  Trace& tr = rec.trace();
  tr.l_max = lmax;
  if (!tr.divergent) {
    // One scalar per node: its local sum plus its local minimum.
    double dsum = 0.0, zsum = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      dsum += local_sum[j] + local_min[j];
      zsum += local_min[j];
    }
    tr.scalar_uploads += M;
    tr.n_t = f_ref - tr.min_f();
    tr.d_t = dsum / static_cast<double>(M);
    tr.zeta = zsum / static_cast<double>(M);
  }
  Trace out = rec.finish(x);
  add_node_calls(out, c, before);
  return out;
}

PhiEvaluation distributed_phi(const Cluster& c, const DenseVector& x_minus1, double gamma,
                              const PhiOptions& opt, std::uint64_t launch) {
  DistributedParams p;
  p.T = opt.T;
  p.gamma = gamma;
  p.extra_step = opt.extra_step;
  p.tau_s = opt.tau_s;
  p.max_halvings = opt.max_halvings;
  p.launch = launch;
  p.eval_every = opt.eval_every;
  p.method = "dist_sos_probe";
  auto tr = std::make_shared<const Trace>(distributed_sign_sgd_run(c, x_minus1, p));
  PhiEvaluation e = phi_from_trace(gamma, std::move(tr));
  e.launch = launch;
  return e;
}

SosResult distributed_sos_sign_sgd(const Cluster& c, const DenseVector& x_minus1,
                                   const SosParams& p) {
  if (p.k < 1 || p.k > 9) throw ConfigError("method.k", "must be in [1, 9]");
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
      [&](double g, std::uint64_t launch) { return distributed_phi(c, x_minus1, g, opt, launch); },
      p.gamma_s, hi);
  if (res.outcome.kind == BisectionKind::infinite_early) {
    throw ConfigError("method.k", "early infinite termination: gamma_hi = " + std::to_string(hi) +
                                      " is not above phi(gamma_hi); raise k or gamma_s");
  }
  DistributedParams dp;
  dp.T = p.T;
  dp.gamma = res.outcome.gamma0;
  dp.extra_step = true;
  dp.tau_s = p.tau_s;
  dp.max_halvings = p.max_halvings;
  dp.launch = static_cast<std::uint64_t>(res.outcome.launches);
  dp.eval_every = p.eval_every;
  dp.method = "dist_sos_sign_sgd";
  res.trace = distributed_sign_sgd_run(c, x_minus1, dp);
  res.total_launches = res.outcome.launches + 1;
  return res;
}

Trace distributed_alias_run(const Cluster& c, const DenseVector& x0,
                            const DistributedAliasParams& p) {
  if (p.T < 1) throw std::invalid_argument("T must be >= 1");
  if (p.l_known < 0.0) throw std::invalid_argument("l_known must be >= 0");
  const double bootstrap = std::isnan(p.bootstrap) ? default_bootstrap(x0) : p.bootstrap;
  if (!(bootstrap > 0.0)) throw std::invalid_argument("bootstrap must be > 0");
  const std::size_t M = c.size();
  const std::size_t d = x0.size();
  const CallBase before = node_calls(c);
  detail::RunRecorder rec(c.server(), p.method, p.eval_every);

  DenseVector x = x0;
  NodeRound nr = node_round(c, x, p.launch, 0);
  double lsum = 0.0;
  double gap = kNaN;
  for (std::size_t t = 0; t <= p.T; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    TraceRecord* R = rec.observe(ti, x, nullptr, t == p.T);
    if (R == nullptr) break;
    R->oracle_l1 = nr.mean_l1;
    if (t == 0) {
      gap = R->f - p.f_tilde;
      if (!(gap > 0.0)) rec.add_flag("nonpositive_gap");
      gap = std::max(gap, 0.0);
    }
    if (t == p.T) break;

    const double denom = p.l_known + lsum;
    double gamma = bootstrap;
    if (denom > 0.0) {
      R->lambda = 1.0 / std::sqrt(denom);
      gamma = R->lambda * std::sqrt(gap);
    } else {
      rec.add_flag(t == 0 ? "bootstrap" : "bootstrap_repeat");
    }
    R->gamma = gamma;

    const VoteRecord vote = majority_vote(nr.signs);
    rec.trace().bits_up += M * d;
    rec.trace().bits_down += d;
    DenseVector x_next = x;
    for (std::size_t i = 0; i < d; ++i) x_next[i] -= gamma * vote.sign[i];
    const double dx = linf_distance(x_next, x);
    R->step = dx;

    // Each node queries its next realization at both ends and uploads a ratio.
    NodeRound next;
    next.grads.reserve(M);
    next.signs.reserve(M);
    double mean_ratio = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const GradientOracle& o = c.node(j);
      const Realization r_next = o.realization(p.launch, ti + 1);
      DenseVector g_next = o.grad(x_next, r_next);
      const DenseVector g_here = o.grad(x, r_next);
      if (dx > 0.0) mean_ratio += l1_distance(g_next, g_here) / dx;
      next.mean_l1 += norm_l1(g_next);
      next.signs.push_back(sign_vec(g_next));
      next.grads.push_back(std::move(g_next));
    }
    next.mean_l1 /= static_cast<double>(M);
    rec.trace().scalar_uploads += M;
    if (dx > 0.0) {
      mean_ratio /= static_cast<double>(M);
      R->local_l = mean_ratio;
      lsum += mean_ratio;
    }
    x = std::move(x_next);
    nr = std::move(next);
  }
  Trace out = rec.finish(x);
  add_node_calls(out, c, before);
  return out;
}

}  // namespace pfsign
