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

#ifndef PFSIGN_OPTIMIZERS_HPP
#define PFSIGN_OPTIMIZERS_HPP

#include <cstddef>
#include <cstdint>
#include <string>

#include "pfsign/numeric.hpp"
#include "pfsign/oracle.hpp"
#include "pfsign/trace.hpp"

namespace pfsign {

/// |f| above this (or non-finite f) ends a run as divergent.
inline constexpr double kDivergenceThreshold = 1e100;

struct StepSchedule {
  enum class Kind { constant, cosine };
  Kind kind = Kind::constant;
  double base = 1.0;
  double warmup_frac = 0.0;
  double floor_frac = 1.0;

  static StepSchedule constant(double base) { return {Kind::constant, base, 0.0, 1.0}; }
  static StepSchedule cosine(double base, double warmup_frac, double floor_frac) {
    return {Kind::cosine, base, warmup_frac, floor_frac};
  }
};

/// Step size at iteration t of T. Cosine: linear warmup from 0 over
/// floor(warmup_frac * T) steps, then cosine decay reaching floor_frac * base
/// at t = T - 1. Throws std::invalid_argument on bad fractions.
double apply_schedule(const StepSchedule& s, std::size_t t, std::size_t T);

struct SignSgdParams {
  std::size_t T = 100;
  StepSchedule schedule = StepSchedule::constant(1e-3);
  /// Treat x_start as x^{-1} and make the probing first move.
  bool extra_step = false;
  double tau_s = 1.0;
  int max_halvings = 60;
  /// Decoupled: x <- x - gamma * weight_decay * x before the sign step.
  double weight_decay = 0.0;
  /// Distinguishes launches so stochastic probes see independent samples.
  std::uint64_t launch = 0;
  /// Exact-gradient telemetry period for non-exact oracles.
  std::size_t eval_every = 1;
  std::string method = "sign_sgd";
};

/// x^{t+1} = x^t - gamma^t sign(g^t). Fills n_t, d_t and zeta from the
/// oracle gradients the run actually used.
Trace sign_sgd_run(const GradientOracle& oracle, const DenseVector& x_start,
                   const SignSgdParams& p);

enum class AliasOption { I, II };

struct AliasParams {
  std::size_t T = 100;
  AliasOption option = AliasOption::II;
  /// Option I: initial estimate of the optimality gap.
  double d0 = 0.0;
  /// Option II: lower bound on the optimal value.
  double f_tilde = 0.0;
  /// Magnitude of the first move when the curvature sum is still empty.
  /// NaN selects 1e-3 * (1 + ||x^0||_inf).
  double bootstrap = kNaN;
  /// Known smoothness constant added under the root (0 = parameter-free).
  double l_known = 0.0;
  std::uint64_t launch = 0;
  std::size_t eval_every = 1;
  std::string method = "alias";
};

double default_bootstrap(const DenseVector& x0) noexcept;

/// Per-iteration step gamma^t = lambda^t sqrt(gap estimate), lambda^t from the
/// running sum of local l1/linf gradient ratios. With a non-exact oracle the
/// ratio for step t is measured with one fresh realization at both ends.
Trace alias_run(const GradientOracle& oracle, const DenseVector& x0, const AliasParams& p);

struct AliasAdamParams {
  std::size_t T = 100;
  StepSchedule schedule = StepSchedule::constant(1.0);
  double beta1 = 0.9;
  double beta2 = 0.999;
  double d_init = 1e-6;
  double weight_decay = 0.0;
  double eps = 1e-16;
  std::uint64_t launch = 0;
  std::size_t eval_every = 1;
  std::string method = "alias_adam";
};

/// Momentum variant. Coordinate i moves by gamma^t d^t |m_i| / sqrt(v_i + eps)
/// against sign(m_i).
Trace alias_adam_run(const GradientOracle& oracle, const DenseVector& x_minus1,
                     const DenseVector& x0, const AliasAdamParams& p);

struct SteepestParams {
  std::size_t T = 100;
  double c = 1e-3;
  /// Ratio measured before x^0 (the pre-start probe); seeds the running max.
  double l_init = kNaN;
  std::string method = "steepest";
};

/// x^{t+1} = x^t - c ||g^t||_1 sign(g^t). Records every local ratio and the
/// running maximum in Trace::l_max. Needs an exact oracle.
Trace steepest_run(const GradientOracle& oracle, const DenseVector& x0, const SteepestParams& p);

struct NormalizedSgdParams {
  std::size_t T = 100;
  StepSchedule schedule = StepSchedule::constant(1e-3);
  std::uint64_t launch = 0;
  std::size_t eval_every = 1;
  std::string method = "normalized_sgd";
};

/// x^{t+1} = x^t - gamma^t g / ||g||_2 (no move when g = 0).
Trace normalized_sgd_run(const GradientOracle& oracle, const DenseVector& x0,
                         const NormalizedSgdParams& p);

bool is_divergent_value(double f) noexcept;

}  // namespace pfsign

#endif  // PFSIGN_OPTIMIZERS_HPP
