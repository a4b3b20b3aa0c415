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

#ifndef PFSIGN_SOS_HPP
#define PFSIGN_SOS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pfsign/numeric.hpp"
#include "pfsign/objective.hpp"
#include "pfsign/oracle.hpp"
#include "pfsign/trace.hpp"

namespace pfsign {

struct ExtraStepResult {
  enum class Status { decreased, at_optimum, exhausted };

  DenseVector x0;
  double f_minus1 = kNaN;
  double f0 = kNaN;
  double tau_final = kNaN;
  int halvings = 0;
  bool f_decreased = false;
  Status status = Status::decreased;
};

/// Probes x^{-1} +/- tau e with e = sign(g^{-1}), halving tau from tau_s
/// until the better side strictly lowers f. Returns x^{-1} unchanged when
/// e = 0 (status at_optimum) or when max_halvings halvings all fail
/// (status exhausted). Throws std::invalid_argument if tau_s <= 0.
ExtraStepResult extra_step(const Objective& obj, const DenseVector& x_minus1, double tau_s,
                           int max_halvings = 60);
/// Same, with the direction taken from a precomputed gradient estimate and
/// value calls metered on the oracle.
ExtraStepResult extra_step(const GradientOracle& oracle, const DenseVector& x_minus1,
                           const DenseVector& g_minus1, double tau_s, int max_halvings = 60);

/// Statistics of one fixed-step launch and the fixed-point target
/// phi = n_t / d_t. A divergent launch has phi = 0 and n_t = NaN.
struct PhiEvaluation {
  double gamma = kNaN;
  double n_t = kNaN;
  double d_t = kNaN;
  double zeta = kNaN;
  double phi = kNaN;
  bool divergent = false;
  std::uint64_t launch = 0;
  std::shared_ptr<const Trace> trace;
};

/// Builds a PhiEvaluation from a finished launch. 0/0 gives phi = 0.
PhiEvaluation phi_from_trace(double gamma, std::shared_ptr<const Trace> trace);

struct PhiOptions {
  std::size_t T = 100;
  /// false starts the launch directly at x_start (no probing move).
  bool extra_step = true;
  double tau_s = 1.0;
  int max_halvings = 60;
  std::size_t eval_every = 1;
};

/// Runs Sign-SGD at fixed gamma from x^{-1} and reports phi(gamma).
PhiEvaluation evaluate_phi(const GradientOracle& oracle, const DenseVector& x_minus1, double gamma,
                           const PhiOptions& opt, std::uint64_t launch = 0);

using PhiFn = std::function<PhiEvaluation(double gamma, std::uint64_t launch)>;

enum class BisectionKind { infinite_early, lo_early, converged_lo, converged_hi };

std::string to_string(BisectionKind k);

/// State after one loop iteration, for invariant auditing.
struct BisectionStep {
  double lo = kNaN;
  double hi = kNaN;
  double mid = kNaN;
  double phi_lo = kNaN;
  double phi_hi = kNaN;
  bool invariants_hold = false;
};

struct BisectionOutcome {
  BisectionKind kind = BisectionKind::infinite_early;
  double gamma0 = kNaN;  // NaN for infinite_early
  int launches = 0;
  std::vector<PhiEvaluation> evaluations;
  std::vector<BisectionStep> steps;
  /// Final interval and its evaluations (converged outcomes only).
  double lo_star = kNaN;
  double hi_star = kNaN;
  PhiEvaluation eval_lo;
  PhiEvaluation eval_hi;
  int invariant_violations = 0;

  bool converged() const noexcept {
    return kind == BisectionKind::converged_lo || kind == BisectionKind::converged_hi;
  }
  /// The evaluation at gamma0 (lo or hi, or the single lo probe).
  const PhiEvaluation& eval_at_gamma0() const noexcept {
    return kind == BisectionKind::converged_hi ? eval_hi : eval_lo;
  }
};

/// Geometric bisection for gamma = phi(gamma) on [gamma_lo, gamma_hi]. Probes
/// hi first, then lo, then midpoints while hi > 2 lo. Launch ids count up
/// from 0. Throws std::invalid_argument unless 0 < gamma_lo < gamma_hi.
BisectionOutcome bisection(const PhiFn& phi, double gamma_lo, double gamma_hi);

struct SosParams {
  std::size_t T = 100;
  double gamma_s = 1e-6;
  int k = 4;
  double tau_s = 1.0;
  int max_halvings = 60;
  std::size_t eval_every = 1;
};

struct SosResult {
  Trace trace;
  BisectionOutcome outcome;
  /// Probe launches plus the final run.
  int total_launches = 0;
};

/// Bisection over [gamma_s, 2^(2^k) gamma_s], then a final launch from
/// x^{-1} at the returned step. An infinite early termination throws
/// ConfigError("method.k") with the measured phi(gamma_hi). k must be in
/// [1, 9].
SosResult sos_sign_sgd(const GradientOracle& oracle, const DenseVector& x_minus1,
                       const SosParams& p);

struct SosSteepestParams {
  std::size_t T = 100;
  double c_s = 1.0;
  int k = 4;
  double tau_s = 1.0;
  int max_halvings = 60;
};

/// Probing move x^{-1} -> x^0 (same rule as the Sign-SGD pre-step) and the
/// ratio ||grad(x^0) - grad(x^{-1})||_1 / ||x^0 - x^{-1}||_inf.
struct SteepestProbe {
  ExtraStepResult step;
  double l_minus1 = kNaN;
};

SteepestProbe steepest_probe(const GradientOracle& oracle, const DenseVector& x_minus1,
                             double tau_s = 1.0, int max_halvings = 60);

/// Smallest double above 1 / L^{-1}: an upper c bound that cannot terminate
/// infinitely, since phi(c) <= 1 / L^{-1} for every launch.
double steepest_entry_bound(const SteepestProbe& probe) noexcept;

/// phi(c) = 1 / max(L^{-1}, local ratios of a launch at c) over [c_s / 2^(2^k),
/// c_s]; the final run from x^0 uses c_0 / 2.
SosResult sos_steepest(const GradientOracle& oracle, const DenseVector& x_minus1,
                       const SosSteepestParams& p);

}  // namespace pfsign

#endif  // PFSIGN_SOS_HPP
