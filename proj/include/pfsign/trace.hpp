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

#ifndef PFSIGN_TRACE_HPP
#define PFSIGN_TRACE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pfsign/numeric.hpp"

namespace pfsign {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One iterate. Fields a method does not produce stay NaN.
struct TraceRecord {
  std::int64_t t = 0;
  double f = kNaN;
  /// Exact ||grad f(x^t)||_1; NaN where the evaluation oracle was skipped.
  double grad_l1 = kNaN;
  /// l1 norm of the gradient estimate the algorithm actually used.
  double oracle_l1 = kNaN;
  /// Step size taken from x^t (NaN at the last point).
  double gamma = kNaN;
  double d = kNaN;
  double lambda = kNaN;
  double r = kNaN;
  /// Local ratio ||dG||_1 / ||dx||_inf measured on the step into x^t.
  double local_l = kNaN;
  /// ||x^{t+1} - x^t||_inf actually moved from x^t.
  double step = kNaN;
};

struct Trace {
  std::string method;
  std::vector<TraceRecord> records;
  bool divergent = false;
  std::vector<std::string> flags;

  // Launch statistics for the stepsize search (NaN when not computed).
  double n_t = kNaN;
  double d_t = kNaN;
  double zeta = kNaN;

  // Descent-lemma telemetry: sum gamma ||g^t||_1 versus
  // f(x^0) - f(x^T) + sum gamma ||g^{t+1} - g^t||_1. Exact oracle only.
  bool descent_tracked = false;
  double descent_lhs = 0.0;
  double descent_rhs = 0.0;

  /// Running max of local ratios, including the pre-start probe when present.
  double l_max = kNaN;

  std::uint64_t value_calls = 0;
  std::uint64_t grad_calls = 0;
  std::uint64_t eval_calls = 0;
  std::uint64_t bits_up = 0;
  std::uint64_t bits_down = 0;
  std::uint64_t scalar_uploads = 0;

  DenseVector x_final;

  /// Number of steps T (records with 0 <= t < last t).
  std::size_t steps() const noexcept;
  /// (1/T) sum_{t=0}^{T-1} grad_l1, skipping NaN entries in both sum and count.
  double avg_grad_l1() const noexcept;
  /// Same over squared norms.
  double avg_grad_l1_sq() const noexcept;
  /// Minimum recorded ||grad f||_1 over t >= 0.
  double min_grad_l1() const noexcept;
  double min_f() const noexcept;
  /// f at t = 0, or NaN.
  double f0() const noexcept;
  const TraceRecord* at(std::int64_t t) const noexcept;
  bool has_flag(const std::string& f) const;
};

}  // namespace pfsign

#endif  // PFSIGN_TRACE_HPP
