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

// Bookkeeping shared by the optimizer loops: per-iterate records, exact
// telemetry, divergence detection and oracle call deltas.

#ifndef PFSIGN_SRC_RUN_RECORDER_HPP
#define PFSIGN_SRC_RUN_RECORDER_HPP

#include <cstddef>
#include <cstdint>
#include <string>

#include "pfsign/optimizers.hpp"
#include "pfsign/oracle.hpp"
#include "pfsign/trace.hpp"

namespace pfsign::detail {

class RunRecorder {
 public:
  /// `eval` supplies f and the exact telemetry gradient; it may differ from
  /// the oracle the algorithm uses (the distributed server, for instance).
  RunRecorder(const GradientOracle& eval, std::string method, std::size_t eval_every)
      : eval_(eval), eval_every_(eval_every == 0 ? 1 : eval_every),
        v0_(eval.counter().value_calls.load()), g0_(eval.counter().grad_calls.load()),
        e0_(eval.counter().eval_calls.load()) {
    trace_.method = std::move(method);
  }

  /// Records x^t. `exact_g` is the exact gradient if the caller already has
  /// it. Returns nullptr (and flags the trace) when f has blown up.
  TraceRecord* observe(std::int64_t t, const DenseVector& x, const DenseVector* exact_g,
                       bool force_eval) {
    TraceRecord rec;
    rec.t = t;
    rec.f = eval_.value(x);
    if (is_divergent_value(rec.f) || !all_finite(x)) {
      trace_.divergent = true;
      add_flag("divergent");
      return nullptr;
    }
    if (exact_g != nullptr) {
      rec.grad_l1 = norm_l1(*exact_g);
    } else if (force_eval || t < 0 || static_cast<std::size_t>(t) % eval_every_ == 0) {
      rec.grad_l1 = norm_l1(eval_.eval_grad(x));
    }
    trace_.records.push_back(rec);
    return &trace_.records.back();
  }

  void add_flag(const std::string& f) {
    if (!trace_.has_flag(f)) trace_.flags.push_back(f);
  }

  Trace& trace() noexcept { return trace_; }

  /// Adds the call deltas of `o` (the algorithm's oracle) and of the eval
  /// oracle when distinct.
  Trace finish(DenseVector x_final, const GradientOracle* algo = nullptr,
               std::uint64_t av0 = 0, std::uint64_t ag0 = 0) {
    trace_.x_final = std::move(x_final);
    trace_.value_calls += eval_.counter().value_calls.load() - v0_;
    trace_.grad_calls += eval_.counter().grad_calls.load() - g0_;
    trace_.eval_calls += eval_.counter().eval_calls.load() - e0_;
    if (algo != nullptr && algo != &eval_) {
      trace_.value_calls += algo->counter().value_calls.load() - av0;
      trace_.grad_calls += algo->counter().grad_calls.load() - ag0;
    }
    return std::move(trace_);
  }

 private:
  const GradientOracle& eval_;
  std::size_t eval_every_;
  std::uint64_t v0_, g0_, e0_;
  Trace trace_;
};

}  // namespace pfsign::detail

#endif  // PFSIGN_SRC_RUN_RECORDER_HPP
