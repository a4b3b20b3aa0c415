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

#ifndef PFSIGN_ORACLE_HPP
#define PFSIGN_ORACLE_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pfsign/numeric.hpp"
#include "pfsign/objective.hpp"

namespace pfsign {

enum class OracleMode { exact, stochastic, noisy };

/// How many samples a realization at iteration t uses: a constant, t + 1, or
/// every row in order (which reproduces the exact gradient bit for bit).
enum class BatchPolicy { fixed, growing, full };

std::string to_string(OracleMode m);
std::string to_string(BatchPolicy p);

/// Per-coordinate standard deviations of the additive Gaussian noise.
struct NoiseSpec {
  DenseVector sigma;
};

/// One draw of the sampling randomness. The same realization may be applied
/// at several points.
struct Realization {
  std::uint64_t seed = 0;
  std::size_t batch_size = 1;
  std::vector<std::size_t> rows;  // empty unless the oracle samples rows
};

struct OracleCounter {
  std::atomic<std::uint64_t> value_calls{0};
  std::atomic<std::uint64_t> grad_calls{0};
  /// Exact gradients requested purely for reporting.
  std::atomic<std::uint64_t> eval_calls{0};
};

struct OracleConfig {
  OracleMode mode = OracleMode::exact;
  BatchPolicy batch = BatchPolicy::fixed;
  std::size_t batch_size = 1;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

/// Mean gradient over r.rows.
DenseVector stoch_grad(const Objective& obj, const DenseVector& x, const Realization& r);

/// grad(x) + eta with eta_i ~ N(0, sigma_i^2 / r.batch_size), drawn from r.seed.
/// A batch of b independent draws averaged has exactly this distribution.
DenseVector noisy_grad(const Objective& obj, const DenseVector& x, const NoiseSpec& noise,
                       const Realization& r);

/// Gradient/value access for one optimizer run, with call accounting.
/// Realizations are a pure function of (seed, launch, t).
class GradientOracle {
 public:
  /// `pool` restricts row sampling to a subset (a data shard); empty means
  /// all rows. The objective must outlive the oracle.
  GradientOracle(const Objective& obj, OracleConfig cfg, std::vector<std::size_t> pool = {});

  const Objective& objective() const noexcept { return *obj_; }
  const OracleConfig& config() const noexcept { return cfg_; }
  OracleMode mode() const noexcept { return cfg_.mode; }
  std::size_t dim() const noexcept { return obj_->dim(); }

  Realization realization(std::uint64_t launch, std::int64_t t) const;

  /// Gradient estimate under r (exact mode ignores r).
  DenseVector grad(const DenseVector& x, const Realization& r) const;
  double value(const DenseVector& x) const;
  /// Exact gradient for telemetry; never fed back into an algorithm.
  DenseVector eval_grad(const DenseVector& x) const;

  const OracleCounter& counter() const noexcept { return *counter_; }

 private:
  const Objective* obj_;
  OracleConfig cfg_;
  std::vector<std::size_t> pool_;
  std::unique_ptr<OracleCounter> counter_;
};

}  // namespace pfsign

#endif  // PFSIGN_ORACLE_HPP
