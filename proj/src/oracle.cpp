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

#include "pfsign/oracle.hpp"

#include <cmath>
#include <random>

#include "pfsign/errors.hpp"
#include "pfsign/rng.hpp"

namespace pfsign {

std::string to_string(OracleMode m) {
  switch (m) {
    case OracleMode::exact: return "exact";
    case OracleMode::stochastic: return "stochastic";
    case OracleMode::noisy: return "noisy";
  }
  return "unknown";
}

std::string to_string(BatchPolicy p) {
  switch (p) {
    case BatchPolicy::fixed: return "fixed";
    case BatchPolicy::growing: return "growing";
    case BatchPolicy::full: return "full";
  }
  return "unknown";
}

DenseVector stoch_grad(const Objective& obj, const DenseVector& x, const Realization& r) {
  return obj.batch_grad(x, r.rows);
}

DenseVector noisy_grad(const Objective& obj, const DenseVector& x, const NoiseSpec& noise,
                       const Realization& r) {
  DenseVector g = obj.grad(x);
  if (noise.sigma.empty()) return g;
  if (noise.sigma.size() != g.size()) throw DimensionError("noise sigma length mismatch");
  Rng rng(r.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(r.batch_size));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = normal(rng);  // drawn even when sigma_i = 0 to keep streams aligned
    g[i] += noise.sigma[i] * scale * z;
  }
  return g;
}

GradientOracle::GradientOracle(const Objective& obj, OracleConfig cfg,
                               std::vector<std::size_t> pool)
    : obj_(&obj), cfg_(std::move(cfg)), pool_(std::move(pool)),
      counter_(std::make_unique<OracleCounter>()) {
  if (cfg_.batch_size == 0) throw Error("batch size must be positive");
  for (double s : cfg_.noise.sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error("noise sigma must be finite and >= 0");
  }
  if (!cfg_.noise.sigma.empty() && cfg_.noise.sigma.size() != obj.dim()) {
    throw DimensionError("noise sigma length mismatch");
  }
  for (std::size_t r : pool_) {
    if (r >= obj.num_samples()) throw DimensionError("shard row out of range");
  }
}

Realization GradientOracle::realization(std::uint64_t launch, std::int64_t t) const {
  Realization r;
  r.seed = derive_seed(cfg_.seed, "REALIZATION", launch, static_cast<std::uint64_t>(t));
  const std::size_t n = pool_.empty() ? obj_->num_samples() : pool_.size();
  switch (cfg_.batch) {
    case BatchPolicy::fixed: r.batch_size = cfg_.batch_size; break;
    case BatchPolicy::growing: r.batch_size = t < 0 ? 1 : static_cast<std::size_t>(t) + 1; break;
    case BatchPolicy::full: r.batch_size = n; break;
  }
  if (cfg_.mode != OracleMode::stochastic) return r;

  r.rows.resize(r.batch_size);
  if (cfg_.batch == BatchPolicy::full) {
    for (std::size_t k = 0; k < n; ++k) r.rows[k] = pool_.empty() ? k : pool_[k];
    return r;
  }
  Rng rng(r.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t& row : r.rows) {
    const std::size_t k = pick(rng);
    row = pool_.empty() ? k : pool_[k];
  }
  return r;
}

DenseVector GradientOracle::grad(const DenseVector& x, const Realization& r) const {
  counter_->grad_calls.fetch_add(1, std::memory_order_relaxed);
  switch (cfg_.mode) {
    case OracleMode::exact: return obj_->grad(x);
    case OracleMode::stochastic: return stoch_grad(*obj_, x, r);
    case OracleMode::noisy: return noisy_grad(*obj_, x, cfg_.noise, r);
  }
  return obj_->grad(x);
}

double GradientOracle::value(const DenseVector& x) const {
  counter_->value_calls.fetch_add(1, std::memory_order_relaxed);
  return obj_->value(x);
}

DenseVector GradientOracle::eval_grad(const DenseVector& x) const {
  counter_->eval_calls.fetch_add(1, std::memory_order_relaxed);
  return obj_->grad(x);
}

}  // namespace pfsign
