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

#ifndef PFSIGN_DISTRIBUTED_HPP
#define PFSIGN_DISTRIBUTED_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pfsign/kernels.hpp"
#include "pfsign/numeric.hpp"
#include "pfsign/objective.hpp"
#include "pfsign/oracle.hpp"
#include "pfsign/sos.hpp"
#include "pfsign/trace.hpp"

namespace pfsign {

struct ClusterConfig {
  std::size_t nodes = 1;
  /// Give each node a disjoint contiguous block of rows instead of the full
  /// dataset. Node gradients are then biased for the global loss.
  bool disjoint_shards = false;
  std::uint64_t seed = 0;
  OracleMode mode = OracleMode::stochastic;
  BatchPolicy batch = BatchPolicy::fixed;
  std::size_t batch_size = 1;
  NoiseSpec noise;
};

/// Simulated synchronous workers. Node 0 uses the master seed itself, so a
/// one-node cluster replays the single-machine oracle exactly.
class Cluster {
 public:
  Cluster(const Objective& obj, ClusterConfig cfg);

  std::size_t size() const noexcept { return nodes_.size(); }
  const GradientOracle& node(std::size_t j) const { return nodes_.at(j); }
  /// Exact oracle used only for reporting f and ||grad f||_1.
  const GradientOracle& server() const noexcept { return server_; }
  const std::vector<std::size_t>& shard(std::size_t j) const { return shards_.at(j); }
  std::uint64_t node_seed(std::size_t j) const { return seeds_.at(j); }
  const ClusterConfig& config() const noexcept { return cfg_; }
  const Objective& objective() const noexcept { return server_.objective(); }

 private:
  ClusterConfig cfg_;
  std::vector<std::vector<std::size_t>> shards_;
  std::vector<std::uint64_t> seeds_;
  std::vector<GradientOracle> nodes_;
  GradientOracle server_;
};

struct VoteRecord {
  std::vector<std::int64_t> sums;
  DenseVector sign;
};

/// Per-coordinate sum of node signs, then its sign (ties give 0). Throws
/// DimensionError on ragged input or std::invalid_argument on entries outside
/// {-1, 0, 1}.
VoteRecord majority_vote(std::span<const DenseVector> signs, Backend backend = Backend::omp);

struct DistributedParams {
  std::size_t T = 100;
  double gamma = 1e-3;
  bool extra_step = false;
  double tau_s = 1.0;
  int max_halvings = 60;
  std::uint64_t launch = 0;
  std::size_t eval_every = 1;
  std::string method = "dist_sign_sgd";
};

/// Majority-vote Sign-SGD. n_t and d_t are filled; d_t averages each node's
/// local sum of gradient differences plus its own minimum gradient norm,
/// which the node uploads as one scalar at the end of the launch.
Trace distributed_sign_sgd_run(const Cluster& cluster, const DenseVector& x_start,
                               const DistributedParams& p);

PhiEvaluation distributed_phi(const Cluster& cluster, const DenseVector& x_minus1, double gamma,
                              const PhiOptions& opt, std::uint64_t launch = 0);

/// Bisection with node-averaged phi, then a final majority-vote launch.
SosResult distributed_sos_sign_sgd(const Cluster& cluster, const DenseVector& x_minus1,
                                   const SosParams& p);

struct DistributedAliasParams {
  std::size_t T = 100;
  double f_tilde = 0.0;
  double bootstrap = kNaN;
  double l_known = 0.0;
  std::uint64_t launch = 0;
  std::size_t eval_every = 1;
  std::string method = "dist_alias";
};

/// Option II with majority-vote steps; lambda^t uses the node-averaged
/// ratios measured on each node's next realization.
Trace distributed_alias_run(const Cluster& cluster, const DenseVector& x0,
                            const DistributedAliasParams& p);

}  // namespace pfsign

#endif  // PFSIGN_DISTRIBUTED_HPP
