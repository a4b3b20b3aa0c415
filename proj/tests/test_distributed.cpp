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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

#include "pfsign/distributed.hpp"
#include "pfsign/errors.hpp"
#include "pfsign/libsvm.hpp"
#include "pfsign/optimizers.hpp"
#include "support.hpp"

using namespace pfsign;

namespace {

std::shared_ptr<const LibsvmDataset> a9a() {
  static const auto ds = std::make_shared<LibsvmDataset>(normalize_labels(
      load_libsvm(std::filesystem::path(PFSIGN_FIXTURE_DIR) / "a9a.libsvm"), LabelScheme::pm_one));
  return ds;
}

std::int64_t direct_count(const std::vector<DenseVector>& s, std::size_t j) {
  std::int64_t pos = 0, neg = 0;
  for (const auto& v : s) {
    if (v[j] > 0) ++pos;
    if (v[j] < 0) ++neg;
  }
  return pos - neg;
}

void check_same_trace(const Trace& a, const Trace& b) {
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    CHECK(a.records[t].f == b.records[t].f);
    const double ga = a.records[t].gamma, gb = b.records[t].gamma;
    CHECK((ga == gb || (std::isnan(ga) && std::isnan(gb))));
  }
  CHECK(testing::bitwise_equal(a.x_final, b.x_final));
}

}  // namespace

TEST_CASE("majority vote examples") {
  const std::vector<DenseVector> three{{1}, {1}, {-1}};
  const VoteRecord v3 = majority_vote(three);
  CHECK(v3.sums[0] == 1);
  CHECK(v3.sign[0] == 1.0);
  const std::vector<DenseVector> two{{1}, {-1}};
  CHECK(majority_vote(two).sign[0] == 0.0);
  const std::vector<DenseVector> one{{1, 0, -1}};
  CHECK(majority_vote(one).sign == DenseVector{1, 0, -1});
}

TEST_CASE("majority vote input checks") {
  const std::vector<DenseVector> ragged{{1, 1}, {1}};
  CHECK_THROWS_AS(majority_vote(ragged), DimensionError);
  const std::vector<DenseVector> bad{{0.5}};
  CHECK_THROWS_AS(majority_vote(bad), std::invalid_argument);
  CHECK_THROWS_AS(majority_vote(std::vector<DenseVector>{}), std::invalid_argument);
}

TEST_CASE("majority vote properties on random tables") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t M = 1 + rng() % 9, d = 1 + rng() % 40;
    std::vector<DenseVector> s(M, DenseVector(d));
    for (auto& v : s)
      for (auto& e : v) e = static_cast<double>(static_cast<int>(rng() % 3) - 1);
    const VoteRecord ser = majority_vote(s, Backend::serial);
    const VoteRecord par = majority_vote(s, Backend::omp);
    CHECK(ser.sums == par.sums);
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(ser.sums[j] == direct_count(s, j));
      CHECK(ser.sign[j] == sign_of(static_cast<double>(ser.sums[j])));
    }
    std::vector<DenseVector> shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(majority_vote(shuffled).sign == ser.sign);
    std::vector<DenseVector> flipped = s;
    for (auto& v : flipped)
      for (auto& e : v) e = -e + 0.0;
    const DenseVector f = majority_vote(flipped).sign;
    for (std::size_t j = 0; j < d; ++j) CHECK(f[j] == -ser.sign[j] + 0.0);
  }
}

TEST_CASE("cluster shards and seeds") {
  const LogisticObjective f(a9a());
  ClusterConfig cfg;
  cfg.nodes = 7;
  cfg.disjoint_shards = true;
  cfg.seed = 99;
  const Cluster c(f, cfg);
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    total += c.shard(j).size();
    seen.insert(c.shard(j).begin(), c.shard(j).end());
  }
  CHECK(total == f.num_samples());
  CHECK(seen.size() == f.num_samples());
  CHECK(c.node_seed(0) == 99);
  std::set<std::uint64_t> seeds;
  for (std::size_t j = 0; j < c.size(); ++j) seeds.insert(c.node_seed(j));
  CHECK(seeds.size() == c.size());

  cfg.disjoint_shards = false;
  const Cluster shared(f, cfg);
  for (std::size_t j = 0; j < shared.size(); ++j) CHECK(shared.shard(j).empty());
  cfg.nodes = 0;
  CHECK_THROWS_AS(Cluster(f, cfg), std::invalid_argument);
}

TEST_CASE("one-node cluster replays single-machine stochastic Sign-SGD") {
  const LogisticObjective f(a9a(), 1e-3);
  ClusterConfig cc;
  cc.seed = 5;
  cc.batch_size = 4;
  const Cluster c(f, cc);
  OracleConfig oc;
  oc.mode = OracleMode::stochastic;
  oc.batch_size = 4;
  oc.seed = 5;
  const GradientOracle single(f, oc);
  const DenseVector x0(f.dim());

  DistributedParams dp;
  dp.T = 50;
  dp.gamma = 0.01;
  dp.extra_step = true;
  SignSgdParams sp;
  sp.T = 50;
  sp.schedule = StepSchedule::constant(0.01);
  sp.extra_step = true;
  const Trace a = distributed_sign_sgd_run(c, x0, dp);
  const Trace b = sign_sgd_run(single, x0, sp);
  check_same_trace(a, b);
  CHECK(a.n_t == b.n_t);
  CHECK(a.d_t == b.d_t);
  CHECK(a.zeta == b.zeta);

  PhiOptions opt;
  opt.T = 30;
  const PhiEvaluation pa = distributed_phi(c, x0, 0.02, opt, 3);
  const PhiEvaluation pb = evaluate_phi(single, x0, 0.02, opt, 3);
  CHECK(pa.phi == pb.phi);
  CHECK(pa.n_t == pb.n_t);
  CHECK(pa.d_t == pb.d_t);
  CHECK(pa.trace->scalar_uploads == 1);

  DistributedAliasParams da;
  da.T = 40;
  AliasParams sa;
  sa.T = 40;
  check_same_trace(distributed_alias_run(c, x0, da), alias_run(single, x0, sa));
}

TEST_CASE("noiseless identical nodes follow exact trajectories") {
  const auto f = testing::diag_objective({1.0, 2.0, 5.0}, {0.3, -0.2, 0.1});
  const GradientOracle exact(*f, {});
  const DenseVector x0{1.0, 1.0, -1.0};
  for (std::size_t M : {2u, 3u, 6u}) {
    ClusterConfig cc;
    cc.nodes = M;
    cc.mode = OracleMode::noisy;
    cc.noise.sigma = DenseVector(3);
    const Cluster c(*f, cc);

    DistributedParams dp;
    dp.T = 40;
    dp.gamma = 0.03;
    SignSgdParams sp;
    sp.T = 40;
    sp.schedule = StepSchedule::constant(0.03);
    const Trace a = distributed_sign_sgd_run(c, x0, dp);
    const Trace b = sign_sgd_run(exact, x0, sp);
    check_same_trace(a, b);
    CHECK(a.bits_up == M * 3 * dp.T);
    CHECK(a.bits_down == 3 * dp.T);
    CHECK(a.scalar_uploads == M);

    PhiOptions opt;
    opt.T = 20;
    const PhiEvaluation pa = distributed_phi(c, x0, 0.05, opt);
    const PhiEvaluation pb = evaluate_phi(exact, x0, 0.05, opt);
    CHECK(pa.phi == doctest::Approx(pb.phi).epsilon(1e-14));
    CHECK(pa.trace->scalar_uploads == M);

    DistributedAliasParams da;
    da.T = 40;
    AliasParams sa;
    sa.T = 40;
    const Trace ta = distributed_alias_run(c, x0, da);
    const Trace tb = alias_run(exact, x0, sa);
    REQUIRE(ta.records.size() == tb.records.size());
    for (std::size_t t = 0; t < ta.records.size(); ++t)
      CHECK(ta.records[t].f == doctest::Approx(tb.records[t].f).epsilon(1e-12));
  }
}

TEST_CASE("distributed ALIAS lambda is nonincreasing; runs replay exactly") {
  const LogisticObjective f(a9a(), 1e-3);
  ClusterConfig cc;
  cc.nodes = 5;
  cc.seed = 12;
  cc.batch_size = 8;
  const Cluster c(f, cc);
  DistributedAliasParams p;
  p.T = 100;
  const Trace a = distributed_alias_run(c, DenseVector(f.dim()), p);
  double prev = INFINITY;
  for (const auto& r : a.records) {
    if (std::isnan(r.lambda)) continue;
    CHECK(r.lambda <= prev);
    prev = r.lambda;
  }
  const Trace b = distributed_alias_run(c, DenseVector(f.dim()), p);
  check_same_trace(a, b);
  CHECK(a.scalar_uploads == 5 * p.T);
}

TEST_CASE("distributed SOS runs and meters its launches") {
  const auto f = testing::diag_objective({1.0, 2.0}, {0.0, 0.0});
  ClusterConfig cc;
  cc.nodes = 3;
  cc.mode = OracleMode::noisy;
  cc.noise.sigma = DenseVector{0.01, 0.01};
  const Cluster c(*f, cc);
  SosParams p;
  p.T = 100;
  p.gamma_s = 1e-4;
  const SosResult r = distributed_sos_sign_sgd(c, {0.1, -0.1}, p);
  CHECK(r.total_launches == r.outcome.launches + 1);
  CHECK(r.trace.records.front().t == -1);
  for (const auto& e : r.outcome.evaluations) CHECK(e.trace->scalar_uploads == 3);
  p.k = 0;
  CHECK_THROWS_AS(distributed_sos_sign_sgd(c, {0.1, -0.1}, p), ConfigError);
}
