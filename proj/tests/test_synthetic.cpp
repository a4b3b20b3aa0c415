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

#include <cmath>
#include <random>

#include "pfsign/errors.hpp"
#include "pfsign/objective.hpp"
#include "pfsign/synthetic.hpp"
#include "support.hpp"

using namespace pfsign;

TEST_CASE("one-dimensional unit quadratic") {
  const SyntheticQuadratic q = make_quadratic(1, 3, 1.0);
  CHECK(q.A(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q.linf_bound == doctest::Approx(1.0).epsilon(1e-15));
  const QuadraticObjective f(std::make_shared<SyntheticQuadratic>(q));
  DenseVector x = q.x_star;
  x[0] += 0.3;
  CHECK(f.value(x) == doctest::Approx(0.5 * 0.09 + q.f_star).epsilon(1e-12));
  CHECK(f.grad(x)[0] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("make_quadratic is deterministic in the seed") {
  const SyntheticQuadratic a = make_quadratic(3, 7, 10.0);
  const SyntheticQuadratic b = make_quadratic(3, 7, 10.0);
  const SyntheticQuadratic c = make_quadratic(3, 8, 10.0);
  CHECK(a.A.a == b.A.a);
  CHECK(a.x_star == b.x_star);
  CHECK(a.A.a != c.A.a);
}

TEST_CASE("constructed quadratic is consistent") {
  const std::size_t d = 12;
  const double cond = 50.0;
  const SyntheticQuadratic q = make_quadratic(d, 42, cond);
  double trace = 0.0, frob2 = 0.0, bound = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    trace += q.A(i, i);
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(std::abs(q.A(i, j) - q.A(j, i)) <= 1e-12);
      frob2 += q.A(i, j) * q.A(i, j);
      bound += std::abs(q.A(i, j));
    }
  }
  // Spectrum cond^(k/(d-1)), k = 0..d-1, seen through trace(A) and trace(A^2).
  double eig_sum = 0.0, eig_sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double e = std::pow(cond, static_cast<double>(k) / static_cast<double>(d - 1));
    eig_sum += e;
    eig_sq += e * e;
  }
  CHECK(trace == doctest::Approx(eig_sum).epsilon(1e-10));
  CHECK(frob2 == doctest::Approx(eig_sq).epsilon(1e-10));
  CHECK(q.linf_bound == doctest::Approx(bound).epsilon(1e-14));

  // b = A x*
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += q.A(i, j) * q.x_star[j];
    CHECK(q.b[i] == doctest::Approx(s).epsilon(1e-12));
  }

  // Rayleigh quotients stay inside [1, cond].
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    DenseVector v(d);
    for (auto& e : v) e = nd(rng);
    double num = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) num += v[i] * q.A(i, j) * v[j];
    const double rq = num / inner(v, v);
    CHECK(rq >= 1.0 - 1e-10);
    CHECK(rq <= cond + 1e-10);
  }

  const QuadraticObjective f(std::make_shared<SyntheticQuadratic>(q));
  CHECK(norm_linf(f.grad(q.x_star)) <= 1e-12);
  CHECK(f.value(q.x_star) == doctest::Approx(q.f_star).epsilon(1e-10));
}

TEST_CASE("quadratic gradient matches finite differences") {
  const auto q = std::make_shared<SyntheticQuadratic>(make_quadratic(10, 9, 10.0));
  const QuadraticObjective f(q);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const DenseVector x = random_start(*q, s, 2.0);
    const DenseVector fd = testing::fd_gradient([&](const DenseVector& y) { return f.value(y); }, x);
    CHECK(testing::rel_l2_error(f.grad(x), fd) <= 1e-6);
  }
}

TEST_CASE("make_quadratic argument checks") {
  CHECK_THROWS_AS(make_quadratic(0, 1, 1.0), DimensionError);
  CHECK_THROWS(make_quadratic(2, 1, 0.5));
}

TEST_CASE("random_start is centered on the optimum with the given radius") {
  const SyntheticQuadratic q = make_quadratic(4, 1, 2.0);
  CHECK(random_start(q, 5, 0.0) == q.x_star);
  CHECK(random_start(q, 5, 1.0) == random_start(q, 5, 1.0));
  CHECK_FALSE(random_start(q, 5, 1.0) == random_start(q, 6, 1.0));
}
