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
#include <cstring>
#include <random>
#include <vector>

#include <omp.h>

#include "pfsign/errors.hpp"
#include "pfsign/kernels.hpp"
#include "support.hpp"

using namespace pfsign;

namespace {

CsrMatrix random_csr(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  CsrMatrix A;
  A.n_cols = cols;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::uint32_t> idx;
    std::vector<double> v;
    for (std::uint32_t j = 0; j < cols; ++j) {
      if (u(rng) < density) {
        idx.push_back(j);
        v.push_back(nd(rng));
      }
    }
    A.push_row(idx, v);
  }
  return A;
}

std::vector<double> randn(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("row_dots and scatter_rows match a dense reference") {
  const CsrMatrix A = random_csr(7, 5, 0.5, 3);
  std::vector<double> dense(7 * 5, 0.0);
  for (std::size_t i = 0; i < 7; ++i) {
    const SparseRow r = A.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) dense[i * 5 + r.indices[k]] = r.values[k];
  }
  const DenseVector x(randn(5, 4));
  const std::vector<std::size_t> rows{6, 0, 3, 3};
  std::vector<double> out(rows.size());
  kernels::serial::row_dots(A, rows, x, out);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double ref = 0.0;
    for (std::size_t j = 0; j < 5; ++j) ref += dense[rows[k] * 5 + j] * x[j];
    CHECK(out[k] == doctest::Approx(ref).epsilon(1e-14));
  }
  const std::vector<double> coef{0.5, -1.0, 2.0, 1.0};
  DenseVector acc(5);
  kernels::serial::scatter_rows(A, rows, coef, acc);
  for (std::size_t j = 0; j < 5; ++j) {
    double ref = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) ref += coef[k] * dense[rows[k] * 5 + j];
    CHECK(acc[j] == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("push_row rejects ragged rows") {
  CsrMatrix A;
  A.n_cols = 3;
  const std::vector<std::uint32_t> idx{0, 2};
  const std::vector<double> v1{1};
  CHECK_THROWS_AS(A.push_row(idx, v1), DimensionError);
}

TEST_CASE("stable scalar helpers") {
  CHECK(kernels::softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(kernels::softplus(800.0) == 800.0);
  CHECK(kernels::softplus(-800.0) >= 0.0);
  CHECK(std::isfinite(kernels::softplus(-800.0)));
  CHECK(kernels::sigmoid(0.0) == 0.5);
  CHECK(kernels::sigmoid(-800.0) >= 0.0);
  CHECK(kernels::sigmoid(800.0) == 1.0);
  const std::vector<double> v{1.0, 1e-16, -1.0, 1e-16};
  CHECK(kernels::ordered_sum(v) == ((1.0 + 1e-16) - 1.0) + 1e-16);
}

TEST_CASE("OpenMP kernels are bitwise equal to the serial reference") {
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);
    for (std::size_t rows_n : {17u, 300u, 1500u}) {
      const CsrMatrix A = random_csr(rows_n, 700, 0.05, rows_n);
      const DenseVector x(randn(700, 9));
      std::vector<std::size_t> rows(rows_n);
      std::mt19937_64 rng(rows_n + 1);
      for (auto& r : rows) r = rng() % rows_n;

      std::vector<double> a(rows_n), b(rows_n);
      kernels::serial::row_dots(A, rows, x, a);
      kernels::omp::row_dots(A, rows, x, b);
      CHECK(same_bits(a, b));

      const std::vector<double> coef = randn(rows_n, 12);
      DenseVector s(700, 0.25), o(700, 0.25);
      kernels::serial::scatter_rows(A, rows, coef, s);
      kernels::omp::scatter_rows(A, rows, coef, o);
      CHECK(testing::bitwise_equal(s, o));

      const std::vector<double> z = randn(rows_n, 13, 30.0);
      std::vector<double> y(rows_n);
      for (std::size_t i = 0; i < rows_n; ++i) y[i] = (i % 3 == 0) ? 1.0 : -1.0;
      std::vector<double> l1(rows_n), c1(rows_n), l2(rows_n), c2(rows_n);
      kernels::serial::logistic_terms(z, y, l1, c1);
      kernels::omp::logistic_terms(z, y, l2, c2);
      CHECK(same_bits(l1, l2));
      CHECK(same_bits(c1, c2));
      for (auto& v : y) v = v > 0 ? 1.0 : 0.0;
      kernels::serial::nllsq_terms(z, y, l1, c1);
      kernels::omp::nllsq_terms(z, y, l2, c2);
      CHECK(same_bits(l1, l2));
      CHECK(same_bits(c1, c2));
    }

    for (std::size_t n : {5u, 300u}) {
      DenseMatrix M{n, n, randn(n * n, n)};
      const DenseVector x(randn(n, n + 1));
      DenseVector a(n), b(n);
      kernels::serial::dense_matvec(M, x, a);
      kernels::omp::dense_matvec(M, x, b);
      CHECK(testing::bitwise_equal(a, b));
    }

    for (std::size_t d : {3u, 2000u}) {
      std::mt19937_64 rng(d);
      std::vector<DenseVector> signs(7, DenseVector(d));
      for (auto& s : signs)
        for (auto& v : s) v = static_cast<double>(static_cast<int>(rng() % 3) - 1);
      std::vector<std::int64_t> a(d), b(d);
      kernels::serial::vote_tally(signs, a);
      kernels::omp::vote_tally(signs, b);
      CHECK(a == b);
    }
  }
  omp_set_num_threads(saved);
}
