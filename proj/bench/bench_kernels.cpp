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

// Serial vs OpenMP kernel throughput. Run with OMP_NUM_THREADS to vary width.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "pfsign/kernels.hpp"

namespace {

using pfsign::Backend;
using pfsign::CsrMatrix;
using pfsign::DenseMatrix;
using pfsign::DenseVector;

// a9a-like shape: 123 columns, about 14 nonzeros per row.
CsrMatrix random_csr(std::size_t rows, std::size_t cols, std::size_t nnz_per_row) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint32_t> col(0, static_cast<std::uint32_t>(cols - 1));
  CsrMatrix A;
  A.n_cols = cols;
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < rows; ++i) {
    idx.clear();
    while (idx.size() < nnz_per_row) {
      const std::uint32_t c = col(rng);
      if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
    }
    std::sort(idx.begin(), idx.end());
    val.assign(idx.size(), 1.0);
    A.push_row(idx, val);
  }
  return A;
}

DenseVector random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  DenseVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

Backend backend_arg(const benchmark::State& st) {
  return st.range(1) == 0 ? Backend::serial : Backend::omp;
}

void BM_RowDots(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const CsrMatrix A = random_csr(n, 123, 14);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  const DenseVector x = random_vec(123, 2);
  std::vector<double> out(n);
  for (auto _ : st) {
    pfsign::kernels::row_dots(backend_arg(st), A, rows, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(A.nnz()));
}

void BM_ScatterRows(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const CsrMatrix A = random_csr(n, 2048, 14);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  const DenseVector c = random_vec(n, 3);
  const std::vector<double> coef(c.data(), c.data() + n);
  DenseVector out(2048);
  for (auto _ : st) {
    pfsign::kernels::scatter_rows(backend_arg(st), A, rows, coef, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(A.nnz()));
}

void BM_DenseMatvec(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  DenseMatrix M{n, n, std::vector<double>(n * n, 0.5)};
  const DenseVector x = random_vec(n, 4);
  DenseVector out(n);
  for (auto _ : st) {
    pfsign::kernels::dense_matvec(backend_arg(st), M, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n * n));
}

void BM_VoteTally(benchmark::State& st) {
  const auto d = static_cast<std::size_t>(st.range(0));
  std::vector<DenseVector> signs;
  for (std::uint64_t m = 0; m < 15; ++m) {
    DenseVector s = random_vec(d, 10 + m);
    for (std::size_t i = 0; i < d; ++i) s[i] = s[i] > 0 ? 1.0 : -1.0;
    signs.push_back(std::move(s));
  }
  std::vector<std::int64_t> out(d);
  for (auto _ : st) {
    pfsign::kernels::vote_tally(backend_arg(st), signs, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(15 * d));
}

void BM_LogisticTerms(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const DenseVector zv = random_vec(n, 5);
  const std::vector<double> z(zv.data(), zv.data() + n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1.0 : -1.0;
  std::vector<double> loss(n), coef(n);
  for (auto _ : st) {
    pfsign::kernels::logistic_terms(backend_arg(st), z, y, loss, coef);
    benchmark::DoNotOptimize(coef.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n));
}

// Second argument: 0 = serial, 1 = omp.
BENCHMARK(BM_RowDots)->ArgsProduct({{1 << 10, 1 << 15}, {0, 1}});
BENCHMARK(BM_ScatterRows)->ArgsProduct({{1 << 10, 1 << 15}, {0, 1}});
BENCHMARK(BM_DenseMatvec)->ArgsProduct({{300, 2000}, {0, 1}});
BENCHMARK(BM_VoteTally)->ArgsProduct({{1 << 12, 1 << 18}, {0, 1}});
BENCHMARK(BM_LogisticTerms)->ArgsProduct({{1 << 12, 1 << 18}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
