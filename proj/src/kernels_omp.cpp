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

// OpenMP kernels. Work is split so that each output element is produced by
// exactly one thread, using the same operation order as the serial version.

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "kernel_terms.hpp"
#include "pfsign/kernels.hpp"

namespace pfsign::kernels::omp {

namespace {
// Below these sizes the fork/join cost dominates.
constexpr std::size_t kMinRows = 256;
constexpr std::size_t kMinCols = 512;
}  // namespace

void row_dots(const CsrMatrix& A, std::span<const std::size_t> rows, const DenseVector& x,
              std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static) if (rows.size() >= kMinRows)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const SparseRow r = A.row(rows[k]);
    double s = 0.0;
    for (std::size_t p = 0; p < r.nnz(); ++p) s += r.values[p] * x[r.indices[p]];
    out[k] = s;
  }
}

void scatter_rows(const CsrMatrix& A, std::span<const std::size_t> rows,
                  std::span<const double> coef, DenseVector& out) {
  // Column partition: thread t owns [c0, c1) and walks the whole batch in
  // order, so each out[j] sees its additions in the serial sequence.
  const std::size_t d = out.size();
#pragma omp parallel if (rows.size() * 4 >= kMinRows && d >= 64)
  {
    const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t c0 = d * tid / nt;
    const std::size_t c1 = d * (tid + 1) / nt;
    if (c0 < c1) {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const SparseRow r = A.row(rows[k]);
        const double c = coef[k];
        auto lo = std::lower_bound(r.indices.begin(), r.indices.end(), c0);
        for (auto it = lo; it != r.indices.end() && *it < c1; ++it) {
          const auto p = static_cast<std::size_t>(it - r.indices.begin());
          out[*it] += c * r.values[p];
        }
      }
    }
  }
}

void dense_matvec(const DenseMatrix& M, const DenseVector& x, DenseVector& out) {
  const auto n = static_cast<std::ptrdiff_t>(M.n_rows);
#pragma omp parallel for schedule(static) if (M.n_rows * M.n_cols >= kMinRows * kMinRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* row = M.a.data() + static_cast<std::size_t>(i) * M.n_cols;
    double s = 0.0;
    for (std::size_t j = 0; j < M.n_cols; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

void vote_tally(std::span<const DenseVector> signs, std::span<std::int64_t> out) {
  const auto d = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() >= kMinCols)
  for (std::ptrdiff_t j = 0; j < d; ++j) {
    std::int64_t s = 0;
    for (const DenseVector& v : signs) s += static_cast<std::int64_t>(v[j]);
    out[j] = s;
  }
}

void logistic_terms(std::span<const double> z, std::span<const double> y, std::span<double> loss,
                    std::span<double> coef) {
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static) if (z.size() >= kMinRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) detail::logistic_term(z[i], y[i], loss[i], coef[i]);
}

void nllsq_terms(std::span<const double> z, std::span<const double> y, std::span<double> loss,
                 std::span<double> coef) {
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static) if (z.size() >= kMinRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) detail::nllsq_term(z[i], y[i], loss[i], coef[i]);
}

}  // namespace pfsign::kernels::omp
