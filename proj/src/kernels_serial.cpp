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

// Reference kernels. Plain loops in input order.

#include <cstddef>
#include <cstdint>

#include "kernel_terms.hpp"
#include "pfsign/kernels.hpp"

namespace pfsign::kernels::serial {

void row_dots(const CsrMatrix& A, std::span<const std::size_t> rows, const DenseVector& x,
              std::span<double> out) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SparseRow r = A.row(rows[k]);
    double s = 0.0;
    for (std::size_t p = 0; p < r.nnz(); ++p) s += r.values[p] * x[r.indices[p]];
    out[k] = s;
  }
}

void scatter_rows(const CsrMatrix& A, std::span<const std::size_t> rows,
                  std::span<const double> coef, DenseVector& out) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SparseRow r = A.row(rows[k]);
    const double c = coef[k];
    for (std::size_t p = 0; p < r.nnz(); ++p) out[r.indices[p]] += c * r.values[p];
  }
}

void dense_matvec(const DenseMatrix& M, const DenseVector& x, DenseVector& out) {
  for (std::size_t i = 0; i < M.n_rows; ++i) {
    const double* row = M.a.data() + i * M.n_cols;
    double s = 0.0;
    for (std::size_t j = 0; j < M.n_cols; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

void vote_tally(std::span<const DenseVector> signs, std::span<std::int64_t> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::int64_t s = 0;
    for (const DenseVector& v : signs) s += static_cast<std::int64_t>(v[j]);
    out[j] = s;
  }
}

void logistic_terms(std::span<const double> z, std::span<const double> y, std::span<double> loss,
                    std::span<double> coef) {
  for (std::size_t i = 0; i < z.size(); ++i) detail::logistic_term(z[i], y[i], loss[i], coef[i]);
}

void nllsq_terms(std::span<const double> z, std::span<const double> y, std::span<double> loss,
                 std::span<double> coef) {
  for (std::size_t i = 0; i < z.size(); ++i) detail::nllsq_term(z[i], y[i], loss[i], coef[i]);
}

}  // namespace pfsign::kernels::serial
