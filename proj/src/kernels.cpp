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


#include "kernel_terms.hpp"
#include "pfsign/errors.hpp"
#include "pfsign/kernels.hpp"

namespace pfsign {

void CsrMatrix::push_row(std::span<const std::uint32_t> idx, std::span<const double> v) {
  if (idx.size() != v.size()) throw DimensionError("row index/value length mismatch");
  col_idx.insert(col_idx.end(), idx.begin(), idx.end());
  vals.insert(vals.end(), v.begin(), v.end());
  row_ptr.push_back(vals.size());
  ++n_rows;
}

namespace kernels {

double ordered_sum(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double softplus(double u) noexcept { return detail::softplus(u); }
double sigmoid(double u) noexcept { return detail::sigmoid(u); }

#define PFSIGN_DISPATCH(name, ...)                      \
  do {                                                  \
    if (b == Backend::omp) return omp::name(__VA_ARGS__); \
    return serial::name(__VA_ARGS__);                   \
  } while (0)

void row_dots(Backend b, const CsrMatrix& A, std::span<const std::size_t> rows,
              const DenseVector& x, std::span<double> out) {
  PFSIGN_DISPATCH(row_dots, A, rows, x, out);
}

void scatter_rows(Backend b, const CsrMatrix& A, std::span<const std::size_t> rows,
                  std::span<const double> coef, DenseVector& out) {
  PFSIGN_DISPATCH(scatter_rows, A, rows, coef, out);
}

void dense_matvec(Backend b, const DenseMatrix& M, const DenseVector& x, DenseVector& out) {
  PFSIGN_DISPATCH(dense_matvec, M, x, out);
}

void vote_tally(Backend b, std::span<const DenseVector> signs, std::span<std::int64_t> out) {
  PFSIGN_DISPATCH(vote_tally, signs, out);
}

void logistic_terms(Backend b, std::span<const double> z, std::span<const double> y,
                    std::span<double> loss, std::span<double> coef) {
  PFSIGN_DISPATCH(logistic_terms, z, y, loss, coef);
}

void nllsq_terms(Backend b, std::span<const double> z, std::span<const double> y,
                 std::span<double> loss, std::span<double> coef) {
  PFSIGN_DISPATCH(nllsq_terms, z, y, loss, coef);
}

#undef PFSIGN_DISPATCH

}  // namespace kernels
}  // namespace pfsign
