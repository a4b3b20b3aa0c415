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

// Hot loops of the objectives and the vote simulator, in two flavours.
//
// kernels::serial is the reference. kernels::omp splits the same work across
// OpenMP threads but keeps every floating-point accumulation in the serial
// order, so both produce bit-identical output for any thread count. Tests
// compare them with operator==, not a tolerance.

#ifndef PFSIGN_KERNELS_HPP
#define PFSIGN_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pfsign/numeric.hpp"

namespace pfsign {

/// Compressed sparse row matrix; column indices strictly increasing per row.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> vals;

  SparseRow row(std::size_t i) const {
    const std::size_t b = row_ptr[i];
    const std::size_t e = row_ptr[i + 1];
    return {std::span<const std::uint32_t>(col_idx.data() + b, e - b),
            std::span<const double>(vals.data() + b, e - b)};
  }
  std::size_t nnz() const noexcept { return vals.size(); }

  /// Appends a row; indices must already be strictly increasing and < n_cols.
  void push_row(std::span<const std::uint32_t> idx, std::span<const double> v);

  bool operator==(const CsrMatrix&) const = default;
};

/// Row-major dense square or rectangular matrix.
struct DenseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> a;

  double operator()(std::size_t i, std::size_t j) const { return a[i * n_cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a[i * n_cols + j]; }
};

enum class Backend { serial, omp };

namespace kernels {

// Every kernel below has the same signature in both namespaces.
#define PFSIGN_KERNEL_DECLS                                                                   \
  /* out[k] = <A.row(rows[k]), x> */                                                          \
  void row_dots(const CsrMatrix& A, std::span<const std::size_t> rows, const DenseVector& x, \
                std::span<double> out);                                                       \
  /* out[j] += sum_k coef[k] * A(rows[k], j), accumulated in k order per column */            \
  void scatter_rows(const CsrMatrix& A, std::span<const std::size_t> rows,                    \
                    std::span<const double> coef, DenseVector& out);                          \
  /* out = M x */                                                                             \
  void dense_matvec(const DenseMatrix& M, const DenseVector& x, DenseVector& out);            \
  /* out[j] = sum over nodes of signs[m][j], as integers */                                   \
  void vote_tally(std::span<const DenseVector> signs, std::span<std::int64_t> out);           \
  /* per-row logistic loss softplus(-y z) and derivative coefficient -y s(-y z) */            \
  void logistic_terms(std::span<const double> z, std::span<const double> y,                   \
                      std::span<double> loss, std::span<double> coef);                        \
  /* per-row (y - s(z))^2 and its derivative wrt z */                                         \
  void nllsq_terms(std::span<const double> z, std::span<const double> y,                      \
                   std::span<double> loss, std::span<double> coef);

namespace serial {
PFSIGN_KERNEL_DECLS
}  // namespace serial

namespace omp {
PFSIGN_KERNEL_DECLS
}  // namespace omp

#undef PFSIGN_KERNEL_DECLS

/// Left-to-right sum. Always serial: parallel reduction would reorder.
double ordered_sum(std::span<const double> v) noexcept;

/// Numerically stable log(1 + exp(u)).
double softplus(double u) noexcept;
/// Logistic sigmoid 1/(1+exp(-u)), stable for large |u|.
double sigmoid(double u) noexcept;

// Backend dispatch.
void row_dots(Backend b, const CsrMatrix& A, std::span<const std::size_t> rows,
              const DenseVector& x, std::span<double> out);
void scatter_rows(Backend b, const CsrMatrix& A, std::span<const std::size_t> rows,
                  std::span<const double> coef, DenseVector& out);
void dense_matvec(Backend b, const DenseMatrix& M, const DenseVector& x, DenseVector& out);
void vote_tally(Backend b, std::span<const DenseVector> signs, std::span<std::int64_t> out);
void logistic_terms(Backend b, std::span<const double> z, std::span<const double> y,
                    std::span<double> loss, std::span<double> coef);
void nllsq_terms(Backend b, std::span<const double> z, std::span<const double> y,
                 std::span<double> loss, std::span<double> coef);

}  // namespace kernels

}  // namespace pfsign

#endif  // PFSIGN_KERNELS_HPP
