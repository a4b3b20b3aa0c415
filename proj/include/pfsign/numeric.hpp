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

#ifndef PFSIGN_NUMERIC_HPP
#define PFSIGN_NUMERIC_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace pfsign {

/// Dense coordinate vector of 64-bit floats. The length is fixed at
/// construction; there is no resize.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  DenseVector(std::initializer_list<double> init) : v_(init) {}
  explicit DenseVector(std::vector<double> values) : v_(std::move(values)) {}

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  double& operator[](std::size_t i) noexcept { return v_[i]; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }

  double* data() noexcept { return v_.data(); }
  const double* data() const noexcept { return v_.data(); }

  std::span<double> span() noexcept { return v_; }
  std::span<const double> span() const noexcept { return v_; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  const std::vector<double>& values() const noexcept { return v_; }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> v_;
};

/// Read-only view of one sparse feature row: strictly increasing 0-based
/// indices with matching values.
struct SparseRow {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
};

/// Three-case sign: 1, 0 or -1. Both zeros map to +0.0.
inline double sign_of(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

DenseVector sign_vec(const DenseVector& v);
double norm_l1(const DenseVector& v) noexcept;
double norm_l2(const DenseVector& v) noexcept;
double norm_linf(const DenseVector& v) noexcept;

/// Sum of products in input order. Throws DimensionError on length mismatch.
double inner(const DenseVector& u, const DenseVector& v);

/// ||u - v||_1 and ||u - v||_inf without materializing the difference.
double l1_distance(const DenseVector& u, const DenseVector& v);
double linf_distance(const DenseVector& u, const DenseVector& v);

DenseVector operator-(const DenseVector& u, const DenseVector& v);
DenseVector operator+(const DenseVector& u, const DenseVector& v);
DenseVector operator*(double a, const DenseVector& v);

/// y += a * x
void axpy(double a, const DenseVector& x, DenseVector& y);

bool all_finite(const DenseVector& v) noexcept;
bool all_zero(const DenseVector& v) noexcept;

}  // namespace pfsign

#endif  // PFSIGN_NUMERIC_HPP
