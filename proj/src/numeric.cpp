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

#include "pfsign/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pfsign/errors.hpp"

namespace pfsign {

namespace {

void check_same_size(const DenseVector& u, const DenseVector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("vector length mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
}

}  // namespace

DenseVector sign_vec(const DenseVector& v) {
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sign_of(v[i]);
  return out;
}

double norm_l1(const DenseVector& v) noexcept {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_l2(const DenseVector& v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_linf(const DenseVector& v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double inner(const DenseVector& u, const DenseVector& v) {
  check_same_size(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double l1_distance(const DenseVector& u, const DenseVector& v) {
  check_same_size(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
  return s;
}

double linf_distance(const DenseVector& u, const DenseVector& v) {
  check_same_size(u, v);
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

DenseVector operator-(const DenseVector& u, const DenseVector& v) {
  check_same_size(u, v);
  DenseVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
  return out;
}

DenseVector operator+(const DenseVector& u, const DenseVector& v) {
  check_same_size(u, v);
  DenseVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
  return out;
}

DenseVector operator*(double a, const DenseVector& v) {
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = a * v[i];
  return out;
}

void axpy(double a, const DenseVector& x, DenseVector& y) {
  check_same_size(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const DenseVector& v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool all_zero(const DenseVector& v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace pfsign
