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

#include "pfsign/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pfsign/errors.hpp"
#include "pfsign/rng.hpp"

namespace pfsign {

SyntheticQuadratic make_quadratic(std::size_t dim, std::uint64_t seed, double condition) {
  if (dim == 0) throw DimensionError("quadratic dimension must be >= 1");
  if (!(condition >= 1.0)) throw std::invalid_argument("condition must be >= 1");
  Rng rng(derive_seed(seed, "QUADRATIC"));
  std::normal_distribution<double> normal(0.0, 1.0);

  // Orthonormal basis by modified Gram-Schmidt on a Gaussian matrix. Columns
  // that collapse numerically are redrawn.
  std::vector<DenseVector> q;
  q.reserve(dim);
  while (q.size() < dim) {
    DenseVector v(dim);
    for (double& e : v) e = normal(rng);
    for (const DenseVector& u : q) axpy(-inner(u, v), u, v);
    const double n = norm_l2(v);
    if (n < 1e-8) continue;
    for (double& e : v) e /= n;
    q.push_back(std::move(v));
  }

  std::vector<double> eig(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double frac = dim == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(dim - 1);
    eig[k] = std::pow(condition, frac);
  }

  SyntheticQuadratic out;
  out.A.n_rows = out.A.n_cols = dim;
  out.A.a.assign(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += eig[k] * q[k][i] * q[k][j];
      out.A(i, j) = s;
      out.A(j, i) = s;
    }
  }

  out.x_star = DenseVector(dim);
  for (double& e : out.x_star) e = normal(rng);
  out.b = DenseVector(dim);
  kernels::serial::dense_matvec(out.A, out.x_star, out.b);
  out.f_star = 0.0;
  for (double a : out.A.a) out.linf_bound += std::abs(a);
  return out;
}

DenseVector random_start(const SyntheticQuadratic& q, std::uint64_t seed, double radius) {
  Rng rng(derive_seed(seed, "START"));
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector x = q.x_star;
  for (double& e : x) e += radius * normal(rng);
  return x;
}

}  // namespace pfsign
