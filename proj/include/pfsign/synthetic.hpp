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

#ifndef PFSIGN_SYNTHETIC_HPP
#define PFSIGN_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>

#include "pfsign/kernels.hpp"
#include "pfsign/numeric.hpp"

namespace pfsign {

/// f(x) = 1/2 (x - x*)' A (x - x*) + f*, with b = A x* kept for the
/// expanded form 1/2 x'Ax - b'x + c.
struct SyntheticQuadratic {
  DenseMatrix A;
  DenseVector b;
  DenseVector x_star;
  double f_star = 0.0;
  /// sum_ij |A_ij|, an upper bound on the l1/linf gradient Lipschitz constant.
  double linf_bound = 0.0;

  std::size_t dim() const noexcept { return x_star.size(); }
};

/// Random rotation of log-spaced eigenvalues in [1, condition]. x* has
/// standard normal entries and f* = 0. Deterministic in seed.
SyntheticQuadratic make_quadratic(std::size_t dim, std::uint64_t seed, double condition);

/// x* + radius * N(0, I), seeded.
DenseVector random_start(const SyntheticQuadratic& q, std::uint64_t seed, double radius);

}  // namespace pfsign

#endif  // PFSIGN_SYNTHETIC_HPP
