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

// Helpers shared by the unit tests. Reference computations here are written
// independently of the library code they check.

#ifndef PFSIGN_TESTS_SUPPORT_HPP
#define PFSIGN_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "pfsign/objective.hpp"
#include "pfsign/synthetic.hpp"

namespace pfsign::testing {

/// 1/2 (x - x*)' diag(a) (x - x*) + f*.
inline std::shared_ptr<const SyntheticQuadratic> diag_quadratic(std::vector<double> a,
                                                                std::vector<double> x_star,
                                                                double f_star = 0.0) {
  auto q = std::make_shared<SyntheticQuadratic>();
  const std::size_t n = a.size();
  q->A.n_rows = n;
  q->A.n_cols = n;
  q->A.a.assign(n * n, 0.0);
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q->A.a[i * n + i] = a[i];
    bound += std::abs(a[i]);
  }
  q->x_star = DenseVector(std::move(x_star));
  q->b = DenseVector(n);
  for (std::size_t i = 0; i < n; ++i) q->b[i] = a[i] * q->x_star[i];
  q->f_star = f_star;
  q->linf_bound = bound;
  return q;
}

inline std::shared_ptr<const QuadraticObjective> diag_objective(std::vector<double> a,
                                                                std::vector<double> x_star,
                                                                double f_star = 0.0) {
  return std::make_shared<QuadraticObjective>(diag_quadratic(std::move(a), std::move(x_star), f_star));
}

/// Central differences with h_i = rel * max(1, |x_i|).
inline DenseVector fd_gradient(const std::function<double(const DenseVector&)>& f,
                               const DenseVector& x, double rel = 1e-6) {
  DenseVector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = rel * std::max(1.0, std::abs(x[i]));
    DenseVector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_l2_error(const DenseVector& a, const DenseVector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline bool bitwise_equal(const DenseVector& a, const DenseVector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace pfsign::testing

#endif  // PFSIGN_TESTS_SUPPORT_HPP
