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

// Per-row scalar math shared by both kernel backends so that they cannot
// drift apart.

#ifndef PFSIGN_SRC_KERNEL_TERMS_HPP
#define PFSIGN_SRC_KERNEL_TERMS_HPP

#include <cmath>

namespace pfsign::kernels::detail {

inline double softplus(double u) noexcept {
  // log(1+e^u) = max(u,0) + log1p(e^{-|u|})
  return (u > 0.0 ? u : 0.0) + std::log1p(std::exp(-std::abs(u)));
}

inline double sigmoid(double u) noexcept {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

inline void logistic_term(double z, double y, double& loss, double& coef) noexcept {
  const double m = -y * z;
  loss = softplus(m);
  coef = -y * sigmoid(m);
}

inline void nllsq_term(double z, double y, double& loss, double& coef) noexcept {
  const double s = sigmoid(z);
  const double r = y - s;
  loss = r * r;
  coef = -2.0 * r * s * (1.0 - s);
}

}  // namespace pfsign::kernels::detail

#endif  // PFSIGN_SRC_KERNEL_TERMS_HPP
