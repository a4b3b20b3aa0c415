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

#ifndef PFSIGN_OBJECTIVE_HPP
#define PFSIGN_OBJECTIVE_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pfsign/kernels.hpp"
#include "pfsign/libsvm.hpp"
#include "pfsign/numeric.hpp"
#include "pfsign/synthetic.hpp"

namespace pfsign {

enum class ObjectiveKind { logistic, nllsq, quadratic };

std::string to_string(ObjectiveKind k);

/// Smooth objective with a finite-sum structure over num_samples() rows.
/// All methods are const and safe to call concurrently.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual ObjectiveKind kind() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;
  /// Number of rows a mini-batch can draw from (1 for the quadratic).
  virtual std::size_t num_samples() const noexcept = 0;

  virtual double value(const DenseVector& x) const = 0;
  virtual DenseVector grad(const DenseVector& x) const = 0;
  /// Mean gradient over `rows` (duplicates allowed) plus regularization.
  /// Throws on an empty batch.
  virtual DenseVector batch_grad(const DenseVector& x, std::span<const std::size_t> rows) const = 0;

 protected:
  void check_dim(const DenseVector& x) const;
  static void check_batch(std::span<const std::size_t> rows, std::size_t n);
};

/// (1/n) sum log(1 + exp(-y_i <a_i, x>)) + (l2/2)||x||^2 with labels in {-1, 1}.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::shared_ptr<const LibsvmDataset> data, double l2 = 0.0,
                    Backend backend = Backend::omp);

  ObjectiveKind kind() const noexcept override { return ObjectiveKind::logistic; }
  std::size_t dim() const noexcept override { return data_->dim(); }
  std::size_t num_samples() const noexcept override { return data_->size(); }
  double value(const DenseVector& x) const override;
  DenseVector grad(const DenseVector& x) const override;
  DenseVector batch_grad(const DenseVector& x, std::span<const std::size_t> rows) const override;

  const LibsvmDataset& data() const noexcept { return *data_; }
  double l2() const noexcept { return l2_; }

 private:
  std::shared_ptr<const LibsvmDataset> data_;
  double l2_;
  Backend backend_;
  std::vector<std::size_t> all_rows_;
};

/// (1/n) sum (y_i - sigmoid(<a_i, x>))^2 + (l2/2)||x||^2 with labels in {0, 1}.
/// Not convex.
class NllsqObjective final : public Objective {
 public:
  NllsqObjective(std::shared_ptr<const LibsvmDataset> data, double l2 = 0.0,
                 Backend backend = Backend::omp);

  ObjectiveKind kind() const noexcept override { return ObjectiveKind::nllsq; }
  std::size_t dim() const noexcept override { return data_->dim(); }
  std::size_t num_samples() const noexcept override { return data_->size(); }
  double value(const DenseVector& x) const override;
  DenseVector grad(const DenseVector& x) const override;
  DenseVector batch_grad(const DenseVector& x, std::span<const std::size_t> rows) const override;

 private:
  std::shared_ptr<const LibsvmDataset> data_;
  double l2_;
  Backend backend_;
  std::vector<std::size_t> all_rows_;
};

/// 1/2 (x - x*)' A (x - x*) + f*. A single "row": batch_grad equals grad.
class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(std::shared_ptr<const SyntheticQuadratic> q,
                              Backend backend = Backend::omp);

  ObjectiveKind kind() const noexcept override { return ObjectiveKind::quadratic; }
  std::size_t dim() const noexcept override { return q_->dim(); }
  std::size_t num_samples() const noexcept override { return 1; }
  double value(const DenseVector& x) const override;
  DenseVector grad(const DenseVector& x) const override;
  DenseVector batch_grad(const DenseVector& x, std::span<const std::size_t> rows) const override;

  const SyntheticQuadratic& problem() const noexcept { return *q_; }

 private:
  std::shared_ptr<const SyntheticQuadratic> q_;
  Backend backend_;
};

}  // namespace pfsign

#endif  // PFSIGN_OBJECTIVE_HPP
