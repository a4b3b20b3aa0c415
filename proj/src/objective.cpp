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

#include "pfsign/objective.hpp"

#include <numeric>
#include <string>

#include "pfsign/errors.hpp"

namespace pfsign {

std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::logistic: return "logistic";
    case ObjectiveKind::nllsq: return "nllsq";
    case ObjectiveKind::quadratic: return "quadratic";
  }
  return "unknown";
}

void Objective::check_dim(const DenseVector& x) const {
  if (x.size() != dim()) {
    throw DimensionError("point has length " + std::to_string(x.size()) + ", objective has " +
                         std::to_string(dim()));
  }
}

void Objective::check_batch(std::span<const std::size_t> rows, std::size_t n) {
  if (rows.empty()) throw Error("empty mini-batch");
  for (std::size_t r : rows) {
    if (r >= n) throw DimensionError("batch row " + std::to_string(r) + " out of range");
  }
}

namespace {

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void require_labels(const LibsvmDataset& ds, double lo, const char* what) {
  for (double y : ds.labels) {
    if (y != lo && y != 1.0) throw Error(std::string(what) + " objective needs labels in {" +
                                         (lo < 0 ? "-1" : "0") + ", 1}");
  }
}

using TermsFn = void (*)(Backend, std::span<const double>, std::span<const double>,
                         std::span<double>, std::span<double>);

// Shared finite-sum evaluation: z = A_rows x, per-row terms, then either an
// ordered loss sum or an ordered scatter of the derivative coefficients.
struct RowTerms {
  std::vector<double> y, loss, coef;
};

RowTerms row_terms(Backend b, const LibsvmDataset& ds, std::span<const std::size_t> rows,
                   const DenseVector& x, TermsFn terms) {
  std::vector<double> z(rows.size());
  kernels::row_dots(b, ds.features, rows, x, z);
  RowTerms out;
  out.y.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) out.y[k] = ds.labels[rows[k]];
  out.loss.resize(rows.size());
  out.coef.resize(rows.size());
  terms(b, z, out.y, out.loss, out.coef);
  return out;
}

double finite_sum_value(Backend b, const LibsvmDataset& ds, std::span<const std::size_t> rows,
                        const DenseVector& x, double l2, TermsFn terms) {
  const RowTerms t = row_terms(b, ds, rows, x, terms);
  double v = kernels::ordered_sum(t.loss) / static_cast<double>(rows.size());
  if (l2 != 0.0) v += 0.5 * l2 * inner(x, x);
  return v;
}

DenseVector finite_sum_grad(Backend b, const LibsvmDataset& ds, std::span<const std::size_t> rows,
                            const DenseVector& x, double l2, TermsFn terms) {
  const RowTerms t = row_terms(b, ds, rows, x, terms);
  DenseVector g(x.size());
  kernels::scatter_rows(b, ds.features, rows, t.coef, g);
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] *= inv;
  if (l2 != 0.0) axpy(l2, x, g);
  return g;
}

}  // namespace

LogisticObjective::LogisticObjective(std::shared_ptr<const LibsvmDataset> data, double l2,
                                     Backend backend)
    : data_(std::move(data)), l2_(l2), backend_(backend), all_rows_(iota_rows(data_->size())) {
  if (l2 < 0.0) throw Error("l2 regularization must be >= 0");
  require_labels(*data_, -1.0, "logistic");
}

double LogisticObjective::value(const DenseVector& x) const {
  check_dim(x);
  return finite_sum_value(backend_, *data_, all_rows_, x, l2_, kernels::logistic_terms);
}

DenseVector LogisticObjective::grad(const DenseVector& x) const { return batch_grad(x, all_rows_); }

DenseVector LogisticObjective::batch_grad(const DenseVector& x,
                                          std::span<const std::size_t> rows) const {
  check_dim(x);
  check_batch(rows, data_->size());
  return finite_sum_grad(backend_, *data_, rows, x, l2_, kernels::logistic_terms);
}

NllsqObjective::NllsqObjective(std::shared_ptr<const LibsvmDataset> data, double l2,
                               Backend backend)
    : data_(std::move(data)), l2_(l2), backend_(backend), all_rows_(iota_rows(data_->size())) {
  if (l2 < 0.0) throw Error("l2 regularization must be >= 0");
  require_labels(*data_, 0.0, "nllsq");
}

double NllsqObjective::value(const DenseVector& x) const {
  check_dim(x);
  return finite_sum_value(backend_, *data_, all_rows_, x, l2_, kernels::nllsq_terms);
}

DenseVector NllsqObjective::grad(const DenseVector& x) const { return batch_grad(x, all_rows_); }

DenseVector NllsqObjective::batch_grad(const DenseVector& x,
                                       std::span<const std::size_t> rows) const {
  check_dim(x);
  check_batch(rows, data_->size());
  return finite_sum_grad(backend_, *data_, rows, x, l2_, kernels::nllsq_terms);
}

QuadraticObjective::QuadraticObjective(std::shared_ptr<const SyntheticQuadratic> q,
                                       Backend backend)
    : q_(std::move(q)), backend_(backend) {}

double QuadraticObjective::value(const DenseVector& x) const {
  check_dim(x);
  const DenseVector r = x - q_->x_star;
  DenseVector ar(r.size());
  kernels::dense_matvec(backend_, q_->A, r, ar);
  return 0.5 * inner(r, ar) + q_->f_star;
}

DenseVector QuadraticObjective::grad(const DenseVector& x) const {
  check_dim(x);
  const DenseVector r = x - q_->x_star;
  DenseVector g(r.size());
  kernels::dense_matvec(backend_, q_->A, r, g);
  return g;
}

DenseVector QuadraticObjective::batch_grad(const DenseVector& x,
                                           std::span<const std::size_t> rows) const {
  check_batch(rows, 1);
  return grad(x);
}

}  // namespace pfsign
