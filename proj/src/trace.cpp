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

#include "pfsign/trace.hpp"

#include <algorithm>
#include <cmath>

namespace pfsign {

std::size_t Trace::steps() const noexcept {
  if (records.empty()) return 0;
  const std::int64_t last = records.back().t;
  return last > 0 ? static_cast<std::size_t>(last) : 0;
}

namespace {

template <typename F>
double mean_over_steps(const Trace& tr, F f) {
  const std::int64_t last = tr.records.empty() ? 0 : tr.records.back().t;
  double s = 0.0;
  std::size_t n = 0;
  for (const TraceRecord& r : tr.records) {
    if (r.t < 0 || r.t >= last || std::isnan(r.grad_l1)) continue;
    s += f(r.grad_l1);
    ++n;
  }
  return n == 0 ? kNaN : s / static_cast<double>(n);
}

}  // namespace

double Trace::avg_grad_l1() const noexcept {
  return mean_over_steps(*this, [](double g) { return g; });
}

double Trace::avg_grad_l1_sq() const noexcept {
  return mean_over_steps(*this, [](double g) { return g * g; });
}

double Trace::min_grad_l1() const noexcept {
  double m = kNaN;
  for (const TraceRecord& r : records) {
    if (r.t < 0 || std::isnan(r.grad_l1)) continue;
    m = std::isnan(m) ? r.grad_l1 : std::min(m, r.grad_l1);
  }
  return m;
}

double Trace::min_f() const noexcept {
  double m = kNaN;
  for (const TraceRecord& r : records) {
    if (std::isnan(r.f)) continue;
    m = std::isnan(m) ? r.f : std::min(m, r.f);
  }
  return m;
}

double Trace::f0() const noexcept {
  const TraceRecord* r = at(0);
  return r ? r->f : kNaN;
}

const TraceRecord* Trace::at(std::int64_t t) const noexcept {
  for (const TraceRecord& r : records) {
    if (r.t == t) return &r;
  }
  return nullptr;
}

bool Trace::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

}  // namespace pfsign
