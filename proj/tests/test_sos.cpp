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

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "pfsign/errors.hpp"
#include "pfsign/optimizers.hpp"
#include "pfsign/sos.hpp"
#include "pfsign/synthetic.hpp"
#include "support.hpp"

using namespace pfsign;

namespace {

PhiFn constant_phi(double value) {
  return [value](double gamma, std::uint64_t launch) {
    PhiEvaluation e;
    e.gamma = gamma;
    e.n_t = value;
    e.d_t = 1.0;
    e.phi = value;
    e.launch = launch;
    return e;
  };
}

std::shared_ptr<const QuadraticObjective> quadratic(std::size_t d, std::uint64_t seed,
                                                    double cond = 10.0) {
  return std::make_shared<QuadraticObjective>(
      std::make_shared<SyntheticQuadratic>(make_quadratic(d, seed, cond)));
}

/// Halving count of the probing move, by direct search.
int reference_halvings(const std::function<double(double)>& f, double x, double e, double tau) {
  for (int h = 0;; ++h) {
    if (std::min(f(x + tau * e), f(x - tau * e)) < f(x)) return h;
    tau /= 2.0;
  }
}

}  // namespace

TEST_CASE("extra step: first probe succeeds") {
  const auto f = testing::diag_objective({2.0}, {0.0});  // f = x^2
  const ExtraStepResult r = extra_step(*f, {1.0}, 0.5);
  CHECK(r.x0[0] == 0.5);
  CHECK(r.halvings == 0);
  CHECK(r.f_decreased);
  CHECK(r.f0 == 0.25);
  CHECK(r.f_minus1 == 1.0);
  CHECK(r.status == ExtraStepResult::Status::decreased);
}

TEST_CASE("extra step: stationary start") {
  const auto f = testing::diag_objective({2.0}, {0.0});
  const ExtraStepResult r = extra_step(*f, {0.0}, 1.0);
  CHECK(r.x0[0] == 0.0);
  CHECK_FALSE(r.f_decreased);
  CHECK(r.status == ExtraStepResult::Status::at_optimum);
}

TEST_CASE("extra step: halvings from a start near the optimum") {
  const auto f = testing::diag_objective({2.0}, {0.0});
  const auto fx = [](double x) { return x * x; };
  const int expect = reference_halvings(fx, 0.1, 1.0, 1.0);
  CHECK(expect == 3);
  const ExtraStepResult r = extra_step(*f, {0.1}, 1.0);
  CHECK(r.halvings == expect);
  CHECK(r.tau_final == 0.125);
  CHECK(r.x0[0] == doctest::Approx(-0.025).epsilon(1e-15));
  CHECK(r.f0 < r.f_minus1);
  // The sufficient probe size ||grad||_1 / L = 0.2 bounds the accepted one.
  CHECK(r.tau_final < 0.2);
}

TEST_CASE("extra step: exhausted budget and bad tau") {
  const auto f = testing::diag_objective({2.0}, {0.0});
  const ExtraStepResult r = extra_step(*f, {1e-3}, 1e3, 2);
  CHECK(r.status == ExtraStepResult::Status::exhausted);
  CHECK_FALSE(r.f_decreased);
  CHECK(r.x0[0] == 1e-3);
  CHECK_THROWS_AS(extra_step(*f, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("extra step leaves zero-gradient coordinates alone") {
  const auto f = testing::diag_objective({1.0, 1.0}, {0.0, 0.0});
  const ExtraStepResult r = extra_step(*f, {0.5, 0.0}, 0.5);
  CHECK(r.x0 == DenseVector{0.0, 0.0});
}

TEST_CASE("extra step: accepted probe always lowers f") {
  const auto f = quadratic(8, 5);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const DenseVector x = random_start(f->problem(), s, 0.01 + 0.2 * static_cast<double>(s));
    const ExtraStepResult r = extra_step(*f, x, 1.0);
    REQUIRE(r.f_decreased);
    CHECK(r.f0 < r.f_minus1);
    CHECK(f->value(r.x0) == r.f0);
    CHECK(linf_distance(r.x0, x) == doctest::Approx(r.tau_final).epsilon(1e-12));
  }
}

TEST_CASE("phi on x^2/2 without the extra step") {
  const auto f = testing::diag_objective({1.0}, {0.0});
  const GradientOracle oracle(*f, {});
  PhiOptions opt;
  opt.T = 2;
  opt.extra_step = false;
  const PhiEvaluation e = evaluate_phi(oracle, {1.0}, 0.25, opt);
  CHECK(e.n_t == 0.375);
  CHECK(e.d_t == 1.0);
  CHECK(e.zeta == 0.5);
  CHECK(e.phi == 0.375);
}

TEST_CASE("phi stays bounded as gamma goes to zero") {
  const auto f = testing::diag_objective({1.0}, {0.0});
  const GradientOracle oracle(*f, {});
  PhiOptions opt;
  opt.T = 10;
  opt.tau_s = 0.25;  // probe lands on x^0 = 0.75
  const PhiEvaluation e = evaluate_phi(oracle, {1.0}, 1e-12, opt);
  CHECK(e.d_t == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(e.n_t == doctest::Approx(0.5 - 0.5 * 0.75 * 0.75).epsilon(1e-9));
  CHECK(std::isfinite(e.phi));
}

TEST_CASE("phi times D equals N") {
  const auto f = quadratic(10, 42);
  const GradientOracle oracle(*f, {});
  PhiOptions opt;
  opt.T = 50;
  for (double g : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const PhiEvaluation e = evaluate_phi(oracle, random_start(f->problem(), 2, 0.5), g, opt);
    REQUIRE_FALSE(e.divergent);
    CHECK(e.d_t > 0.0);
    CHECK(e.phi * e.d_t == doctest::Approx(e.n_t).epsilon(1e-12));
  }
}

TEST_CASE("phi of a divergent launch is zero") {
  const auto f = testing::diag_objective({1.0}, {0.0});
  const GradientOracle oracle(*f, {});
  PhiOptions opt;
  opt.T = 5;
  opt.extra_step = false;
  const PhiEvaluation e = evaluate_phi(oracle, {1.0}, 1e60, opt);
  CHECK(e.divergent);
  CHECK(e.phi == 0.0);
}

TEST_CASE("bisection with constant phi") {
  SUBCASE("fixed point inside") {
    const BisectionOutcome o = bisection(constant_phi(0.1), 0.01, 1.0);
    CHECK(o.converged());
    CHECK(o.lo_star <= 0.1);
    CHECK(o.hi_star > 0.1);
    CHECK(o.hi_star <= 2.0 * o.lo_star);
    // The first midpoint sqrt(0.01 * 1) is exactly 0.1, so the "mid <= phi"
    // branch sets lo = phi(lo). Only that tie may break the strict form.
    for (const auto& st : o.steps) {
      CHECK(st.lo <= st.phi_lo);
      CHECK(st.hi > st.phi_hi);
      CHECK((st.invariants_hold || st.lo == st.phi_lo));
    }
    // Equal N on both ends and hi > phi: the final test keeps lo.
    CHECK(o.kind == BisectionKind::converged_lo);
    CHECK(o.gamma0 == o.lo_star);
  }
  SUBCASE("hi below the fixed point") {
    const BisectionOutcome o = bisection(constant_phi(10.0), 0.01, 1.0);
    CHECK(o.kind == BisectionKind::infinite_early);
    CHECK(std::isnan(o.gamma0));
    CHECK(o.launches == 1);
  }
  SUBCASE("lo above the fixed point") {
    const BisectionOutcome o = bisection(constant_phi(0.001), 0.01, 1.0);
    CHECK(o.kind == BisectionKind::lo_early);
    CHECK(o.gamma0 == 0.01);
    CHECK(o.launches == 2);
  }
  CHECK_THROWS_AS(bisection(constant_phi(1.0), 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bisection(constant_phi(1.0), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("bisection halves the log ratio each step") {
  for (int k = 1; k <= 6; ++k) {
    const double lo = 1e-6, hi = std::ldexp(lo, 1 << k);
    const BisectionOutcome o = bisection(constant_phi(std::sqrt(lo * hi) * 1.37), lo, hi);
    CAPTURE(k);
    REQUIRE(o.converged());
    CHECK(o.launches <= k + 2);
    double prev = std::log(hi / lo);
    for (const auto& s : o.steps) {
      const double cur = std::log(s.hi / s.lo);
      CHECK(cur == doctest::Approx(prev / 2.0).epsilon(1e-9));
      CHECK(s.invariants_hold);
      prev = cur;
    }
  }
}

TEST_CASE("bisection with a decreasing phi brackets its fixed point") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-8.0, -1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = std::pow(10.0, u(rng));
    const PhiFn phi = [c](double g, std::uint64_t) {
      PhiEvaluation e;
      e.gamma = g;
      e.n_t = c;
      e.d_t = g;
      e.phi = c / g;
      return e;
    };
    const BisectionOutcome o = bisection(phi, 1e-6, std::ldexp(1e-6, 16));
    if (!o.converged()) continue;
    CHECK(o.lo_star <= std::sqrt(c));
    CHECK(o.hi_star >= std::sqrt(c));
    CHECK(o.invariant_violations == 0);
  }
}

TEST_CASE("quadratic inequality utility") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0), xs(-20.0, 40.0);
  int used = 0;
  for (int i = 0; i < 100000; ++i) {
    const double uu = u(rng), vv = u(rng) * u(rng), x = xs(rng);
    if (x * x - uu * x - vv > 0.0) continue;
    ++used;
    CHECK(x <= uu + std::sqrt(vv) + 1e-12);
  }
  CHECK(used > 1000);
}

TEST_CASE("SOS Sign-SGD on the quadratic fixture") {
  const auto f = quadratic(10, 42);
  const double L = f->problem().linf_bound;
  const GradientOracle oracle(*f, {});
  SosParams p;
  p.T = 500;
  p.k = 3;
  p.gamma_s = 1e-6;

  SUBCASE("start close enough for gamma_hi to enter") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const DenseVector xm1 = random_start(f->problem(), s, 1e-4);
      const SosResult r = sos_sign_sgd(oracle, xm1, p);
      REQUIRE_FALSE(r.outcome.kind == BisectionKind::infinite_early);
      const double delta = r.trace.at(-1)->f - f->problem().f_star;
      const double g0 = r.trace.at(0)->grad_l1;
      CHECK(r.trace.avg_grad_l1() <= 6.0 * std::sqrt(delta * L / p.T) + 3.0 * g0 / p.T);
      CHECK(r.outcome.launches <= p.k + 2);
      CHECK(r.total_launches == r.outcome.launches + 1);
      CHECK(r.trace.records.size() == p.T + 2);
      if (r.outcome.converged()) {
        const double g = r.outcome.gamma0;
        const auto& at = r.outcome.eval_at_gamma0();
        CHECK(at.n_t / (2.0 * r.outcome.eval_hi.d_t) <= g * (1 + 1e-12));
        CHECK(g <= r.outcome.eval_lo.n_t / at.d_t * (1 + 1e-12));
        CHECK(r.outcome.invariant_violations == 0);
      }
    }
  }
  SUBCASE("a far start terminates early with a config error") {
    const DenseVector xm1 = random_start(f->problem(), 0, 1.0);
    try {
      sos_sign_sgd(oracle, xm1, p);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "method.k");
    }
  }
  SUBCASE("k range") {
    p.k = 0;
    CHECK_THROWS_AS(sos_sign_sgd(oracle, DenseVector(10), p), ConfigError);
    p.k = 10;
    CHECK_THROWS_AS(sos_sign_sgd(oracle, DenseVector(10), p), ConfigError);
  }
}

TEST_CASE("SOS steepest on x^2/2") {
  const auto f = testing::diag_objective({1.0}, {0.0});
  const GradientOracle oracle(*f, {});
  const SteepestProbe probe = steepest_probe(oracle, {1.0});
  CHECK(probe.l_minus1 == 1.0);
  CHECK(steepest_entry_bound(probe) > 1.0);
  CHECK(steepest_entry_bound(probe) == std::nextafter(1.0, 2.0));

  SosSteepestParams p;
  p.T = 30;
  p.c_s = steepest_entry_bound(probe);
  const SosResult r = sos_steepest(oracle, {1.0}, p);
  REQUIRE(r.outcome.converged());
  CHECK(r.outcome.lo_star <= 1.0);
  CHECK(r.outcome.hi_star > 1.0);
  CHECK(r.trace.records.front().t == -1);
  const double c = r.outcome.gamma0 / 2.0;
  const double rate = std::abs(1.0 - c);
  CHECK(rate < 1.0);
  for (std::size_t i = 2; i < r.trace.records.size(); ++i) {
    const double prev = r.trace.records[i - 1].grad_l1;
    CHECK(r.trace.records[i].grad_l1 <= rate * prev * (1 + 1e-12) + 1e-300);
  }
}

TEST_CASE("SOS steepest entry bound and rate on the quadratic") {
  const auto f = quadratic(10, 42);
  const double L = f->problem().linf_bound;
  const GradientOracle oracle(*f, {});
  for (std::uint64_t s = 0; s < 10; ++s) {
    const DenseVector xm1 = random_start(f->problem(), s, 1.0);
    SosSteepestParams p;
    p.T = 1000;
    p.c_s = steepest_entry_bound(steepest_probe(oracle, xm1));
    const SosResult r = sos_steepest(oracle, xm1, p);
    CHECK(r.outcome.kind != BisectionKind::infinite_early);
    const double delta = r.trace.f0() - f->problem().f_star;
    CHECK(r.trace.avg_grad_l1_sq() <= 8.0 * delta * L / p.T + 1e-12);
  }
}

TEST_CASE("SOS steepest errors") {
  const auto f = testing::diag_objective({1.0}, {0.0});
  const GradientOracle oracle(*f, {});
  SosSteepestParams p;
  p.c_s = 0.5;  // below 1 / L^-1 = 1, so phi(c_hi) = 1 >= c_hi
  CHECK_THROWS_AS(sos_steepest(oracle, {1.0}, p), ConfigError);
  p.c_s = 2.0;
  CHECK_THROWS_AS(sos_steepest(oracle, {0.0}, p), Error);
}
