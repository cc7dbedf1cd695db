/*
 * Copyright 2026 The hypfay Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include <doctest.h>

#include "hypfay/suite.hpp"
#include "hypfay/theta.hpp"

using namespace hypfay;

namespace {

CMat scalar_tau(cplx t) {
  CMat m(1, 1);
  m(0, 0) = t;
  return m;
}

CVec random_vector(int g, std::mt19937_64& rng, double spread = 0.5) {
  std::uniform_real_distribution<double> d(-spread, spread);
  CVec z(g);
  for (int i = 0; i < g; ++i) z(i) = cplx(d(rng), d(rng));
  return z;
}

Characteristic random_characteristic(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Characteristic c = Characteristic::zero(g);
  for (int i = 0; i < g; ++i) {
    c.mu(i) = d(rng);
    c.nu(i) = d(rng) - 0.5;
  }
  return c;
}

// Direct double-loop lattice sum for genus 1.
cplx theta1_oracle(cplx tau, double mu, double nu, cplx z, int cutoff) {
  cplx acc = 0.0;
  for (int n = -cutoff; n <= cutoff; ++n) {
    const double m = n + mu;
    acc += std::exp(kI * kPi * m * m * tau + 2.0 * kI * kPi * m * (z + nu));
  }
  return acc;
}

}  // namespace

TEST_CASE("theta at the square lattice") {
  const ThetaContext ctx(scalar_tau(kI));
  const cplx oracle = theta1_oracle(kI, 0.0, 0.0, 0.0, 10);
  CHECK(std::abs(oracle - 1.0864348112133080) < 1e-15);
  CHECK(std::abs(ctx.value(Characteristic::zero(1), CVec::Zero(1)) - oracle) < 1e-14);
  CHECK(std::abs(ctx.value(Characteristic::half({1}, {1}), CVec::Zero(1))) < 1e-12);
}

TEST_CASE("theta against the direct lattice sum with characteristics") {
  std::mt19937_64 rng(5);
  const cplx tau(0.3, 0.9);
  const ThetaContext ctx(scalar_tau(tau));
  for (int i = 0; i < 20; ++i) {
    const Characteristic c = random_characteristic(1, rng);
    const CVec z = random_vector(1, rng, 2.0);
    const cplx oracle = theta1_oracle(tau, c.mu(0), c.nu(0), z(0), 40);
    CHECK(std::abs(ctx.value(c, z) - oracle) < 1e-13 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("quasi-periodicity") {
  std::mt19937_64 rng(9);
  for (int g : {1, 2, 3}) {
    const CMat tau = random_riemann_matrix(g, rng);
    const ThetaContext ctx(tau);
    std::uniform_int_distribution<int> step(-2, 2);
    for (int i = 0; i < 10; ++i) {
      const Characteristic c = random_characteristic(g, rng);
      const CVec z = random_vector(g, rng);
      RVec m(g), n(g);
      for (int k = 0; k < g; ++k) {
        m(k) = step(rng);
        n(k) = step(rng);
      }
      const CVec shifted = z + m.cast<cplx>() + tau * n.cast<cplx>();
      const cplx factor = std::exp(2.0 * kI * kPi * m.dot(c.mu) -
                                   kI * kPi * n.cast<cplx>().dot(tau * n.cast<cplx>() + 2.0 * z + 2.0 * c.nu.cast<cplx>()));
      const cplx lhs = ctx.value(c, shifted);
      const cplx rhs = factor * ctx.value(c, z);
      CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
    }
  }
}

TEST_CASE("gradient and Hessian") {
  std::mt19937_64 rng(21);
  for (int g : {1, 2}) {
    const ThetaContext ctx(random_riemann_matrix(g, rng));
    for (int i = 0; i < 10; ++i) {
      const Characteristic c = random_characteristic(g, rng);
      const CVec z = random_vector(g, rng);
      const CVec grad = ctx.gradient(c, z);
      const double h = 1e-5;
      for (int k = 0; k < g; ++k) {
        CVec e = CVec::Zero(g);
        e(k) = h;
        const cplx fd = (ctx.value(c, z + e) - ctx.value(c, z - e)) / (2.0 * h);
        CHECK(std::abs(fd - grad(k)) < 1e-7 * std::max(1.0, grad.cwiseAbs().maxCoeff()));
      }
      const CMat hess = ctx.hessian(c, z);
      CHECK((hess - hess.transpose()).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, hess.cwiseAbs().maxCoeff()));
      const ThetaJet jet = ctx.jet(c, z);
      CHECK(std::abs(jet.value - ctx.value(c, z)) < 1e-14 * std::abs(jet.value));
    }
    CHECK(ctx.gradient(Characteristic::zero(g), CVec::Zero(g)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("half-integer characteristics") {
  CHECK(Characteristic::half({1}, {1}).parity() == 1);
  CHECK(Characteristic::half({1, 0}, {0, 1}).parity() == 0);
  CHECK(Characteristic::half({1, 1}, {1, 0}).parity() == 1);
  CHECK(Characteristic::half({1}, {0}).is_half_integer());
  std::mt19937_64 rng(4);
  const ThetaContext ctx(random_riemann_matrix(2, rng));
  for (const auto& [e, ep] : {std::pair{std::vector{1, 0}, std::vector{1, 0}}, std::pair{std::vector{1, 1}, std::vector{0, 1}}}) {
    CHECK(std::abs(ctx.value(Characteristic::half(e, ep), CVec::Zero(2))) < 1e-12);
  }
}

TEST_CASE("binary addition theorem") {
  std::mt19937_64 rng(33);
  for (int g : {1, 2}) {
    const CMat tau = random_riemann_matrix(g, rng);
    const ThetaContext half(tau / 2.0), full(tau);
    for (int i = 0; i < 10; ++i) {
      const Characteristic c = random_characteristic(g, rng), cp = random_characteristic(g, rng);
      const double r = binary_addition_check(half, full, c, cp, random_vector(g, rng), random_vector(g, rng));
      CHECK(r < (g == 1 ? 1e-9 : 1e-8));
    }
    const Characteristic c = random_characteristic(g, rng);
    CHECK(binary_addition_check(half, full, c, c, random_vector(g, rng), CVec::Zero(g)) < 1e-9);
  }
  CHECK(half_periods(2).size() == 4);
}

TEST_CASE("modular relation") {
  const CMat tau = scalar_tau(2.0 * kI);
  const Characteristic zero = Characteristic::zero(1);
  const ModularRelation rel(tau, zero, CVec::Zero(1));
  const cplx probe = ThetaContext(scalar_tau(-1.0 / (2.0 * 2.0 * kI))).value(zero, CVec::Zero(1)) /
                     ThetaContext(scalar_tau(4.0 * kI)).value(zero, CVec::Zero(1));
  CHECK(std::abs(rel.d - probe) < 1e-13 * std::abs(probe));

  std::mt19937_64 rng(17);
  for (int g : {1, 2}) {
    const CMat t = g == 1 ? tau : random_riemann_matrix(g, rng);
    const Characteristic c = random_characteristic(g, rng);
    const ModularRelation a(t, c, random_vector(g, rng));
    const ModularRelation b(t, c, random_vector(g, rng));
    CHECK(std::abs(a.d - b.d) < 1e-9 * std::abs(a.d));
    for (int i = 0; i < 10; ++i) CHECK(a.residual(random_vector(g, rng)) < 1e-9);
  }
}

TEST_CASE("truncation window") {
  std::mt19937_64 rng(8);
  const ThetaContext ctx(random_riemann_matrix(2, rng));
  CHECK(ctx.tail_bound() < 1e-15);
  const ThetaContext wide = ctx.with_radius(2.0 * ctx.radius());
  const Characteristic c = random_characteristic(2, rng);
  for (int i = 0; i < 5; ++i) {
    CVec z = random_vector(2, rng);
    z *= 4.0;
    const cplx a = ctx.value(c, z), b = wide.value(c, z);
    CHECK(std::abs(a - b) < 1e-13 * std::abs(b));
  }
}

TEST_CASE("selftest report") {
  const ThetaSelftest t = theta_selftest(2, 1, 20);
  CHECK(t.genus == 2);
  CHECK(t.residuals.size() >= 8);
  CHECK(t.max_residual() < 1e-8);
}
