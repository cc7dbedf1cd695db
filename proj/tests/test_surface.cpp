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

#include "hypfay/quadrature.hpp"
#include "hypfay/suite.hpp"
#include "hypfay/surface.hpp"

using namespace hypfay;

namespace {

const Surface& symmetric_g1() {
  static const Surface s(Curve::real({-2.0, -1.0, 1.0, 2.0}));
  return s;
}

const Surface& generic_g2() {
  static const Surface s(genus2_curves().front());
  return s;
}

// Distance of v from the lattice Z^g + tau Z^g.
double lattice_distance(const CMat& tau, const CVec& v) {
  const RVec n = tau.imag().ldlt().solve(RVec(v.imag()));
  const RVec m = v.real() - tau.real() * n;
  const RVec nr = n.array().round().matrix(), mr = m.array().round().matrix();
  return (v - mr.cast<cplx>() - tau * nr.cast<cplx>()).cwiseAbs().maxCoeff();
}

cplx random_point(const Surface& s, std::mt19937_64& rng) {
  const double sc = s.curve().scale();
  std::uniform_real_distribution<double> re(-1.2 * sc, 1.2 * sc), im(0.3 * sc, 1.0 * sc);
  return {re(rng), im(rng)};
}

// Straight-segment integral of du from a to b on the plus sheet.
CVec segment_du(const Surface& s, cplx a, cplx b) {
  const cplx d = b - a;
  auto f = [&](double t) -> CVec { return s.du(SurfacePoint::at(s.curve(), a + t * d)) * d; };
  return quad::gauss_kronrod(f, 0.0, 1.0, 1e-14).value;
}

}  // namespace

TEST_CASE("Abel map base point and path independence") {
  const Surface& s = generic_g2();
  CHECK(s.cover(SurfacePoint::infinity(Sheet::Plus)).u.cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    const cplx a = random_point(s, rng), b = random_point(s, rng);
    const CVec direct = s.cover(b).u - s.cover(a).u;
    const CVec mid = segment_du(s, a, b);
    CHECK((direct - mid).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Abel map under the involution") {
  const Surface& s = generic_g2();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    const SurfacePoint p = SurfacePoint::at(s.curve(), random_point(s, rng));
    const CVec sum = s.cover(p).u + s.cover(involution(p)).u - s.u_inf();
    CHECK(sum.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.du(p) + s.du(involution(p))).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("Abel values at the branch points") {
  const Surface& s = symmetric_g1();
  CHECK(std::abs(s.abel_weierstrass(1)(0) - s.abel_weierstrass(0)(0) - 0.5) < 1e-12);
  CHECK(std::abs(s.abel_weierstrass(3)(0) - s.abel_weierstrass(2)(0) + 0.5) < 1e-12);
  for (const Surface* surf : {&symmetric_g1(), &generic_g2()}) {
    const int g = surf->genus();
    CVec sa = CVec::Zero(g), sb = CVec::Zero(g);
    for (int k = 0; k <= g; ++k) {
      sa += surf->abel_weierstrass(2 * k);
      sb += surf->abel_weierstrass(2 * k + 1);
    }
    CHECK((sa - sb).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(surf->u_inf().real().cwiseAbs().maxCoeff() < 1e-9);
    CHECK((surf->u_inf() - 2.0 * surf->abel_weierstrass(0)).cwiseAbs().maxCoeff() < 1e-12);
    for (int j = 0; j < 2 * g + 2; ++j) {
      CHECK(lattice_distance(surf->periods().tau, surf->abel_weierstrass(j) - surf->abel_branch_direct(j)) < 1e-9);
    }
  }
}

TEST_CASE("Abel value at the point at infinity on the minus sheet") {
  // Twice the plus-sheet integral of du along the real axis from -infinity to
  // the first branch point: x = a0 - t^2 near the branch point, then
  // x = a0 - 1 - t / (1 - t) for the tail.
  const Surface& s = symmetric_g1();
  const double a0 = s.curve().left(0).real();
  auto du_at = [&](double x) -> CVec { return s.du(SurfacePoint::at(s.curve(), x)); };
  auto near = [&](double t) -> CVec { return du_at(a0 - t * t) * (2.0 * t); };
  auto tail = [&](double t) -> CVec { return du_at(a0 - 1.0 - t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)); };
  const CVec oracle = 2.0 * (quad::gauss_kronrod(near, 0.0, 1.0, 1e-14).value +
                             quad::gauss_kronrod(tail, 0.0, 1.0, 1e-14).value);
  CHECK((oracle - s.u_inf()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(lattice_distance(s.periods().tau, s.u_inf() - 0.5 * s.periods().tau.col(0)) < 1e-9);
  // the lattice shift on this path is -tau
  CHECK(std::abs(s.u_inf()(0) + 0.5 * s.periods().tau(0, 0)) < 1e-9);
}

TEST_CASE("prime form") {
  const Surface& s = generic_g2();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const cplx x = random_point(s, rng), y = random_point(s, rng);
    const CoverPoint a = s.cover(x), b = s.cover(y);
    HalfFormRegistry reg;
    CHECK(std::abs(s.prime_form(a, b, reg) + s.prime_form(b, a, reg)) < 1e-12 * std::abs(s.prime_form(a, b, reg)));
    CHECK(std::abs(s.prime_form(a, a, reg)) < 1e-10);
    const double h = 1e-5 * s.curve().scale();
    const CoverPoint c = s.cover(x + h);
    const cplx ratio = s.prime_form_squared(a, c) / ((x + h - x) * (x + h - x));
    CHECK(std::abs(ratio - 1.0) < 1e-8);
    const cplx p2 = s.prime_form(a, b, reg);
    CHECK(std::abs(p2 * p2 - s.prime_form_squared(a, b)) < 1e-12 * std::abs(p2 * p2));
  }
  CHECK(s.odd().parity() == 1);
  CHECK(s.odd_gradient().norm() > 1e-6);
}

TEST_CASE("reduced form against the prime forms at infinity") {
  const Surface& s = generic_g2();
  const CoverPoint ip = s.infinity(Sheet::Plus), im = s.infinity(Sheet::Minus);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    const CoverPoint z = s.cover(random_point(s, rng));
    const cplx eta = s.eta(z);
    const cplx rel = eta * eta * s.prime_form_squared(z, ip) * s.prime_form_squared(z, im) / s.prime_form_squared(ip, im);
    CHECK(std::abs(rel - 1.0) < 1e-10);
    // sheet swap exchanges the two points at infinity
    const CoverPoint zt = s.cover(involution(z.point));
    const cplx swapped = s.eta(zt) * s.eta(zt) * s.prime_form_squared(zt, ip) * s.prime_form_squared(zt, im) /
                         s.prime_form_squared(ip, im);
    CHECK(std::abs(swapped - 1.0) < 1e-9);
  }
  const Surface& g1 = symmetric_g1();
  for (double y : {0.5, 1.0, 3.0}) {
    const cplx eta = g1.eta(g1.cover(cplx(0.0, y)));
    CHECK(std::isfinite(eta.real()));
    CHECK(std::isfinite(eta.imag()));
  }
}

TEST_CASE("fundamental bidifferential") {
  const Surface& s = generic_g2();
  std::mt19937_64 rng(5);
  const CoverPoint a = s.cover(random_point(s, rng)), b = s.cover(random_point(s, rng));
  CHECK(std::abs(s.bidifferential(a, b) - s.bidifferential(b, a)) < 1e-12 * std::abs(s.bidifferential(a, b)));
  CHECK_THROWS_AS(s.bidifferential(a, a), Error);

  for (int h = 1; h <= 2; ++h) {
    const Differential form{[&](cplx x, cplx sx) {
                              SurfacePoint p;
                              p.x = x;
                              p.s = sx;
                              return s.bidifferential(s.cover(p, false), b) * sx / sx;
                            },
                            "B(., w)"};
    const cplx period = integrate_differential(s.curve(), a_cycle(s.curve(), h, 0.3), form, 1e-10).value;
    CHECK(std::abs(period) < 1e-9);
  }
}

TEST_CASE("double integral of the bidifferential") {
  const Surface& s = generic_g2();
  const cplx z1(-0.8, 1.4), zt1(-1.9, 0.9), z2(1.3, 1.1), zt2(2.2, 0.6);
  const quad::Rule& r = quad::gauss_legendre(40);
  std::vector<CoverPoint> p1, p2;
  for (double x : r.x) {
    p1.push_back(s.cover(zt1 + 0.5 * (1.0 + x) * (z1 - zt1)));
    p2.push_back(s.cover(zt2 + 0.5 * (1.0 + x) * (z2 - zt2)));
  }
  cplx acc{};
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      acc += 0.25 * r.w[i] * r.w[j] * s.bidifferential(p1[i], p2[j]) * (z1 - zt1) * (z2 - zt2);
    }
  }
  const CoverPoint a = s.cover(z1), at = s.cover(zt1), b = s.cover(z2), bt = s.cover(zt2);
  const cplx ratio2 = s.prime_form_squared(a, b) * s.prime_form_squared(at, bt) /
                      (s.prime_form_squared(a, bt) * s.prime_form_squared(at, b));
  CHECK(std::abs(std::exp(2.0 * acc) - ratio2) < 1e-10 * std::abs(ratio2));
}

TEST_CASE("third and second kind differentials") {
  const Surface& s = generic_g2();
  const CoverPoint p = s.cover(cplx(-1.0, 1.2)), q = s.cover(cplx(1.5, 1.0));
  const int n = 64;
  const double r = 0.05;
  cplx res{};
  for (int j = 0; j < n; ++j) {
    const cplx e = std::exp(kI * (2.0 * kPi * (j + 0.5) / n));
    res += s.third_kind(p, q, s.cover(q.point.X() + r * e)) * (kI * r * e) * (2.0 * kPi / n);
  }
  CHECK(std::abs(res / (2.0 * kPi * kI) - 1.0) < 1e-10);

  const SurfacePoint center = SurfacePoint::at(s.curve(), cplx(0.2, 1.3));
  for (int k : {1, 2}) {
    const CyclePath cyc = a_cycle(s.curve(), 1, 0.3);
    cplx period{};
    const quad::Rule& rule = quad::gauss_legendre(24);
    for (const Arc& arc : cyc.arcs) {
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = 0.5 * (1.0 + rule.x[i]);
        const CoverPoint z = s.cover(SurfacePoint::at(s.curve(), arc.point(t), arc.sheet), false);
        period += 0.5 * rule.w[i] * s.second_kind(center, k, z, 48) * arc.tangent(t);
      }
    }
    CHECK(std::abs(period) < 1e-8);
  }
}
