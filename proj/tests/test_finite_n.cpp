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
#include <json.hpp>

#include "hypfay/finite_n.hpp"
#include "hypfay/quadrature.hpp"

using namespace hypfay;

namespace {

EnsembleSpec gaussian_on_unit_interval() {
  EnsembleSpec s;
  s.intervals = {{-1.0, 1.0}};
  s.v_coeffs = (RVec(3) << 0.0, 0.0, 1.0).finished();
  s.beta = 2;
  s.N = 1;
  return s;
}

// int f(l) exp(-l^2) dl / int exp(-l^2) dl on [-1, 1] by Gauss-Legendre.
cplx one_point_oracle(const std::function<cplx(double)>& f, int nodes) {
  const quad::Rule& r = quad::gauss_legendre(nodes);
  cplx num{};
  double den = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double w = r.w[i] * std::exp(-r.x[i] * r.x[i]);
    num += w * f(r.x[i]);
    den += w;
  }
  return num / den;
}

SkewMatrix random_skew(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  SkewMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a.set(i, j, cplx(d(rng), d(rng)));
  }
  return a;
}

// Sum over all permutations of S_4 with sign, divided by 2^2 2!.
cplx pfaffian_by_permutations(const SkewMatrix& a) {
  std::array<int, 4> p{0, 1, 2, 3};
  cplx acc{};
  do {
    int inversions = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) inversions += p[i] > p[j];
    }
    acc += (inversions % 2 ? -1.0 : 1.0) * a(p[0], p[1]) * a(p[2], p[3]);
  } while (std::next_permutation(p.begin(), p.end()));
  return acc / 8.0;
}

}  // namespace

TEST_CASE("one-particle averages") {
  const EnsembleSpec spec = gaussian_on_unit_interval();
  const EnsembleAverage a = average(spec, 1, {{cplx(2.0), 1}});
  CHECK(std::abs(a.mean - one_point_oracle([](double l) { return cplx(2.0 - l); }, 128)) < 1e-12);

  const cplx x(0.3, 0.8), y(-0.4, -0.6);
  const EnsembleAverage b = average(spec, 1, {{x, 1}, {y, -1}});
  CHECK(std::abs(b.mean - one_point_oracle([&](double l) { return (x - l) / (y - l); }, 128)) < 1e-11);
  CHECK(b.change < 1e-10);
  const double z = quad::composite_legendre([](double l) { return std::exp(-l * l); }, -1.0, 1.0, 4, 32);
  CHECK(std::abs(b.partition - z) < 1e-12);
}

TEST_CASE("normalization and cancelling factors") {
  const EnsembleSpec spec = default_ensemble(2, 2);
  CHECK(std::abs(average(spec, 2, {}).mean - 1.0) < 1e-14);
  const cplx x(0.1, 0.7);
  CHECK(std::abs(average(spec, 2, {{x, 1}, {x, -1}}).mean - 1.0) < 1e-14);
}

TEST_CASE("ensemble validation") {
  EnsembleSpec s = gaussian_on_unit_interval();
  s.v_coeffs = (RVec(4) << 0.0, 0.0, 0.0, 1.0).finished();
  CHECK_THROWS_AS(s.validate(), Error);
  s = gaussian_on_unit_interval();
  s.v_coeffs(2) = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = gaussian_on_unit_interval();
  s.beta = 3;
  CHECK_THROWS_AS(s.validate(), Error);
  s = gaussian_on_unit_interval();
  s.intervals = {{-1.0, 0.5}, {0.2, 1.0}};
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK(default_ensemble(2, 2).contains(cplx(1.0)));
  CHECK(!default_ensemble(2, 2).contains(cplx(0.0)));
}

TEST_CASE("Pfaffians") {
  SkewMatrix two(2);
  two.set(0, 1, cplx(1.5, -0.5));
  CHECK(std::abs(pfaffian(two) - cplx(1.5, -0.5)) < 1e-15);

  std::mt19937_64 rng(7);
  const SkewMatrix four = random_skew(4, rng);
  const cplx def = four(0, 1) * four(2, 3) - four(0, 2) * four(1, 3) + four(0, 3) * four(1, 2);
  CHECK(std::abs(pfaffian_by_permutations(four) - def) < 1e-14);
  CHECK(std::abs(pfaffian(four) - def) < 1e-13);
  CHECK(std::abs(pfaffian_expansion(four) - def) < 1e-13);

  for (int n : {6, 8}) {
    const SkewMatrix a = random_skew(n, rng);
    const cplx p = pfaffian(a);
    CHECK(std::abs(p * p - a.dense().determinant()) < 1e-12 * std::abs(p * p));
    CHECK(std::abs(p - pfaffian_expansion(a)) < 1e-12 * std::abs(p));
  }
  CHECK_THROWS_AS(pfaffian(SkewMatrix(3)), Error);
  const SkewMatrix a = random_skew(4, rng);
  CHECK(std::abs(a(2, 1) + a(1, 2)) == 0.0);
}

TEST_CASE("determinantal formula for beta = 2") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2}) {
    const EnsembleSpec spec = default_ensemble(2, n);
    const auto p = sample_kernel_points(spec, 4, rng);
    const KernelReport r = check_beta2_kernel(spec, {p[0]}, {p[1]}, {p[2]}, {p[3]});
    CHECK(r.residual < (n == 1 ? 1e-9 : 1e-8));
    CHECK(r.max_dimension <= kMaxDimension);
  }
  const EnsembleSpec spec = default_ensemble(2, 1);
  const auto p = sample_kernel_points(spec, 8, rng);
  const KernelReport two = check_beta2_kernel(spec, {p[0], p[1]}, {p[2], p[3]}, {p[4], p[5]}, {p[6], p[7]});
  CHECK(two.residual < 1e-8);
  // relabelling the pairs leaves both sides unchanged
  const KernelReport swapped = check_beta2_kernel(spec, {p[1], p[0]}, {p[3], p[2]}, {p[4], p[5]}, {p[6], p[7]});
  CHECK(std::abs(swapped.lhs - two.lhs) < 1e-13 * std::abs(two.lhs));
  CHECK(std::abs(swapped.rhs - two.rhs) < 1e-8 * std::abs(two.rhs));
  const KernelReport mixed = check_beta2_kernel(spec, {p[0]}, {p[1]}, {p[4], p[5]}, {p[6], p[7]});
  CHECK(mixed.residual < 1e-8);
}

TEST_CASE("coincident pair in the determinantal formula") {
  std::mt19937_64 rng(12);
  const EnsembleSpec spec = default_ensemble(2, 2);
  const auto p = sample_kernel_points(spec, 3, rng);
  const KernelReport at = check_beta2_kernel(spec, {p[1]}, {p[1]}, {p[0]}, {p[2]});
  CHECK(at.residual < 1e-8);
  // cubic extrapolation of the offset evaluations to zero offset
  auto rhs_at = [&](double eps) { return check_beta2_kernel(spec, {p[1] + eps}, {p[1]}, {p[0]}, {p[2]}).rhs; };
  const cplx extrapolated = 3.0 * rhs_at(1e-3) - 3.0 * rhs_at(2e-3) + rhs_at(3e-3);
  CHECK(std::abs(extrapolated - at.rhs) < 1e-8 * std::abs(at.rhs));
}

TEST_CASE("Pfaffian formulas for beta = 1 and beta = 4") {
  std::mt19937_64 rng(13);
  for (int beta : {1, 4}) {
    for (int particles : beta == 1 ? std::vector<int>{2} : std::vector<int>{1, 2}) {
      const EnsembleSpec spec = default_ensemble(beta, particles);
      const auto p = sample_kernel_points(spec, 2, rng);
      const KernelReport r =
          beta == 1 ? check_beta1_kernel(spec, {p[0]}, {p[1]}) : check_beta4_kernel(spec, {p[0]}, {p[1]});
      CHECK(r.residual < 1e-12);
    }
    const EnsembleSpec spec = default_ensemble(beta, beta == 1 ? 2 : 1);
    const auto p = sample_kernel_points(spec, 4, rng);
    const KernelReport r = beta == 1 ? check_beta1_kernel(spec, {p[0], p[1]}, {p[2], p[3]})
                                     : check_beta4_kernel(spec, {p[0], p[1]}, {p[2], p[3]});
    CHECK(r.residual < 1e-6);
    CHECK(r.max_dimension <= kMaxDimension);
  }
  CHECK_THROWS_AS(check_beta1_kernel(default_ensemble(4, 1), {cplx(0.0, 1.0)}, {cplx(0.0, -1.0)}), Error);
}

TEST_CASE("runs are reproducible") {
  FiniteNOptions o;
  o.beta = 4;
  o.N = 1;
  o.m = 2;
  o.seed = 5;
  o.samples = 1;
  const FiniteNRun a = run_finite_n(o), b = run_finite_n(o);
  CHECK(a.passed());
  CHECK(finite_n_to_json(a) == finite_n_to_json(b));
  const auto doc = nlohmann::json::parse(finite_n_to_json(a));
  CHECK(doc["schema"] == "hypfay/1");
  CHECK(doc["max_residual"].get<double>() < 1e-6);
  CHECK(default_kernel_tolerance(2, 1) == 1e-8);
}
