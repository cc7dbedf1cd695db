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

#include <cstdlib>
#include <memory>
#include <random>

#include <doctest.h>
#include <json.hpp>

#include "hypfay/identities.hpp"
#include "hypfay/suite.hpp"

using namespace hypfay;

namespace {

const IdentityContext& g1() {
  static const IdentityContext ctx(std::make_shared<Surface>(Curve::real({-2.0, -1.0, 1.0, 2.0})));
  return ctx;
}

const IdentityContext& g2() {
  static const IdentityContext ctx(std::make_shared<Surface>(genus2_curves().front()));
  return ctx;
}

const IdentityContext& g1_complex() {
  static const IdentityContext ctx(std::make_shared<Surface>(complex_perturbation(genus1_curves()[1], 4)));
  return ctx;
}

IdentityReport run(IdentityKind kind, const IdentityContext& ctx, int samples, std::uint64_t seed,
                   bool random_characteristic = true) {
  SamplingOptions o;
  o.samples = samples;
  o.seed = seed;
  o.random_characteristic = random_characteristic;
  return run_identity(kind, ctx, o);
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

CVec random_shift(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  CVec v(g);
  for (int i = 0; i < g; ++i) v(i) = cplx(d(rng), d(rng));
  return v;
}

// Quadruple with the second and fourth points moved next to the first and third.
PointQuad near_pairs(const Surface& s, std::mt19937_64& rng, double delta) {
  const PointQuad base = sample_points(s, rng);
  const double h = delta * s.curve().scale();
  return {base[0], s.cover(base[0].point.X() + h), base[2], s.cover(base[2].point.X() + h)};
}

}  // namespace

TEST_CASE("trisecant identity") {
  CHECK(run(IdentityKind::Fay, g1(), 20, 1).max_residual < 1e-8);
  CHECK(run(IdentityKind::Fay, g2(), 20, 2).max_residual < 1e-7);
  CHECK(run(IdentityKind::Fay, g1_complex(), 10, 3).max_residual < 1e-8);

  std::mt19937_64 rng(4);
  for (const IdentityContext* ctx : {&g1(), &g2()}) {
    PointQuad p = sample_points(ctx->surface(), rng);
    p[3] = p[1];
    const IdentityEvaluation e = eval_fay(*ctx, p, random_shift(ctx->surface().genus(), rng));
    CHECK(e.residual < 1e-12);
    CHECK(std::abs(e.terms.at(0).value) < 1e-12 * std::abs(e.terms.at(1).value));
  }
}

TEST_CASE("beta = 2 identity") {
  CHECK(run(IdentityKind::Beta2, g1(), 20, 5, false).max_residual < 1e-8);
  const IdentityReport r = run(IdentityKind::Beta2, g1(), 20, 6);
  CHECK(r.max_residual < 1e-8);
  CHECK(run(IdentityKind::Beta2, g2(), 10, 7).max_residual < 1e-7);
  CHECK(run(IdentityKind::Beta2, g1_complex(), 10, 8).max_residual < 1e-8);

  std::mt19937_64 rng(9);
  const int g = g2().surface().genus();
  for (int i = 0; i < 3; ++i) {
    const PointQuad p = near_pairs(g2().surface(), rng, 1e-3);
    HalfFormRegistry reg;
    CHECK(eval_beta2(g2(), p, random_characteristic(g, rng), random_shift(g, rng), reg).residual < 1e-7);
  }
}

TEST_CASE("beta = 2 identity summed over the swap") {
  const IdentityReport r = run(IdentityKind::FayFromBeta2, g1(), 10, 10);
  CHECK(r.max_residual < 1e-8);
  CHECK(r.max_checks.at("eta_swap") < 1e-12);
  CHECK(r.max_checks.at("beta2_sum") < 1e-8);
  CHECK(run(IdentityKind::FayFromBeta2, g2(), 10, 11).max_residual < 1e-7);
}

TEST_CASE("beta = 1 identity") {
  const IdentityReport r1 = run(IdentityKind::Beta1, g1(), 20, 12);
  CHECK(r1.max_residual < 1e-8);
  CHECK(run(IdentityKind::Beta1Equiv, g1(), 5, 12).max_checks.at("reassembly") < 1e-8);
  const IdentityReport r2 = run(IdentityKind::Beta1, g2(), 10, 13);
  CHECK(r2.max_residual < 1e-7);

  std::mt19937_64 rng(14);
  for (const IdentityContext* ctx : {&g1(), &g2()}) {
    const Surface& s = ctx->surface();
    const PointQuad base = sample_points(s, rng);
    const double h = 1e-3 * s.curve().scale();
    const PointQuad p{base[0], base[1], s.cover(base[0].point.X() + h), s.cover(base[1].point.X() + h)};
    CHECK(eval_beta1(*ctx, p, random_characteristic(s.genus(), rng)).residual < 1e-8);
    const PointQuad same{base[0], base[1], base[0], base[1]};
    CHECK_THROWS_AS(eval_beta1(*ctx, same, random_characteristic(s.genus(), rng)), Error);
  }
}

TEST_CASE("equivalent beta = 1 form for every class") {
  std::mt19937_64 rng(15);
  for (const IdentityContext* ctx : {&g1(), &g2()}) {
    const int g = ctx->surface().genus();
    for (const RVec& alpha : half_periods(g)) {
      for (int i = 0; i < 3; ++i) {
        const PointQuad p = sample_points(ctx->surface(), rng);
        CHECK(eval_beta1_equiv(*ctx, p, alpha).residual < (g == 1 ? 1e-8 : 1e-7));
      }
    }
    const PointQuad p = sample_points(ctx->surface(), rng);
    CHECK(beta1_reassembly(*ctx, p, random_characteristic(g, rng)) < 1e-8);
  }
  CHECK(run(IdentityKind::Beta1Equiv, g1(), 10, 16).max_residual < 1e-8);
}

TEST_CASE("beta = 4 identity") {
  const IdentityReport r = run(IdentityKind::Beta4, g1(), 20, 17);
  CHECK(r.max_residual < 1e-8);
  CHECK(r.max_checks.at("modular") < 1e-7);
  CHECK(run(IdentityKind::Beta4, g2(), 10, 18).max_residual < 1e-7);

  std::mt19937_64 rng(19);
  const Surface& s = g1().surface();
  const PointQuad base = sample_points(s, rng);
  const double h = 1e-3 * s.curve().scale();
  const PointQuad p{base[0], base[1], s.cover(base[0].point.X() + h), s.cover(base[1].point.X() + h)};
  CHECK(eval_beta4(g1(), p, random_characteristic(1, rng)).residual < 1e-8);
  CHECK(beta4_modular_check(g2(), sample_points(g2().surface(), rng), random_characteristic(2, rng)) < 1e-7);
}

TEST_CASE("square-root choices do not change the residuals") {
  SamplingOptions o;
  o.samples = 10;
  o.seed = 20;
  o.random_signs = true;
  CHECK(run_identity(IdentityKind::Beta2, g1(), o).max_residual < 1e-8);
  CHECK(run_identity(IdentityKind::FayFromBeta2, g1(), o).max_residual < 1e-8);
}

TEST_CASE("lattice shifts of the points") {
  const Surface& s = g1().surface();
  std::mt19937_64 rng(21);
  PointQuad p = sample_points(s, rng);
  Eigen::VectorXi m(1), n(1);
  m << 1;
  n << -1;
  p[2] = s.shifted(p[2], m, n);
  CHECK(eval_fay(g1(), p, random_shift(1, rng)).residual < 1e-8);
  HalfFormRegistry reg;
  CHECK(eval_beta2(g1(), p, random_characteristic(1, rng), random_shift(1, rng), reg).residual < 1e-8);
}

TEST_CASE("reports are deterministic") {
  const Curve& curve = g1().surface().curve();
  const std::string a = report_to_json(run(IdentityKind::Beta4, g1(), 4, 22), curve);
  setenv("HYPFAY_THREADS", "3", 1);
  const std::string b = report_to_json(run(IdentityKind::Beta4, g1(), 4, 22), curve);
  unsetenv("HYPFAY_THREADS");
  CHECK(a == b);
  const auto doc = nlohmann::json::parse(a);
  CHECK(doc["schema"] == "hypfay/1");
  CHECK(doc["identity"] == "beta4");
  CHECK(doc["seed"] == 22);
  CHECK(doc["samples"].size() == 4);
  for (const char* key : {"points", "residual", "terms"}) CHECK(doc["samples"][0].contains(key));
  CHECK(doc.contains("max_residual"));
  CHECK(doc.contains("curve"));
}

TEST_CASE("identity names") {
  for (IdentityKind k : {IdentityKind::Fay, IdentityKind::Beta1, IdentityKind::Beta1Equiv, IdentityKind::Beta2,
                         IdentityKind::Beta4}) {
    CHECK(identity_from_string(to_string(k)) == k);
  }
  CHECK(identity_from_string("beta1-equiv") == IdentityKind::Beta1Equiv);
  CHECK(!identity_from_string("beta3"));
}
