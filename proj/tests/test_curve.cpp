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

#include "hypfay/curve.hpp"

using namespace hypfay;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("sigma is the product over branch points") {
  const Curve g0 = Curve::real({-1.0, 1.0});
  CHECK(std::abs(g0.sigma(0.0) - cplx(-1.0)) < 1e-15);
  CHECK(std::abs(g0.sigma(2.0) - cplx(3.0)) < 1e-15);
  const Curve g1 = Curve::real({-2.0, -1.0, 1.0, 2.0});
  CHECK(std::abs(g1.sigma(0.0) - cplx(4.0)) < 1e-15);
}

TEST_CASE("square root branch follows x^(g+1) at infinity") {
  const Curve g0 = Curve::real({-1.0, 1.0});
  CHECK(std::abs(g0.s(2.0) - std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(g0.s(-2.0) + std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(g0.s(0.0, Side::Above) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(g0.s(0.0, Side::Below) - cplx(0.0, -1.0)) < 1e-15);

  const Curve g2 = Curve::real({-3.0, -1.5, -1.0, 0.5, 1.0, 2.5});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-4.0, 4.0);
  for (int i = 0; i < 50; ++i) {
    const cplx x(d(rng), d(rng));
    const cplx s = g2.s(x);
    CHECK(std::abs(s * s - g2.sigma(x)) < 1e-12 * std::abs(g2.sigma(x)));
  }
  const cplx far(1e3, 1e3);
  CHECK(std::abs(g2.s(far) / std::pow(far, 3) - 1.0) < 1e-2);
}

TEST_CASE("s is continuous across the gaps and jumps across the cuts") {
  const Curve c = Curve::real({-2.0, -1.0, 1.0, 2.0});
  const double eps = 1e-9;
  CHECK(std::abs(c.s(cplx(0.0, eps)) - c.s(cplx(0.0, -eps))) < 1e-6);
  CHECK(std::abs(c.s(cplx(1.5, eps)) + c.s(cplx(1.5, -eps))) < 1e-6);
  // on cut h the boundary value lies in (-1)^(g-h) i R_>0
  CHECK(c.s(-1.5, Side::Above).imag() < 0.0);
  CHECK(c.s(1.5, Side::Above).imag() > 0.0);
}

TEST_CASE("complex branch points") {
  const Curve c = Curve::complex({{-2.0, 0.1}, {-1.0, -0.05}, {1.0, 0.08}, {2.0, 0.0}});
  CHECK(c.genus() == 1);
  CHECK(!c.is_real());
  const cplx x(0.3, 1.7);
  CHECK(std::abs(c.s(x) * c.s(x) - c.sigma(x)) < 1e-13);
}

TEST_CASE("invalid curves are rejected") {
  CHECK(throws_kind(ErrorKind::InvalidCurve, [] { Curve::real({-1.0, 1.0, 2.0}); }));
  CHECK(throws_kind(ErrorKind::InvalidCurve, [] { Curve::real({1.0, -1.0}); }));
  CHECK(throws_kind(ErrorKind::InvalidCurve, [] { Curve::real({-1.0, -1.0, 1.0, 2.0}); }));
  CHECK(throws_kind(ErrorKind::InvalidCurve, [] { Curve::real({-1.0, std::nan(""), 1.0, 2.0}); }));
}

TEST_CASE("involution flips the sheet") {
  const Curve c = Curve::real({-1.0, 1.0});
  const SurfacePoint p = SurfacePoint::at(c, 2.0);
  const SurfacePoint q = involution(p);
  CHECK(q.sheet == Sheet::Minus);
  CHECK(std::abs(q.s + std::sqrt(3.0)) < 1e-15);
  CHECK(involution(SurfacePoint::infinity(Sheet::Plus)).sheet == Sheet::Minus);
  CHECK(involution(SurfacePoint::infinity(Sheet::Plus)).at_infinity());

  const Curve g2 = Curve::real({-3.0, -1.5, -1.0, 0.5, 1.0, 2.5});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const SurfacePoint r = SurfacePoint::at(g2, cplx(d(rng), d(rng)), i % 2 ? Sheet::Plus : Sheet::Minus);
    CHECK(same_point(involution(involution(r)), r));
  }
}

TEST_CASE("local charts") {
  const Curve c = Curve::real({-1.0, 1.0, 2.0, 3.0});
  const LocalChart regular = make_chart(c, SurfacePoint::at(c, cplx(1.0, 1.0)));
  CHECK(regular.kind == ChartKind::Regular);
  CHECK(std::abs(local_coordinate(regular, SurfacePoint::at(c, cplx(1.5, 1.0))) - 0.5) < 1e-15);

  const LocalChart inf = make_chart(c, SurfacePoint::infinity(Sheet::Plus));
  CHECK(inf.kind == ChartKind::Infinity);
  CHECK(std::abs(local_coordinate(inf, SurfacePoint::at(c, 4.0)) - 0.25) < 1e-15);

  const Curve g0 = Curve::real({-1.0, 1.0});
  const LocalChart ram = make_chart(g0, SurfacePoint::at(g0, -1.0));
  CHECK(ram.kind == ChartKind::Ramification);
  const cplx zeta = local_coordinate(ram, SurfacePoint::at(g0, -0.75, Sheet::Plus, Side::Above));
  CHECK(std::abs(std::abs(zeta) - 0.5) < 1e-14);
  // the chart point maps back to the same surface point
  const SurfacePoint back = chart_point(g0, ram, zeta);
  CHECK(std::abs(back.X() + 0.75) < 1e-14);
  CHECK(std::abs(local_coordinate(ram, back) - zeta) < 1e-14);
}

TEST_CASE("curve files") {
  const Curve c = curve_from_json(R"({"mode": "real", "branch_points": [-2, -1, 1, 2]})");
  CHECK(c.genus() == 1);
  const Curve round = curve_from_json(curve_to_json(c));
  CHECK(round.hash() == c.hash());

  const Curve z = curve_from_json(R"({"mode": "complex", "branch_points": [[-1, 0.1], [1, 0]]})");
  CHECK(std::abs(z.left(0) - cplx(-1.0, 0.1)) == 0.0);

  auto message = [](const std::string& text) {
    try {
      curve_from_json(text);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ConfigError) return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"mode": "real"})").find("branch_points") != std::string::npos);
  CHECK(message(R"({"branch_points": [-1, "x"]})").find("branch_points[1]") != std::string::npos);
  CHECK(message(R"({"branch_points": [-1, 1], "mode": "other"})").find("mode") != std::string::npos);
  CHECK(message(R"({"branch_points": [1, -1]})").find("branch_points") != std::string::npos);
  CHECK(message("{not json").find("JSON") != std::string::npos);
}

TEST_CASE("scaling multiplies the branch points") {
  const Curve c = Curve::real({-2.0, -1.0, 1.0, 2.0});
  const Curve d = c.scaled(2.0);
  CHECK(std::abs(d.right(1) - 4.0) < 1e-15);
  CHECK(std::abs(d.scale() - 2.0 * c.scale()) < 1e-14);
}
