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

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hypfay/curve.hpp"
#include "hypfay/quadrature.hpp"

namespace hypfay {

// One oriented piece of a cycle: a straight segment or a circular arc.
struct Arc {
  enum class Kind { Line, Circle } kind = Kind::Line;
  cplx start{}, end{};           // Line
  cplx center{};                 // Circle
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;
  Sheet sheet = Sheet::Plus;

  cplx point(double t) const;     // t in [0, 1]
  cplx tangent(double t) const;   // dx/dt
  double length() const;
};

enum class CycleKind { A, B, Custom };

struct CyclePath {
  CycleKind kind = CycleKind::Custom;
  int index = 0;
  std::vector<Arc> arcs;
  std::string description;
};

// Counterclockwise stadium around cut h on the plus sheet at distance offset.
CyclePath stadium(const Curve& curve, int h, double offset);
// Default A-cycle representative: offset 0.25 of the local gap.
CyclePath a_cycle(const Curve& curve, int h, double offset_factor = 0.25);
// B_h: plus-sheet run along the gaps from cut 0 to cut h, back on the minus sheet.
CyclePath b_cycle(const Curve& curve, int h);

// A meromorphic differential f(x, s) dx; s is the sheet-aware value of y.
struct Differential {
  std::function<cplx(cplx x, cplx s)> coefficient;
  std::string name;
};

Differential monomial_differential(int k);  // x^k dx / s

quad::Integral<cplx> integrate_differential(const Curve& curve, const CyclePath& path,
                                            const Differential& form, double tol = 1e-12);

struct PeriodData {
  CMat a_periods;   // Q_{k,h}: A_h-period of x^k dx / s
  CMat coeffs;      // du = coeffs * (x^k)_k dx / s
  CMat b_periods;   // P_{k,h}
  CMat tau;
  double cond_q = 1.0;
  double quad_error = 0.0;
  std::string a_cycle_note;
};

struct PeriodOptions {
  double tol = 1e-12;
  double offset_factor = 0.25;
  double max_condition = 1e12;
};

PeriodData compute_periods(const Curve& curve, const PeriodOptions& opts = {});

// Values of the normalized holomorphic differentials against dX at x on the
// given sheet.
CVec holomorphic_du(const Curve& curve, const PeriodData& periods, cplx x, cplx s);

struct BoutrouxReport {
  std::vector<cplx> a_periods;  // A_h-periods of phi, h = 1..g
  std::vector<cplx> b_periods;  // B_h-periods of phi, h = 1..g
  double max_real_a = 0.0;      // max |Re A_h-period|
  double max_abs_b = 0.0;       // max |B_h-period|
};

BoutrouxReport boutroux_check(const Curve& curve, const Differential& phi, double tol = 1e-12);

std::string periods_to_json(const Curve& curve, const PeriodData& pd);

}  // namespace hypfay
