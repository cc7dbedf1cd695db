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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypfay/core.hpp"

namespace hypfay {

enum class Sheet { Plus, Minus };
// Boundary value selector for points lying exactly on a cut. Above means the
// left-hand side of the cut oriented from its left to its right endpoint.
enum class Side { None, Above, Below };
enum class CurveMode { Real, Complex };

inline Sheet opposite(Sheet s) { return s == Sheet::Plus ? Sheet::Minus : Sheet::Plus; }
inline double sign_of(Sheet s) { return s == Sheet::Plus ? 1.0 : -1.0; }

// Hyperelliptic curve s^2 = sigma(x) with 2g+2 branch points paired into the
// cuts [a_h, b_h]. The square root s is the product of per-cut factors, each
// with its cut exactly on its own segment, so s ~ x^{g+1} at infinity.
class Curve {
 public:
  static Curve real(std::vector<double> branch_points);
  static Curve complex(std::vector<cplx> branch_points);

  CurveMode mode() const { return mode_; }
  bool is_real() const { return mode_ == CurveMode::Real; }
  int genus() const { return static_cast<int>(points_.size()) / 2 - 1; }
  std::span<const cplx> branch_points() const { return points_; }
  cplx left(int h) const { return points_[2 * h]; }
  cplx right(int h) const { return points_[2 * h + 1]; }
  // Half the diameter of the branch-point set.
  double scale() const { return scale_; }
  // Smallest distance between consecutive branch points.
  double min_spacing() const { return min_spacing_; }
  // Smallest spacing between cut h and its neighbouring branch points.
  double local_gap(int h) const;

  cplx sigma(cplx x) const;
  cplx s(cplx x, Side side = Side::None) const;
  double distance_to_cuts(cplx x) const;
  // Index of the cut containing x (within tolerance), if any.
  std::optional<int> cut_containing(cplx x) const;

  Curve scaled(double factor) const;
  std::string hash() const;

 private:
  Curve(CurveMode mode, std::vector<cplx> points);
  CurveMode mode_;
  std::vector<cplx> points_;
  double scale_ = 1.0;
  double min_spacing_ = 1.0;
};

// A point of the compact surface; x == nullopt marks the point at infinity.
struct SurfacePoint {
  std::optional<cplx> x;
  Sheet sheet = Sheet::Plus;
  cplx s{};

  static SurfacePoint at(const Curve& curve, cplx x, Sheet sheet = Sheet::Plus,
                         Side side = Side::None);
  static SurfacePoint infinity(Sheet sheet);
  bool at_infinity() const { return !x.has_value(); }
  cplx X() const { return *x; }
};

SurfacePoint involution(const SurfacePoint& p);
bool same_point(const SurfacePoint& p, const SurfacePoint& q);

enum class ChartKind { Regular, Ramification, Infinity };

struct LocalChart {
  SurfacePoint center;
  ChartKind kind = ChartKind::Regular;
  double radius = 0.0;  // validity bound in the x-plane (or 1/|x| at infinity)
  cplx branch{1.0};     // ramification: s ~ branch * zeta near the center
};

LocalChart make_chart(const Curve& curve, const SurfacePoint& center);
cplx local_coordinate(const LocalChart& chart, const SurfacePoint& z);
// Inverse of the chart map; the returned point lies on the surface.
SurfacePoint chart_point(const Curve& curve, const LocalChart& chart, cplx zeta);
// dX/dzeta at the chart point with coordinate zeta.
cplx chart_dx(const LocalChart& chart, cplx zeta);

// Curve file: {"branch_points": [...], "mode": "real"|"complex"}; complex
// entries are [re, im] pairs.
Curve curve_from_json(const std::string& text);
Curve load_curve(const std::string& path);
std::string curve_to_json(const Curve& curve);

}  // namespace hypfay
