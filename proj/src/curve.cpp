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

#include "hypfay/curve.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>

namespace hypfay {
namespace {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double t = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// Local coordinate of x relative to cut [a, b]: w = -1 at a, +1 at b.
cplx cut_coordinate(cplx x, cplx a, cplx b) { return (x - 0.5 * (a + b)) / (0.5 * (b - a)); }

bool on_segment(cplx w) { return std::abs(w.imag()) <= 1e-14 && std::abs(w.real()) < 1.0; }

}  // namespace

Curve::Curve(CurveMode mode, std::vector<cplx> points) : mode_(mode), points_(std::move(points)) {
  if (points_.size() < 2 || points_.size() % 2 != 0) {
    throw Error(ErrorKind::InvalidCurve, "need an even number >= 2 of branch points, got " +
                                             std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].real()) || !std::isfinite(points_[i].imag())) {
      throw Error(ErrorKind::InvalidCurve, "branch point " + std::to_string(i) + " is not finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(points_[i] - points_[j]) < 1e-12) {
        throw Error(ErrorKind::InvalidCurve, "branch points " + std::to_string(j) + " and " +
                                                 std::to_string(i) + " coincide");
      }
    }
  }
  double lo = points_[0].real(), hi = lo;
  min_spacing_ = std::abs(points_[1] - points_[0]);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    lo = std::min(lo, points_[i].real());
    hi = std::max(hi, points_[i].real());
    if (i > 0) min_spacing_ = std::min(min_spacing_, std::abs(points_[i] - points_[i - 1]));
  }
  scale_ = 0.0;
  for (const auto& p : points_) {
    for (const auto& q : points_) scale_ = std::max(scale_, 0.5 * std::abs(p - q));
  }
  const int n = static_cast<int>(points_.size()) / 2;
  for (int h = 0; h < n; ++h) {
    for (int l = 0; l < h; ++l) {
      // cuts must stay apart for the product determination to be well defined
      const double d = std::min({segment_distance(points_[2 * h], points_[2 * l], points_[2 * l + 1]),
                                 segment_distance(points_[2 * h + 1], points_[2 * l], points_[2 * l + 1]),
                                 segment_distance(points_[2 * l], points_[2 * h], points_[2 * h + 1]),
                                 segment_distance(points_[2 * l + 1], points_[2 * h], points_[2 * h + 1])});
      if (d < 1e-9 * scale_) {
        throw Error(ErrorKind::InvalidCurve,
                    "cuts " + std::to_string(l) + " and " + std::to_string(h) + " intersect");
      }
    }
  }
}

Curve Curve::real(std::vector<double> branch_points) {
  for (std::size_t i = 1; i < branch_points.size(); ++i) {
    if (!(branch_points[i] > branch_points[i - 1])) {
      throw Error(ErrorKind::InvalidCurve,
                  "real branch points must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
  std::vector<cplx> pts(branch_points.begin(), branch_points.end());
  return Curve(CurveMode::Real, std::move(pts));
}

Curve Curve::complex(std::vector<cplx> branch_points) {
  return Curve(CurveMode::Complex, std::move(branch_points));
}

double Curve::local_gap(int h) const {
  double gap = std::abs(right(h) - left(h));
  if (h > 0) gap = std::min(gap, std::abs(left(h) - right(h - 1)));
  if (h < genus()) gap = std::min(gap, std::abs(left(h + 1) - right(h)));
  return gap;
}

cplx Curve::sigma(cplx x) const {
  cplx v{1.0};
  for (const auto& e : points_) v *= (x - e);
  return v;
}

cplx Curve::s(cplx x, Side side) const {
  cplx v{1.0};
  for (int h = 0; h <= genus(); ++h) {
    const cplx a = left(h), b = right(h);
    const cplx d = 0.5 * (b - a);
    const cplx w = cut_coordinate(x, a, b);
    if (on_segment(w)) {
      if (side == Side::None) {
        throw Error(ErrorKind::PointOnCut, "x lies on cut " + std::to_string(h) + " without a side flag");
      }
      const double r = std::sqrt(std::max(0.0, 1.0 - w.real() * w.real()));
      v *= (side == Side::Above ? 1.0 : -1.0) * d * kI * r;
      continue;
    }
    v *= d * w * std::sqrt((w - 1.0) * (w + 1.0) / (w * w));
  }
  return v;
}

double Curve::distance_to_cuts(cplx x) const {
  double d = std::numeric_limits<double>::infinity();
  for (int h = 0; h <= genus(); ++h) d = std::min(d, segment_distance(x, left(h), right(h)));
  return d;
}

std::optional<int> Curve::cut_containing(cplx x) const {
  for (int h = 0; h <= genus(); ++h) {
    if (on_segment(cut_coordinate(x, left(h), right(h)))) return h;
  }
  return std::nullopt;
}

Curve Curve::scaled(double factor) const {
  std::vector<cplx> pts = points_;
  for (auto& p : pts) p *= factor;
  return Curve(mode_, std::move(pts));
}

std::string Curve::hash() const {
  // FNV-1a over the printed branch points
  std::uint64_t h = 1469598103934665603ull;
  char buf[64];
  for (const auto& p : points_) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g;", p.real(), p.imag());
    for (int i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SurfacePoint SurfacePoint::at(const Curve& curve, cplx x, Sheet sheet, Side side) {
  SurfacePoint p;
  p.x = x;
  p.sheet = sheet;
  p.s = sign_of(sheet) * curve.s(x, side);
  return p;
}

SurfacePoint SurfacePoint::infinity(Sheet sheet) {
  SurfacePoint p;
  p.sheet = sheet;
  return p;
}

SurfacePoint involution(const SurfacePoint& p) {
  SurfacePoint q = p;
  q.sheet = opposite(p.sheet);
  q.s = -p.s;
  return q;
}

bool same_point(const SurfacePoint& p, const SurfacePoint& q) {
  if (p.at_infinity() || q.at_infinity()) return p.at_infinity() == q.at_infinity() && p.sheet == q.sheet;
  return *p.x == *q.x && p.sheet == q.sheet;
}

LocalChart make_chart(const Curve& curve, const SurfacePoint& center) {
  LocalChart c;
  c.center = center;
  const auto pts = curve.branch_points();
  if (center.at_infinity()) {
    c.kind = ChartKind::Infinity;
    double rmax = 0.0;
    for (const auto& e : pts) rmax = std::max(rmax, std::abs(e));
    c.radius = 1.0 / std::max(rmax, 1e-300);
    return c;
  }
  const cplx x0 = center.X();
  double nearest = std::numeric_limits<double>::infinity();
  int hit = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(pts[i] - x0);
    if (d < 1e-14 * (1.0 + curve.scale())) {
      hit = static_cast<int>(i);
    } else {
      nearest = std::min(nearest, d);
    }
  }
  if (hit >= 0) {
    c.kind = ChartKind::Ramification;
    c.radius = nearest;
    // s(e + zeta^2) = zeta * sqrt(sigma'(e)) * (1 + O(zeta^2)); fix the principal root
    cplx deriv{1.0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (static_cast<int>(i) != hit) deriv *= (x0 - pts[i]);
    }
    c.branch = std::sqrt(deriv);
    return c;
  }
  c.kind = ChartKind::Regular;
  c.radius = curve.distance_to_cuts(x0);
  return c;
}

cplx local_coordinate(const LocalChart& chart, const SurfacePoint& z) {
  switch (chart.kind) {
    case ChartKind::Infinity: {
      if (z.at_infinity()) {
        if (z.sheet != chart.center.sheet) throw Error(ErrorKind::OutOfChart, "opposite point at infinity");
        return 0.0;
      }
      const cplx x = z.X();
      if (std::abs(x) * chart.radius <= 1.0 || z.sheet != chart.center.sheet) {
        throw Error(ErrorKind::OutOfChart, "point outside the chart at infinity");
      }
      return 1.0 / x;
    }
    case ChartKind::Regular: {
      if (z.at_infinity()) throw Error(ErrorKind::OutOfChart, "infinity outside a regular chart");
      const cplx dx = z.X() - chart.center.X();
      if (std::abs(dx) >= chart.radius || z.sheet != chart.center.sheet) {
        throw Error(ErrorKind::OutOfChart, "point outside the regular chart");
      }
      return dx;
    }
    case ChartKind::Ramification: {
      if (z.at_infinity()) throw Error(ErrorKind::OutOfChart, "infinity outside a ramification chart");
      const cplx dx = z.X() - chart.center.X();
      if (std::abs(dx) >= chart.radius) throw Error(ErrorKind::OutOfChart, "point outside the ramification chart");
      cplx zeta = std::sqrt(dx);
      // pick the root whose leading-order s matches the point's value
      const cplx pred = chart.branch * zeta;
      if (std::abs(z.s - pred) > std::abs(z.s + pred)) zeta = -zeta;
      return zeta;
    }
  }
  return 0.0;
}

SurfacePoint chart_point(const Curve& curve, const LocalChart& chart, cplx zeta) {
  switch (chart.kind) {
    case ChartKind::Infinity:
      if (zeta == cplx{}) return chart.center;
      return SurfacePoint::at(curve, 1.0 / zeta, chart.center.sheet);
    case ChartKind::Regular:
      return SurfacePoint::at(curve, chart.center.X() + zeta, chart.center.sheet);
    case ChartKind::Ramification: {
      const cplx x = chart.center.X() + zeta * zeta;
      SurfacePoint p = SurfacePoint::at(curve, x, Sheet::Plus, Side::Above);
      const cplx pred = chart.branch * zeta;
      if (std::abs(p.s - pred) > std::abs(p.s + pred)) p = involution(p);
      return p;
    }
  }
  return chart.center;
}

cplx chart_dx(const LocalChart& chart, cplx zeta) {
  switch (chart.kind) {
    case ChartKind::Infinity: return -1.0 / (zeta * zeta);
    case ChartKind::Regular: return 1.0;
    case ChartKind::Ramification: return 2.0 * zeta;
  }
  return 1.0;
}

}  // namespace hypfay
