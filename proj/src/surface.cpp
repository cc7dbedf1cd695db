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

#include "hypfay/surface.hpp"

#include <sstream>

namespace hypfay {

HalfFormRegistry::Key HalfFormRegistry::key(const SurfacePoint& p) {
  if (p.at_infinity()) return {1, 0.0, 0.0, p.sheet == Sheet::Plus ? 1 : -1};
  return {0, p.X().real(), p.X().imag(), p.sheet == Sheet::Plus ? 1 : -1};
}

int HalfFormRegistry::assign(const SurfacePoint& p, int sign) {
  std::lock_guard lock(mu_);
  return signs_.try_emplace(key(p), sign >= 0 ? 1 : -1).first->second;
}

cplx HalfFormRegistry::sqrt_omega(const CoverPoint& p) {
  return static_cast<double>(sign(p.point)) * std::sqrt(p.omega);
}

std::size_t HalfFormRegistry::size() const {
  std::lock_guard lock(mu_);
  return signs_.size();
}

namespace {

// Whether the ray start + t*dir (t > 0) meets the segment [a, b].
bool ray_meets_segment(cplx start, cplx dir, cplx a, cplx b) {
  // solve a + s (b - a) = start + t dir
  const cplx e = b - a;
  const double det = (e * std::conj(dir)).imag();
  const cplx r = start - a;
  if (std::abs(det) < 1e-300) return false;
  const double s = (r * std::conj(dir)).imag() / det;
  const double t = (r * std::conj(e)).imag() / det;
  return s >= 0.0 && s <= 1.0 && t > 1e-15;
}

}  // namespace

Surface::Surface(Curve curve, SurfaceOptions opts) : curve_(std::move(curve)), opts_(opts) {
  if (curve_.genus() < 1) throw Error(ErrorKind::InvalidCurve, "the surface apparatus needs genus >= 1");
  periods_ = compute_periods(curve_, opts_.periods);
  theta_ = std::make_unique<ThetaContext>(periods_.tau, opts_.theta_tol);
  odd_ = find_odd_characteristic();
  odd_grad_ = theta_->gradient(odd_, CVec::Zero(genus()));
  // u(inf-) = 2 * integral of du from -inf to a_0 on the plus sheet
  u_inf_ = -2.0 * ray_integral(curve_.left(0), cplx{-1.0, 0.0});
  const cplx th = theta_odd(-u_inf_);
  eta_constant_ = omega_inf(Sheet::Plus) * omega_inf(Sheet::Plus) / (th * th);
}

Characteristic Surface::find_odd_characteristic() const {
  const int g = genus();
  std::vector<int> e(g, 0), ep(g, 0);
  e[0] = ep[0] = 1;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> candidates{{e, ep}};
  for (int a = 1; a < (1 << g); ++a) {
    for (int b = 1; b < (1 << g); ++b) {
      std::vector<int> x(g), y(g);
      int dot = 0;
      for (int i = 0; i < g; ++i) {
        x[i] = (a >> i) & 1;
        y[i] = (b >> i) & 1;
        dot += x[i] * y[i];
      }
      if (dot % 2 == 1) candidates.emplace_back(x, y);
    }
  }
  const CVec zero = CVec::Zero(g);
  for (const auto& [x, y] : candidates) {
    const Characteristic c = Characteristic::half(x, y);
    const CVec grad = theta_->gradient(c, zero);
    if (grad.norm() > 1e-6 && std::abs(theta_->value(c, zero)) < 1e-10 * (1.0 + grad.norm())) return c;
  }
  throw Error(ErrorKind::SingularCharacteristic, "no nonsingular odd characteristic found");
}

cplx Surface::omega_inf(Sheet sheet) const {
  // du ~ -+ coeffs(:, g-1) dzeta at the points at infinity
  return -sign_of(sheet) * bilinear(odd_grad_, periods_.coeffs.col(genus() - 1));
}

CVec Surface::du(const SurfacePoint& p) const {
  if (p.at_infinity()) throw Error(ErrorKind::OutOfChart, "du against dX is singular at infinity");
  return holomorphic_du(curve_, periods_, p.X(), p.s);
}

CVec Surface::ray_integral(cplx start, cplx dir) const {
  const double len = curve_.scale();
  auto integrand = [&](double v) -> CVec {
    const double w = 1.0 - v * v;
    const cplx x = start + dir * (len * v * v / w);
    const cplx dxdv = dir * (len * 2.0 * v / (w * w));
    return holomorphic_du(curve_, periods_, x, curve_.s(x)) * dxdv;
  };
  return quad::gauss_kronrod(integrand, 0.0, 1.0, opts_.abel_tol).value;
}

AbelValue Surface::abel(const SurfacePoint& p, bool enforce_clearance) const {
  AbelValue out;
  if (p.at_infinity()) {
    out.u = p.sheet == Sheet::Plus ? CVec(CVec::Zero(genus())) : u_inf_;
    out.path = p.sheet == Sheet::Plus ? "base point" : "real axis left of the first cut, both sheets";
    return out;
  }
  if (p.sheet == Sheet::Minus) {
    AbelValue q = abel(involution(p), enforce_clearance);
    out.u = u_inf_ - q.u;
    out.path = "involution of (" + q.path + ")";
    return out;
  }
  const cplx x = p.X();
  if (enforce_clearance && curve_.distance_to_cuts(x) < opts_.clearance * curve_.scale()) {
    std::ostringstream os;
    os << "point " << x << " is closer than " << opts_.clearance << " x scale to a cut";
    throw Error(ErrorKind::PathTooCloseToCut, os.str());
  }
  bool up = curve_.is_real() ? x.imag() >= 0.0 : true;
  auto blocked = [&](cplx dir) {
    for (int h = 0; h <= genus(); ++h) {
      if (ray_meets_segment(x, dir, curve_.left(h), curve_.right(h))) return true;
    }
    return false;
  };
  if (!curve_.is_real()) {
    if (blocked(kI)) up = false;
    if (!up && blocked(-kI)) {
      throw Error(ErrorKind::PathTooCloseToCut, "no vertical ray to infinity avoids the cuts");
    }
  }
  const cplx dir = up ? kI : -kI;
  out.u = -ray_integral(x, dir);
  out.path = up ? "vertical ray from +i infinity" : "vertical ray from -i infinity";
  return out;
}

CVec Surface::abel_weierstrass(int j) const {
  const int g = genus();
  const int k = j / 2;
  const bool is_b = j % 2 == 1;
  CVec v = u_inf_;
  if (k == 0) {
    if (is_b) v += CVec::Ones(g);
    return 0.5 * v;
  }
  for (int l = (is_b ? k + 1 : k); l <= g; ++l) v(l - 1) += 1.0;
  // telescoped from u(a_k) - u(b_{k-1}) = (tau e_k - tau e_{k-1}) / 2
  v += periods_.tau.col(k - 1);
  return 0.5 * v;
}

CVec Surface::abel_branch_direct(int j) const {
  const cplx e = curve_.branch_points()[j];
  return -ray_integral(e, kI);
}

CoverPoint Surface::cover(const SurfacePoint& p, bool enforce_clearance) const {
  if (p.at_infinity()) return infinity(p.sheet);
  CoverPoint c;
  c.point = p;
  AbelValue a = abel(p, enforce_clearance);
  c.u = std::move(a.u);
  c.path = std::move(a.path);
  c.omega = bilinear(odd_grad_, du(p));
  return c;
}

CoverPoint Surface::cover(cplx x, Sheet sheet) const { return cover(SurfacePoint::at(curve_, x, sheet)); }

CoverPoint Surface::infinity(Sheet sheet) const {
  CoverPoint c;
  c.point = SurfacePoint::infinity(sheet);
  c.u = sheet == Sheet::Plus ? CVec(CVec::Zero(genus())) : u_inf_;
  c.omega = omega_inf(sheet);
  c.path = sheet == Sheet::Plus ? "base point" : "real axis left of the first cut, both sheets";
  return c;
}

CoverPoint Surface::shifted(const CoverPoint& p, const Eigen::VectorXi& m, const Eigen::VectorXi& n) const {
  CoverPoint q = p;
  q.u += m.cast<double>().cast<cplx>() + periods_.tau * n.cast<double>().cast<cplx>();
  q.path += " + lattice loop";
  return q;
}

cplx Surface::prime_form(const CoverPoint& a, const CoverPoint& b, HalfFormRegistry& reg) const {
  return theta_odd(a.u - b.u) / (reg.sqrt_omega(a) * reg.sqrt_omega(b));
}

cplx Surface::prime_form_squared(const CoverPoint& a, const CoverPoint& b) const {
  const cplx t = theta_odd(a.u - b.u);
  return t * t / (a.omega * b.omega);
}

cplx Surface::prime_form_squared(const Characteristic& c, const CoverPoint& a, const CoverPoint& b) const {
  const CVec grad = theta_->gradient(c, CVec::Zero(genus()));
  if (grad.norm() < 1e-6) throw Error(ErrorKind::SingularCharacteristic, "gradient vanishes at the characteristic");
  auto omega = [&](const CoverPoint& p) {
    if (p.point.at_infinity()) return -sign_of(p.point.sheet) * bilinear(grad, periods_.coeffs.col(genus() - 1));
    return bilinear(grad, du(p.point));
  };
  const cplx t = theta_->value(c, a.u - b.u);
  return t * t / (omega(a) * omega(b));
}

cplx Surface::eta(const CoverPoint& z) const {
  if (z.point.at_infinity()) throw Error(ErrorKind::OutOfChart, "eta is evaluated away from infinity");
  return theta_odd(-u_inf_) * z.omega / (theta_odd(z.u) * theta_odd(z.u - u_inf_));
}

cplx Surface::bidifferential(const CoverPoint& a, const CoverPoint& b) const {
  if (!a.point.at_infinity() && !b.point.at_infinity() && a.point.sheet == b.point.sheet &&
      std::abs(a.point.X() - b.point.X()) <= 1e-3 * curve_.scale()) {
    throw Error(ErrorKind::NearDiagonal, "points too close for the bidifferential");
  }
  const CMat h = theta_->log_hessian(odd_, a.u - b.u);
  return -bilinear(du(a.point), h * du(b.point));
}

cplx Surface::third_kind(const CoverPoint& p, const CoverPoint& q, const CoverPoint& z) const {
  const CVec gq = theta_->log_gradient(odd_, z.u - q.u);
  const CVec gp = theta_->log_gradient(odd_, z.u - p.u);
  return bilinear(gq - gp, du(z.point));
}

cplx Surface::second_kind(const SurfacePoint& p, int k, const CoverPoint& z, int nodes) const {
  const LocalChart chart = make_chart(curve_, p);
  double r = 0.5 * chart.radius;
  if (chart.kind == ChartKind::Infinity && !z.point.at_infinity()) {
    r = std::min(r, 0.5 / std::abs(z.point.X()));
  } else if (chart.kind != ChartKind::Infinity && !z.point.at_infinity()) {
    const double dz = std::abs(z.point.X() - p.X());
    r = std::min(r, chart.kind == ChartKind::Ramification ? 0.5 * std::sqrt(dz) : 0.5 * dz);
  }
  cplx acc{};
  for (int j = 0; j < nodes; ++j) {
    const cplx zeta = r * std::exp(kI * (2.0 * kPi * (j + 0.5) / nodes));
    const CoverPoint w = cover(chart_point(curve_, chart, zeta), false);
    acc += std::pow(zeta, 1 - k) * bidifferential(w, z) * chart_dx(chart, zeta);
  }
  return acc / static_cast<double>(nodes);
}

const Surface::Ring& Surface::infinity_ring() const {
  std::call_once(ring_once_, [&] {
    auto ring = std::make_unique<Ring>();
    double emax = 0.0;
    for (const auto& e : curve_.branch_points()) emax = std::max(emax, std::abs(e));
    const double r = 1.0 / (2.0 * emax);
    const int n = 128;
    for (int j = 0; j < n; ++j) {
      const cplx zeta = r * std::exp(kI * (2.0 * kPi * (j + 0.5) / n));
      const SurfacePoint sp = SurfacePoint::at(curve_, 1.0 / zeta, Sheet::Minus);
      ring->zeta.push_back(zeta);
      ring->pts.push_back(cover(sp, false));
      ring->du_dzeta.push_back(du(sp) * (-1.0 / (zeta * zeta)));
    }
    ring_ = std::move(ring);
  });
  return *ring_;
}

cplx Surface::second_kind_integral(int k, const CoverPoint& z) const {
  const Ring& ring = infinity_ring();
  if (!z.point.at_infinity()) {
    const double rz = std::abs(ring.zeta[0]) * std::abs(z.point.X());
    if (rz >= 0.75) throw Error(ErrorKind::OutOfChart, "point too far out for the ring at infinity");
  }
  const int n = static_cast<int>(ring.zeta.size());
  cplx acc{};
  const CVec zero = CVec::Zero(genus());
  for (int j = 0; j < n; ++j) {
    const CVec& up = ring.pts[j].u;
    const CVec diff = theta_->log_gradient(odd_, up - z.u) - theta_->log_gradient(odd_, up - zero);
    acc += std::pow(ring.zeta[j], 1 - k) * bilinear(diff, ring.du_dzeta[j]);
  }
  return acc / static_cast<double>(n);
}

}  // namespace hypfay
