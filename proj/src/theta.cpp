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

#include "hypfay/theta.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace hypfay {

Characteristic Characteristic::zero(int g) { return {RVec::Zero(g), RVec::Zero(g)}; }

Characteristic Characteristic::half(const std::vector<int>& e, const std::vector<int>& e_prime) {
  Characteristic c{RVec(e.size()), RVec(e_prime.size())};
  for (std::size_t i = 0; i < e.size(); ++i) c.mu(i) = 0.5 * e[i];
  for (std::size_t i = 0; i < e_prime.size(); ++i) c.nu(i) = 0.5 * e_prime[i];
  return c;
}

bool Characteristic::is_half_integer() const {
  auto ok = [](const RVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(2 * v(i) - std::round(2 * v(i))) > 1e-14) return false;
    }
    return true;
  };
  return ok(mu) && ok(nu);
}

int Characteristic::parity() const {
  long s = 0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += std::lround(2 * mu(i)) * std::lround(2 * nu(i));
  return static_cast<int>(((s % 2) + 2) % 2);
}

namespace {

// Upper bound of sum_{x in lattice, q(x) > r^2} exp(-pi q(x)) relative to the
// dominant term, from a shell count of the ellipsoid volume.
double tail_estimate(double r, int g, double det_y, double cell) {
  const double vg = std::pow(kPi, 0.5 * g) / boost::math::tgamma(0.5 * g + 1.0);
  double sum = 0.0;
  for (int j = 0; j < 200; ++j) {
    const double q = r * r + j;
    const double count = vg * std::pow(std::sqrt(q + 1.0) + cell, g) / std::sqrt(det_y);
    const double term = count * std::exp(-kPi * q);
    sum += term;
    if (term < 1e-30 * sum) break;
  }
  return sum * std::exp(kPi * cell * cell);
}

}  // namespace

ThetaContext::ThetaContext(CMat tau, double tol) : tau_(std::move(tau)), tol_(tol) {
  const int g = genus();
  im_tau_ = 0.5 * (tau_.imag() + tau_.imag().transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(im_tau_);
  if (g > 0 && !(es.eigenvalues()(0) > 0.0)) {
    throw Error(ErrorKind::TailBoundExceeded, "Im tau is not positive definite");
  }
  im_tau_inv_ = g > 0 ? RMat(im_tau_.inverse()) : RMat(0, 0);
  box_ = im_tau_inv_.diagonal().cwiseSqrt();
  const double det_y = g > 0 ? im_tau_.determinant() : 1.0;
  const double cell = g > 0 ? 0.5 * std::sqrt(im_tau_.trace()) : 0.0;
  radius_ = 1.0;
  tail_ = tail_estimate(radius_, g, det_y, cell);
  // margin for the derivative weights (2 pi m)^2
  while (tail_ > 1e-4 * tol_) {
    radius_ += 0.25;
    if (radius_ > 30.0) throw Error(ErrorKind::TailBoundExceeded, "theta truncation radius above cap");
    tail_ = tail_estimate(radius_, g, det_y, cell);
  }
  double box_count = 1.0;
  for (int i = 0; i < g; ++i) box_count *= 2.0 * radius_ * box_(i) + 2.0;
  if (box_count > 5e6) {
    throw Error(ErrorKind::TailBoundExceeded, "theta lattice window too large: " + std::to_string(box_count));
  }
}

ThetaContext ThetaContext::with_radius(double radius) const {
  ThetaContext c = *this;
  c.radius_ = radius;
  const int g = genus();
  c.tail_ = tail_estimate(radius, g, g > 0 ? im_tau_.determinant() : 1.0,
                          g > 0 ? 0.5 * std::sqrt(im_tau_.trace()) : 0.0);
  return c;
}

ThetaJet ThetaContext::jet(const Characteristic& c, const CVec& z, int order) const {
  const int g = genus();
  ThetaJet out;
  out.grad = CVec::Zero(g);
  out.hess = CMat::Zero(g, g);
  if (g == 0) {
    out.value = 1.0;
    return out;
  }
  const RVec mstar = -im_tau_inv_ * z.imag();
  std::vector<long> lo(g), hi(g), n(g);
  for (int i = 0; i < g; ++i) {
    const double centre = mstar(i) - c.mu(i);
    const double half = radius_ * box_(i);
    lo[i] = static_cast<long>(std::ceil(centre - half));
    hi[i] = static_cast<long>(std::floor(centre + half));
    if (hi[i] < lo[i]) hi[i] = lo[i] = std::lround(centre);
    n[i] = lo[i];
  }
  const CVec shift = z + c.nu.cast<cplx>();
  const double r2 = radius_ * radius_;
  RVec m(g);
  while (true) {
    for (int i = 0; i < g; ++i) m(i) = n[i] + c.mu(i);
    const RVec dm = m - mstar;
    if (dm.dot(im_tau_ * dm) <= r2) {
      const CVec mc = m.cast<cplx>();
      const cplx expo = kI * kPi * bilinear(mc, tau_ * mc) + 2.0 * kI * kPi * bilinear(mc, shift);
      const cplx t = std::exp(expo);
      out.value += t;
      if (order >= 1) out.grad += (2.0 * kI * kPi * t) * mc;
      if (order >= 2) out.hess += (std::pow(2.0 * kI * kPi, 2) * t) * (mc * mc.transpose());
    }
    int i = 0;
    while (i < g && ++n[i] > hi[i]) {
      n[i] = lo[i];
      ++i;
    }
    if (i == g) break;
  }
  return out;
}

cplx ThetaContext::value(const Characteristic& c, const CVec& z) const { return jet(c, z, 0).value; }
CVec ThetaContext::gradient(const Characteristic& c, const CVec& z) const { return jet(c, z, 1).grad; }
CMat ThetaContext::hessian(const Characteristic& c, const CVec& z) const { return jet(c, z, 2).hess; }

CVec ThetaContext::log_gradient(const Characteristic& c, const CVec& z) const {
  const ThetaJet j = jet(c, z, 1);
  return j.grad / j.value;
}

CMat ThetaContext::log_hessian(const Characteristic& c, const CVec& z) const {
  const ThetaJet j = jet(c, z, 2);
  return j.hess / j.value - (j.grad * j.grad.transpose()) / (j.value * j.value);
}

std::vector<RVec> half_periods(int g) {
  std::vector<RVec> out;
  for (int mask = 0; mask < (1 << g); ++mask) {
    RVec a(g);
    for (int i = 0; i < g; ++i) a(i) = (mask >> i) & 1;
    out.push_back(a);
  }
  return out;
}

double binary_addition_check(const ThetaContext& half_tau, const ThetaContext& tau,
                             const Characteristic& c, const Characteristic& cp, const CVec& z1,
                             const CVec& z2) {
  const cplx lhs = half_tau.value(c, z1 + z2) * half_tau.value(cp, z1 - z2);
  cplx rhs{};
  double scale = std::abs(lhs);
  for (const RVec& a : half_periods(half_tau.genus())) {
    const Characteristic c1{0.5 * (c.mu + cp.mu + a), c.nu + cp.nu};
    const Characteristic c2{0.5 * (c.mu - cp.mu + a), c.nu - cp.nu};
    const cplx term = tau.value(c1, 2.0 * z1) * tau.value(c2, 2.0 * z2);
    rhs += term;
    scale = std::max(scale, std::abs(term));
  }
  return std::abs(lhs - rhs) / std::max(scale, 1e-300);
}

ModularRelation::ModularRelation(const CMat& tau, const Characteristic& ch, const CVec& probe)
    : tau_inv(tau.inverse()),
      modular(CMat(-0.5 * tau.inverse())),
      doubled(CMat(2.0 * tau)),
      c(ch) {
  const Characteristic swapped{-c.nu, c.mu};
  const cplx num = modular.value(swapped, tau_inv * probe);
  const cplx den = std::exp(2.0 * kI * kPi * bilinear(probe, tau_inv * probe)) * doubled.value(c, 2.0 * probe);
  if (std::abs(num) < 1e-10 || std::abs(den) < 1e-10) {
    throw Error(ErrorKind::DegenerateProbe, "theta vanishes at the modular probe point");
  }
  d = num / den;
}

cplx ModularRelation::doubled_via_modular(const CVec& z) const {
  const Characteristic swapped{-c.nu, c.mu};
  return modular.value(swapped, tau_inv * z) / (d * std::exp(2.0 * kI * kPi * bilinear(z, tau_inv * z)));
}

double ModularRelation::residual(const CVec& z) const {
  return rel_diff(doubled_via_modular(z), doubled.value(c, 2.0 * z));
}

}  // namespace hypfay
