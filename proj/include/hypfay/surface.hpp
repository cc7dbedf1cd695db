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

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "hypfay/curve.hpp"
#include "hypfay/periods.hpp"
#include "hypfay/theta.hpp"

namespace hypfay {

struct AbelValue {
  CVec u;
  std::string path;
};

// A point of the universal cover: a surface point with the Abel value of one
// chosen path, and omega = grad(theta_odd)(0) . du against dX (against the
// coordinate 1/X at the points at infinity).
struct CoverPoint {
  SurfacePoint point;
  CVec u;
  cplx omega{};
  std::string path;
};

// Append-only table of square-root signs for half-forms, one per surface
// point, so that every occurrence of a point inside one evaluation uses the
// same trivialization.
class HalfFormRegistry {
 public:
  // Records the sign for p if none is stored yet; returns the stored sign.
  int assign(const SurfacePoint& p, int sign);
  int sign(const SurfacePoint& p) { return assign(p, +1); }
  cplx sqrt_omega(const CoverPoint& p);
  std::size_t size() const;

 private:
  using Key = std::tuple<int, double, double, int>;
  static Key key(const SurfacePoint& p);
  mutable std::mutex mu_;
  std::map<Key, int> signs_;
};

struct SurfaceOptions {
  PeriodOptions periods{};
  double theta_tol = 1e-15;
  double abel_tol = 1e-13;
  // Minimum distance from the cuts, as a fraction of the curve scale, for
  // points fed to the Abel map when clearance is enforced.
  double clearance = 0.05;
};

// Everything attached to one curve: periods, theta context for tau, the odd
// characteristic, u at the point at infinity on the minus sheet and the
// constants at infinity.
class Surface {
 public:
  explicit Surface(Curve curve, SurfaceOptions opts = {});

  const Curve& curve() const { return curve_; }
  const PeriodData& periods() const { return periods_; }
  const ThetaContext& theta() const { return *theta_; }
  int genus() const { return curve_.genus(); }
  const Characteristic& odd() const { return odd_; }
  const CVec& odd_gradient() const { return odd_grad_; }
  const CVec& u_inf() const { return u_inf_; }
  cplx omega_inf(Sheet sheet) const;
  // K = omega_inf(+)^2 / theta_odd(-u_inf)^2, the constant multiplying the
  // eta-product terms of the identities.
  cplx eta_constant() const { return eta_constant_; }

  CVec du(const SurfacePoint& p) const;
  AbelValue abel(const SurfacePoint& p, bool enforce_clearance = true) const;
  // Closed-form Abel value at branch point index j (a_k = 2k, b_k = 2k+1).
  CVec abel_weierstrass(int j) const;
  // Direct quadrature of the same value from above.
  CVec abel_branch_direct(int j) const;

  CoverPoint cover(const SurfacePoint& p, bool enforce_clearance = true) const;
  CoverPoint cover(cplx x, Sheet sheet = Sheet::Plus) const;
  CoverPoint infinity(Sheet sheet) const;
  // Same surface point, Abel value moved by the lattice vector m + tau n.
  CoverPoint shifted(const CoverPoint& p, const Eigen::VectorXi& m, const Eigen::VectorXi& n) const;

  cplx theta_odd(const CVec& v) const { return theta_->value(odd_, v); }

  cplx prime_form(const CoverPoint& a, const CoverPoint& b, HalfFormRegistry& reg) const;
  // E(a,b)^2, free of square-root choices.
  cplx prime_form_squared(const CoverPoint& a, const CoverPoint& b) const;
  // E(a,b)^2 built from another odd characteristic.
  cplx prime_form_squared(const Characteristic& c, const CoverPoint& a, const CoverPoint& b) const;
  cplx eta(const CoverPoint& z) const;
  // B(a,b) / (dX dX).
  cplx bidifferential(const CoverPoint& a, const CoverPoint& b) const;
  // dS_{p,q}(z) / dX: residue -1 at p and +1 at q.
  cplx third_kind(const CoverPoint& p, const CoverPoint& q, const CoverPoint& z) const;
  // dB_{p,k}(z) / dX by the trapezoid rule on a circle in the local chart at p.
  cplx second_kind(const SurfacePoint& p, int k, const CoverPoint& z, int nodes = 128) const;
  // Integral of dB_{inf-,k} from the point at infinity on the plus sheet to z.
  cplx second_kind_integral(int k, const CoverPoint& z) const;

 private:
  struct Ring {
    std::vector<cplx> zeta;
    std::vector<CoverPoint> pts;
    std::vector<CVec> du_dzeta;
  };
  const Ring& infinity_ring() const;
  CVec ray_integral(cplx start, cplx direction) const;
  Characteristic find_odd_characteristic() const;

  Curve curve_;
  SurfaceOptions opts_;
  PeriodData periods_;
  std::unique_ptr<ThetaContext> theta_;
  Characteristic odd_;
  CVec odd_grad_;
  CVec u_inf_;
  cplx eta_constant_{};
  mutable std::once_flag ring_once_;
  mutable std::unique_ptr<Ring> ring_;
};

}  // namespace hypfay
