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

#include <vector>

#include "hypfay/core.hpp"

namespace hypfay {

struct Characteristic {
  RVec mu;
  RVec nu;

  static Characteristic zero(int g);
  // mu = e/2, nu = e'/2 for integer vectors e, e'.
  static Characteristic half(const std::vector<int>& e, const std::vector<int>& e_prime);
  int genus() const { return static_cast<int>(mu.size()); }
  bool is_half_integer() const;
  // e . e' mod 2 for half-integer characteristics.
  int parity() const;
};

struct ThetaJet {
  cplx value{};
  CVec grad;
  CMat hess;
};

// Riemann theta with characteristics for a fixed matrix tau:
//   sum_n exp(i pi (n+mu).tau(n+mu) + 2 i pi (n+mu).(z+nu)).
// The lattice window is an ellipsoid centred on the stationary point of the
// Gaussian factor, so accuracy does not degrade for large Im z.
class ThetaContext {
 public:
  explicit ThetaContext(CMat tau, double tol = 1e-15);

  int genus() const { return static_cast<int>(tau_.rows()); }
  const CMat& tau() const { return tau_; }
  double radius() const { return radius_; }
  double tail_bound() const { return tail_; }
  ThetaContext with_radius(double radius) const;

  cplx value(const Characteristic& c, const CVec& z) const;
  CVec gradient(const Characteristic& c, const CVec& z) const;
  CMat hessian(const Characteristic& c, const CVec& z) const;
  ThetaJet jet(const Characteristic& c, const CVec& z, int order = 2) const;
  // Hessian of ln theta.
  CMat log_hessian(const Characteristic& c, const CVec& z) const;
  CVec log_gradient(const Characteristic& c, const CVec& z) const;

 private:
  CMat tau_;
  RMat im_tau_;
  RMat im_tau_inv_;
  RMat box_;  // sqrt of diag of (Im tau)^-1
  double tol_;
  double radius_;  // in the norm sqrt(m^T Im(tau) m)
  double tail_;
};

// Riemann's binary addition theorem:
//   th_{mu,nu}(z1+z2|tau/2) th_{mu',nu'}(z1-z2|tau/2)
//     = sum_alpha th_{(mu+mu'+alpha)/2, nu+nu'}(2 z1|tau) th_{(mu-mu'+alpha)/2, nu-nu'}(2 z2|tau)
// Returns |LHS - RHS| / max term.
double binary_addition_check(const ThetaContext& half_tau, const ThetaContext& tau,
                             const Characteristic& c, const Characteristic& c_prime,
                             const CVec& z1, const CVec& z2);

// All 2^g vectors alpha in {0,1}^g.
std::vector<RVec> half_periods(int g);

// Modular relation between tau and tau' = -tau^{-1}/2:
//   th_{-nu,mu}(tau^{-1} z | -tau^{-1}/2) = D e^{2 i pi z.tau^{-1} z} th_{mu,nu}(2z | 2tau)
// D is calibrated at the probe point.
struct ModularRelation {
  CMat tau_inv;
  ThetaContext modular;  // matrix -tau^{-1}/2
  ThetaContext doubled;  // matrix 2 tau
  Characteristic c;
  cplx d{};

  ModularRelation(const CMat& tau, const Characteristic& c, const CVec& probe);
  // Right-hand side route: th_{mu,nu}(2z|2tau) recovered from the modular side.
  cplx doubled_via_modular(const CVec& z) const;
  double residual(const CVec& z) const;
};

}  // namespace hypfay
