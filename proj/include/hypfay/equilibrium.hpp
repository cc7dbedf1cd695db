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
#include <memory>
#include <string>
#include <vector>

#include "hypfay/surface.hpp"

namespace hypfay {

struct EquilibriumOptions {
  double tol = 1e-13;
  int max_iterations = 60;
  // Nodes per gap for the root equations (shared by values and Jacobian).
  int gap_nodes = 256;
};

// Spectral data of the unconstrained equilibrium measure whose support is the
// union of the cuts: M(x) = t prod (x - z_h), V' = polynomial part of M s.
struct EquilibriumData {
  Curve curve;
  RVec z_roots;       // z_h in (b_{h-1}, a_h), h = 1..g
  double t_top = 0.0;
  RVec m_coeffs;      // M, ascending powers
  RVec vp_coeffs;     // V', ascending powers
  RVec v_coeffs;      // V with V(0) = 0, ascending powers
  RVec eps_star;      // masses of cuts 1..g
  RVec cut_masses;    // masses of cuts 0..g
  double gap_residual = 0.0;
  double mass = 0.0;
  int iterations = 0;
  bool sweep_fallback = false;

  explicit EquilibriumData(Curve c) : curve(std::move(c)) {}
  int genus() const { return curve.genus(); }
  // t_k with V = sum t_k x^k / k, k = 1..2g+2 (index k).
  double t(int k) const { return vp_coeffs(k - 1); }
  int degree() const { return static_cast<int>(v_coeffs.size()) - 1; }
  cplx M(cplx x) const;
  cplx V(cplx x) const;
  cplx Vp(cplx x) const;
  // Stieltjes transform (V' - M s)/2 on the plus sheet.
  cplx W1(cplx x) const;
  // M(x) Im s(x + i0) / 2 pi on the cuts, 0 elsewhere.
  double density(double x) const;
  // P = (V'^2 - M^2 sigma)/4.
  cplx P(cplx x) const;
};

// Newton solve of the gap conditions for the roots of M, then the mass
// normalization and the potential.
EquilibriumData solve_equilibrium(const Curve& curve, const EquilibriumOptions& opts = {});

// Gap integrals J_h(z) = int_{gap h} s prod (x - z_j) dx and their Jacobian.
RVec gap_integrals(const Curve& curve, const RVec& z, int nodes = 256);
RMat gap_jacobian(const Curve& curve, const RVec& z, int nodes = 256);

// Contour functionals on stadia around the cuts.
class Functionals {
 public:
  using Fn = std::function<cplx(cplx)>;
  // surface may be null only for genus 0.
  Functionals(const EquilibriumData& eq, std::shared_ptr<const Surface> surface, double beta = 2.0);

  double beta() const { return beta_; }
  cplx L(const Fn& f) const;
  // Q without the 2/beta prefactor.
  cplx Q_bare(const Fn& f, const Fn& g) const;
  cplx Q(const Fn& f, const Fn& g) const { return (2.0 / beta_) * Q_bare(f, g); }
  CVec U(const Fn& f) const;
  // Largest |Im| of the contours; test points must lie beyond it.
  double contour_height() const { return height_; }
  std::size_t inner_nodes() const { return inner_.x.size(); }
  std::size_t outer_nodes() const { return outer_.x.size(); }
  // Relative mismatch between the algebraic bidifferential and the
  // theta-function one at the fitting pairs.
  double bidifferential_fit() const { return fit_error_; }

 private:
  struct Contour {
    std::vector<cplx> x;
    std::vector<cplx> w;  // dx weights
  };
  static Contour build(const Curve& curve, double factor);
  cplx algebraic_bidifferential(cplx x1, cplx x2, cplx s1, cplx s2) const;
  cplx holomorphic_part(cplx x1, cplx x2, cplx s1, cplx s2) const;
  void fit_holomorphic_part();
  // B(x1, x2) - 1/(x1 - x2)^2 on the plus sheet.
  cplx w2(cplx x1, cplx x2, cplx s1, cplx s2) const;

  const EquilibriumData& eq_;
  std::shared_ptr<const Surface> surface_;
  double beta_;
  double height_ = 0.0;
  Contour inner_, outer_;
  std::vector<cplx> w1_inner_;
  CMat w2_;                  // inner x outer
  std::vector<CVec> du_inner_;
  CVec sigma_;               // ascending coefficients of sigma
  CMat holo_;                // holomorphic correction of the bidifferential
  double fit_error_ = 0.0;
};

struct EnergyResult {
  double energy = 0.0;       // (beta/2)(I2 - int V dmu)
  double log_energy = 0.0;   // I2 = double integral of ln|x - y|
  double potential = 0.0;    // int V dmu
  double error = 0.0;
};

EnergyResult energy_direct(const EquilibriumData& eq, double beta = 2.0);

// Effective potential V(x) - 2 int ln|x - y| dmu(y).
double effective_potential(const EquilibriumData& eq, double x);

struct EnergyFormulaReport {
  double lhs = 0.0;          // -E from the double integral
  cplx rhs{};                // geometric right-hand side
  double residual = 0.0;     // |lhs - Re rhs|
  double im_rhs = 0.0;
  double energy_error = 0.0;
  // Scaling diagnostic: the residual on the curve scaled by lambda, minus the
  // residual here, against -(beta/2) ln lambda.
  double scale_factor = 2.0;
  double scaled_residual_shift = 0.0;
  double predicted_shift = 0.0;
};

EnergyFormulaReport check_energy_formula(const EquilibriumData& eq, const Functionals& fn,
                                         const Surface* surface, double beta, bool with_scaling = true);

struct VeqReport {
  RVec closed_form;
  // Same with the weight (g + 1 - k)/2 on tau e_k; agrees only for g = 1.
  RVec graded_form;
  RVec sum_route;
  RVec direct;       // (beta/2 - 1) int d_eps rho ln rho
  double imag_part = 0.0;
};

VeqReport compute_v_eq(const EquilibriumData& eq, const Surface& surface, double beta);

struct LogFunctionalReport {
  double line1 = 0.0;
  double line2 = 0.0;
  double line3 = 0.0;
  double line4 = 0.0;
  double simplification = 0.0;
  double line4_unsigned = 0.0;  // without the sign from the diagonal limit
  int points = 0;
};

// Log-functional identities at random points above the contours (compared
// modulo 2 pi i).
LogFunctionalReport check_log_functionals(const EquilibriumData& eq, const Functionals& fn,
                                          const Surface& surface, int points, std::uint64_t seed);

// |U[V] - (tau eps + u(inf-))|.
double check_u_of_v(const EquilibriumData& eq, const Functionals& fn, const Surface& surface);

struct ConstructionReport {
  double gap_residual = 0.0;
  double mass_error = 0.0;
  double potential_spread = 0.0;   // max - min of the effective potential on the cuts
  double loop_equation = 0.0;      // max |W1^2 - V'W1 + P_fit| / scale
  double p_fit_error = 0.0;        // fitted vs exact P coefficients
  double min_density = 0.0;
  double boutroux_a = 0.0;         // max |A-period - 2 pi i eps|
  double boutroux_b = 0.0;         // max |B-period|
  double decomposition = 0.0;      // max pointwise error of the phi decomposition
};

ConstructionReport check_construction(const EquilibriumData& eq, const Surface* surface);

std::string equilibrium_to_json(const EquilibriumData& eq, double beta);
std::string density_csv(const EquilibriumData& eq, int samples_per_cut = 200);

}  // namespace hypfay
