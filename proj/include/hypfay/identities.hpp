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

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypfay/surface.hpp"

namespace hypfay {

enum class IdentityKind { Fay, Beta2, Beta1, Beta1Equiv, Beta4, FayFromBeta2 };

std::string_view to_string(IdentityKind kind);
std::optional<IdentityKind> identity_from_string(std::string_view name);

struct NamedValue {
  std::string name;
  cplx value{};
};

struct IdentityEvaluation {
  std::vector<NamedValue> terms;
  // |signed sum of terms| / max |term|
  double residual = 0.0;
  // Auxiliary consistency residuals (reassembly, modular route, ...).
  std::map<std::string, double> checks;
};

// A surface together with the extra theta contexts the identities need.
class IdentityContext {
 public:
  explicit IdentityContext(std::shared_ptr<const Surface> surface);

  const Surface& surface() const { return *surface_; }
  const ThetaContext& tau() const { return surface_->theta(); }
  const ThetaContext& half_tau() const { return half_; }
  const ThetaContext& double_tau() const { return double_; }
  cplx eta_constant() const { return surface_->eta_constant(); }

 private:
  std::shared_ptr<const Surface> surface_;
  ThetaContext half_;
  ThetaContext double_;
};

using PointQuad = std::array<CoverPoint, 4>;

// Trisecant identity for the points z1..z4 and the shift v:
//   T13 T24 th(v+u1-u2+u3-u4) th(v) + T14 T32 th(v+u1-u2) th(v+u3-u4)
//     - T12 T34 th(v+u1-u4) th(v+u3-u2) = 0
// with T = theta at the odd characteristic and th = theta at zero.
IdentityEvaluation eval_fay(const IdentityContext& ctx, const PointQuad& z, const CVec& v);

// beta = 2 identity for (z, z', w, w'); theta_{mu,nu}(. + shift | tau).
IdentityEvaluation eval_beta2(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c,
                              const CVec& shift, HalfFormRegistry& reg);

// beta = 1 identity for (z1, z1', z2, z2') with theta_{mu,nu}(. | tau/2).
IdentityEvaluation eval_beta1(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c);

// Equivalent beta = 1 form for one class alpha in {0,1}^g with theta_{alpha/2,0}(. | tau).
IdentityEvaluation eval_beta1_equiv(const IdentityContext& ctx, const PointQuad& p, const RVec& alpha);

// |beta1 combination - sum over alpha of theta_{mu+alpha/2,2nu}(U|tau) x bracket_alpha| / max term.
double beta1_reassembly(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c);

// beta = 4 identity with theta_{mu,nu}(2 . | 2 tau).
IdentityEvaluation eval_beta4(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c);

// The beta = 4 terms recomputed through the modular relation from the
// matrix -tau^{-1}/2; returns the larger of the term-wise deviation and the
// residual of the recomputed identity.
double beta4_modular_check(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c);

// Adds the beta = 2 identity to its z <-> w swap, divides by
// (X(z)-X(w))(X(z')-X(w')) and compares with the prime-form version of the
// trisecant identity on (z1..z4) = (z, w, z', w').
IdentityEvaluation fay_from_beta2(const IdentityContext& ctx, const PointQuad& p, const CVec& nu,
                                  HalfFormRegistry& reg);

struct SamplingOptions {
  int samples = 20;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  // Draw random (mu, nu) in [0,1)^g x [-1/2,1/2)^g; otherwise zero.
  bool random_characteristic = true;
  // Draw random square-root signs for the half-form registry.
  bool random_signs = false;
};

struct IdentitySample {
  std::uint64_t index = 0;
  PointQuad points;
  Characteristic characteristic;
  CVec shift;
  IdentityEvaluation eval;
};

struct IdentityReport {
  IdentityKind kind = IdentityKind::Fay;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::vector<IdentitySample> samples;
  double max_residual = 0.0;
  std::map<std::string, double> max_checks;
  bool passed() const;
};

// Plus-sheet points at distance at least 0.1 scale from every cut and from
// each other; for complex curves the points lie above or below all cuts.
PointQuad sample_points(const Surface& surface, std::mt19937_64& rng);

// Independent per-sample generators derived from (seed, index).
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

// Worker count from HYPFAY_THREADS (default 1).
int thread_count();

IdentityReport run_identity(IdentityKind kind, const IdentityContext& ctx, const SamplingOptions& opts);

std::string report_to_json(const IdentityReport& report, const Curve& curve);

}  // namespace hypfay
