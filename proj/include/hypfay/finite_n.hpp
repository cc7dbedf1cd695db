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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hypfay/identities.hpp"

namespace hypfay {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Ensemble |Delta(l)|^beta exp(-(beta N / 2) sum V(l_i)) on a union of intervals.
struct EnsembleSpec {
  std::vector<Interval> intervals;
  RVec v_coeffs;  // ascending powers
  int beta = 2;
  int N = 1;

  // Throws ConfigError on overlapping intervals, odd degree, non-positive top
  // coefficient or beta outside {1, 2, 4}.
  void validate() const;
  double potential(double x) const;
  bool contains(cplx x) const;
};

// Two intervals with a double-well quartic potential.
EnsembleSpec default_ensemble(int beta, int N);

// Largest number of integration variables any average may use.
inline constexpr int kMaxDimension = 4;

// prod_i (x - l_i)^power inside the average.
struct DetFactor {
  cplx x{};
  int power = 1;
};

struct EnsembleAverage {
  double partition = 0.0;   // unordered partition function at this size
  cplx mean{};              // normalized average
  int nodes = 0;            // Gauss-Legendre nodes per variable at acceptance
  double change = 0.0;      // relative change against the previous refinement
};

// Average over `size` particles with the weight of `spec` (its N, not size).
// Nested Gauss-Legendre on ordered configurations, refined until the partition
// function and the average both move by less than rel_tol.
EnsembleAverage average(const EnsembleSpec& spec, int size, const std::vector<DetFactor>& factors,
                        double rel_tol = 1e-10);

// Antisymmetric matrix holding only its strict upper triangle.
class SkewMatrix {
 public:
  explicit SkewMatrix(int dimension);
  int dimension() const { return n_; }
  cplx operator()(int i, int j) const;
  // Sets A(i, j) = v and A(j, i) = -v; i != j.
  void set(int i, int j, cplx v);
  CMat dense() const;

 private:
  int index(int i, int j) const;
  int n_;
  std::vector<cplx> upper_;
};

// Parlett-Reid elimination with partial pivoting.
cplx pfaffian(const SkewMatrix& a);
// Expansion along the first row (exponential cost, for small matrices).
cplx pfaffian_expansion(const SkewMatrix& a);

struct KernelReport {
  int beta = 2;
  int size = 0;   // particle count of the reference ensemble
  int m = 1;
  std::vector<NamedValue> entries;
  cplx lhs{};
  cplx rhs{};
  double residual = 0.0;   // |lhs - rhs| / |lhs|
  int max_dimension = 0;
};

// Determinantal formula for ratios of characteristic polynomials; x, xp hold
// m1 points, xt, xtp hold m2 points, primed points off the support.
KernelReport check_beta2_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp,
                                const std::vector<cplx>& xt, const std::vector<cplx>& xtp);

// Pfaffian formulas; spec.N is the particle count (even for beta = 1).
KernelReport check_beta1_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp);
KernelReport check_beta4_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp);

// Distinct points at distance at least 0.3 from the real axis.
std::vector<cplx> sample_kernel_points(const EnsembleSpec& spec, int count, std::mt19937_64& rng);

struct FiniteNOptions {
  int beta = 2;
  int N = 1;        // formula N: the beta = 1 ensemble has 2N particles
  int m = 1;
  std::uint64_t seed = 0;
  int samples = 3;
  double tol = 0.0; // 0 selects the default for (beta, m)
};

struct FiniteNRun {
  FiniteNOptions options;
  EnsembleSpec spec;
  std::vector<std::vector<cplx>> points;
  std::vector<KernelReport> reports;
  double tol = 0.0;
  double max_residual = 0.0;
  bool passed() const { return max_residual < tol; }
};

double default_kernel_tolerance(int beta, int m);
FiniteNRun run_finite_n(const FiniteNOptions& opts);
std::string finite_n_to_json(const FiniteNRun& run);

}  // namespace hypfay
