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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hypfay/curve.hpp"
#include "hypfay/theta.hpp"

namespace hypfay {

// Maximum relative residual of each theta property over random samples.
struct ThetaSelftest {
  int genus = 1;
  int samples = 0;
  std::map<std::string, double> residuals;
  double max_residual() const;
};

// Random Riemann matrix with Im tau = A^T A + I/2 from the generator.
CMat random_riemann_matrix(int g, std::mt19937_64& rng);

ThetaSelftest theta_selftest(int g, std::uint64_t seed, int samples = 100);

// tau = i AGM(1, k') / AGM(1, k) for four real branch points.
cplx elliptic_tau(const Curve& curve);

// Curves the acceptance plan samples from.
std::vector<Curve> genus1_curves();
std::vector<Curve> genus2_curves();
// Branch points moved by up to 5% of the scale into the complex plane.
Curve complex_perturbation(const Curve& curve, std::uint64_t seed);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  // Failure explained by an analysed defect of the statement under test; it is
  // reported but does not fail the suite.
  bool known_failure = false;
  std::string note;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
};

struct SuiteOptions {
  std::uint64_t seed = 2026;
  std::vector<int> only;  // empty runs every criterion
};

inline constexpr int kCriteria = 11;

CriterionResult run_criterion(int id, const SuiteOptions& opts);
std::vector<CriterionResult> run_suite(const SuiteOptions& opts);
bool suite_passed(const std::vector<CriterionResult>& results);
std::string status_line(const CriterionResult& r);
std::string suite_table(const std::vector<CriterionResult>& results);
std::string suite_to_json(const std::vector<CriterionResult>& results, const SuiteOptions& opts);

}  // namespace hypfay
