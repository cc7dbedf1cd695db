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

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hypfay {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  InvalidCurve,
  PointOnCut,
  OutOfChart,
  QuadratureNoConvergence,
  PathHitsSingularity,
  IllConditionedQ,
  TailBoundExceeded,
  DegenerateProbe,
  SingularCharacteristic,
  NearDiagonal,
  PathTooCloseToCut,
  RootEscapedGap,
  NoConvergence,
  NegativeDensity,
  DegenerateConfiguration,
  OddDimension,
  PoleOnDomain,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Bilinear (not sesquilinear) pairing a . b.
inline cplx bilinear(const CVec& a, const CVec& b) { return a.cwiseProduct(b).sum(); }

// Relative closeness measure used by residual reports.
inline double rel_diff(cplx a, cplx b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

}  // namespace hypfay
