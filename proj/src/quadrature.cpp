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

#include "hypfay/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace hypfay {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidCurve: return "InvalidCurve";
    case ErrorKind::PointOnCut: return "PointOnCut";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::QuadratureNoConvergence: return "QuadratureNoConvergence";
    case ErrorKind::PathHitsSingularity: return "PathHitsSingularity";
    case ErrorKind::IllConditionedQ: return "IllConditionedQ";
    case ErrorKind::TailBoundExceeded: return "TailBoundExceeded";
    case ErrorKind::DegenerateProbe: return "DegenerateProbe";
    case ErrorKind::SingularCharacteristic: return "SingularCharacteristic";
    case ErrorKind::NearDiagonal: return "NearDiagonal";
    case ErrorKind::PathTooCloseToCut: return "PathTooCloseToCut";
    case ErrorKind::RootEscapedGap: return "RootEscapedGap";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::PoleOnDomain: return "PoleOnDomain";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace quad {

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    auto rule = std::make_unique<Rule>();
    const auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative half
    for (double z : zeros) {
      const double dp = boost::math::legendre_p_prime(n, z);
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      rule->x.push_back(z);
      rule->w.push_back(w);
      if (z != 0.0) {
        rule->x.push_back(-z);
        rule->w.push_back(w);
      }
    }
    slot = std::move(rule);
  }
  return *slot;
}

namespace detail {

const KronrodTable& kronrod15() {
  static const KronrodTable table = [] {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xa = GK::abscissa();
    const auto& wa = GK::weights();
    const auto& wg = G::weights();
    KronrodTable t{};
    int k = 0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
      const double gw = (i % 2 == 0) ? wg[i / 2] : 0.0;
      t.xk[k] = xa[i];
      t.wk[k] = wa[i];
      t.wg[k] = gw;
      ++k;
      if (i != 0) {
        t.xk[k] = -xa[i];
        t.wk[k] = wa[i];
        t.wg[k] = gw;
        ++k;
      }
    }
    return t;
  }();
  return table;
}

}  // namespace detail
}  // namespace quad
}  // namespace hypfay
