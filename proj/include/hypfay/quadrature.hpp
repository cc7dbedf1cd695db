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

#include <cmath>
#include <vector>

#include "hypfay/core.hpp"

namespace hypfay::quad {

struct Rule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre rule with n nodes, cached per n.
const Rule& gauss_legendre(int n);

template <class T>
struct Integral {
  T value;
  double error = 0.0;
  int evaluations = 0;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }
inline double magnitude(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double magnitude(const RVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

namespace detail {
struct KronrodTable {
  double xk[15];
  double wk[15];
  double wg[15];  // zero at pure Kronrod nodes
};
const KronrodTable& kronrod15();
}  // namespace detail

// Adaptive Gauss-Kronrod (7/15) for scalar or Eigen-vector valued integrands.
// Throws QuadratureNoConvergence when the error budget cannot be met.
template <class F>
auto gauss_kronrod(F&& f, double a, double b, double abs_tol, int max_depth = 40)
    -> Integral<decltype(f(a))> {
  using T = decltype(f(a));
  const auto& tab = detail::kronrod15();
  Integral<T> out{};
  bool first = true;
  double worst = 0.0;

  auto panel = [&](double lo, double hi, T& k, double& err) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    T g{};
    for (int i = 0; i < 15; ++i) {
      T v = f(c + h * tab.xk[i]);
      if (i == 0) {
        k = v * (tab.wk[i] * h);
        g = v * (tab.wg[i] * h);
      } else {
        k = k + v * (tab.wk[i] * h);
        if (tab.wg[i] != 0.0) g = g + v * (tab.wg[i] * h);
      }
    }
    out.evaluations += 15;
    err = magnitude(T(k - g));
  };

  struct Job {
    double lo, hi, tol;
    int depth;
  };
  std::vector<Job> stack{{a, b, abs_tol, 0}};
  while (!stack.empty()) {
    Job j = stack.back();
    stack.pop_back();
    T k{};
    double err = 0.0;
    panel(j.lo, j.hi, k, err);
    const bool tiny = std::abs(j.hi - j.lo) <= 1e-15 * (1.0 + std::abs(j.lo));
    if (err <= j.tol || j.depth >= max_depth || tiny) {
      if (err > j.tol) worst = std::max(worst, err / std::max(j.tol, 1e-300));
      if (first) {
        out.value = k;
        first = false;
      } else {
        out.value = out.value + k;
      }
      out.error += err;
      continue;
    }
    const double mid = 0.5 * (j.lo + j.hi);
    const double sub = j.tol / std::sqrt(2.0);
    stack.push_back({mid, j.hi, sub, j.depth + 1});
    stack.push_back({j.lo, mid, sub, j.depth + 1});
  }
  if (out.error > 1e3 * abs_tol && worst > 1e3) {
    throw Error(ErrorKind::QuadratureNoConvergence,
                "adaptive Gauss-Kronrod error " + std::to_string(out.error));
  }
  return out;
}

// Integral of f along the straight segment lo -> hi where f has inverse or
// direct square-root behaviour at both ends. Uses x = m - d cos(theta) with the
// midpoint rule in theta (Gauss-Chebyshev), doubling n until two successive
// values agree to tol.
template <class F>
auto chebyshev_segment(F&& f, cplx lo, cplx hi, double tol, int n0 = 32, int n_max = 1 << 14)
    -> Integral<decltype(f(lo))> {
  using T = decltype(f(lo));
  const cplx m = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
  auto rule = [&](int n) {
    T acc{};
    for (int j = 0; j < n; ++j) {
      const double th = (j + 0.5) * kPi / n;
      T v = f(m - d * std::cos(th)) * (d * std::sin(th) * (kPi / n));
      acc = j == 0 ? v : T(acc + v);
    }
    return acc;
  };
  Integral<T> out{};
  int n = n0;
  T prev = rule(n);
  out.evaluations = n;
  while (true) {
    // tripling keeps the previous midpoints inside the refined node set
    const int n3 = 3 * n;
    T cur = rule(n3);
    out.evaluations += n3;
    const double diff = magnitude(T(cur - prev));
    if (diff <= tol || n3 >= n_max) {
      out.value = cur;
      out.error = diff;
      if (diff > 1e3 * tol) {
        throw Error(ErrorKind::QuadratureNoConvergence,
                    "Chebyshev segment rule stalled at " + std::to_string(diff));
      }
      return out;
    }
    prev = cur;
    n = n3;
  }
}

// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
template <class F>
auto composite_legendre(F&& f, double a, double b, int panels, int order) -> decltype(f(a)) {
  using T = decltype(f(a));
  const Rule& r = gauss_legendre(order);
  const double h = (b - a) / panels;
  T acc{};
  bool first = true;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      T v = f(c + 0.5 * h * r.x[i]) * (0.5 * h * r.w[i]);
      acc = first ? v : T(acc + v);
      first = false;
    }
  }
  return acc;
}

}  // namespace hypfay::quad
