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

#include "hypfay/finite_n.hpp"

#include <algorithm>
#include <numeric>

#include "hypfay/quadrature.hpp"
#include "hypfay/report.hpp"

namespace hypfay {

void EnsembleSpec::validate() const {
  if (beta != 1 && beta != 2 && beta != 4) throw Error(ErrorKind::ConfigError, "beta must be 1, 2 or 4");
  if (N < 1 || N > 3) throw Error(ErrorKind::ConfigError, "N must lie in 1..3");
  if (intervals.empty()) throw Error(ErrorKind::ConfigError, "intervals: at least one interval required");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (!(intervals[i].lo < intervals[i].hi)) throw Error(ErrorKind::ConfigError, "intervals: empty interval");
    if (i > 0 && !(intervals[i - 1].hi < intervals[i].lo)) {
      throw Error(ErrorKind::ConfigError, "intervals: not sorted and disjoint");
    }
  }
  Eigen::Index deg = v_coeffs.size() - 1;
  while (deg >= 0 && v_coeffs(deg) == 0.0) --deg;
  if (deg < 2 || deg % 2 != 0) throw Error(ErrorKind::ConfigError, "V_coeffs: degree must be even and positive");
  if (!(v_coeffs(deg) > 0.0)) throw Error(ErrorKind::ConfigError, "V_coeffs: top coefficient must be positive");
}

double EnsembleSpec::potential(double x) const {
  double acc = 0.0;
  for (Eigen::Index i = v_coeffs.size(); i-- > 0;) acc = acc * x + v_coeffs(i);
  return acc;
}

bool EnsembleSpec::contains(cplx x) const {
  if (x.imag() != 0.0) return false;
  return std::any_of(intervals.begin(), intervals.end(),
                     [&](const Interval& iv) { return x.real() >= iv.lo && x.real() <= iv.hi; });
}

EnsembleSpec default_ensemble(int beta, int N) {
  EnsembleSpec spec;
  spec.intervals = {{-1.5, -0.4}, {0.2, 1.4}};
  spec.v_coeffs = RVec::Zero(5);
  spec.v_coeffs(2) = -0.5;
  spec.v_coeffs(4) = 0.25;
  spec.beta = beta;
  spec.N = N;
  return spec;
}

namespace {

struct Accumulator {
  double z = 0.0;
  cplx f{};
};

// Ordered configurations: interval indices non-decreasing, positions
// increasing within an interval. Each unordered configuration appears once.
class OrderedGrid {
 public:
  OrderedGrid(const EnsembleSpec& spec, int size, const std::vector<DetFactor>& factors, int nodes)
      : spec_(spec), size_(size), factors_(factors), rule_(quad::gauss_legendre(nodes)) {
    coupling_ = 0.5 * spec.beta * spec.N;
  }

  Accumulator run() {
    Accumulator acc;
    pos_.assign(size_, 0.0);
    recurse(0, 0, 0.0, 1.0, 0.0, cplx{1.0, 0.0}, acc);
    return acc;
  }

 private:
  void recurse(int k, std::size_t first, double lo_prev, double w, double vsum, cplx f, Accumulator& acc) {
    if (k == size_) {
      const double weight = w * std::exp(-coupling_ * vsum);
      acc.z += weight;
      acc.f += weight * f;
      return;
    }
    for (std::size_t c = first; c < spec_.intervals.size(); ++c) {
      const double lo = (k > 0 && c == first) ? std::max(lo_prev, spec_.intervals[c].lo) : spec_.intervals[c].lo;
      const double hi = spec_.intervals[c].hi;
      const double half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < rule_.x.size(); ++i) {
        const double x = lo + half * (1.0 + rule_.x[i]);
        double vdm = 1.0;
        for (int j = 0; j < k; ++j) vdm *= std::abs(x - pos_[j]);
        cplx g = f;
        for (const auto& d : factors_) g *= std::pow(d.x - x, d.power);
        pos_[k] = x;
        recurse(k + 1, c, x, w * half * rule_.w[i] * std::pow(vdm, spec_.beta), vsum + spec_.potential(x), g, acc);
      }
    }
  }

  const EnsembleSpec& spec_;
  int size_;
  const std::vector<DetFactor>& factors_;
  const quad::Rule& rule_;
  double coupling_ = 0.0;
  std::vector<double> pos_;
};

}  // namespace

EnsembleAverage average(const EnsembleSpec& spec, int size, const std::vector<DetFactor>& factors, double rel_tol) {
  if (size < 0 || size > kMaxDimension) {
    throw Error(ErrorKind::ConfigError, "average over " + std::to_string(size) + " particles exceeds the dimension cap");
  }
  for (const auto& d : factors) {
    if (d.power < 0 && spec.contains(d.x)) throw Error(ErrorKind::PoleOnDomain, "denominator point on the support");
  }
  EnsembleAverage out;
  if (size == 0) {
    out.partition = 1.0;
    out.mean = 1.0;
    return out;
  }
  double factorial = 1.0;
  for (int k = 2; k <= size; ++k) factorial *= k;

  const std::vector<int> ladder = {12, 16, 24, 32, 48, 64, 96};
  Accumulator prev{};
  for (std::size_t step = 0; step < ladder.size(); ++step) {
    const int n = ladder[step];
    if (std::pow(static_cast<double>(n * spec.intervals.size()), size) > 4e8) break;
    const Accumulator cur = OrderedGrid(spec, size, factors, n).run();
    if (step > 0) {
      const cplx mean_prev = prev.f / prev.z, mean_cur = cur.f / cur.z;
      const double dz = std::abs(cur.z - prev.z) / cur.z;
      const double dm = std::abs(mean_cur - mean_prev) / std::max(std::abs(mean_cur), 1e-300);
      out.partition = factorial * cur.z;
      out.mean = mean_cur;
      out.nodes = n;
      out.change = std::max(dz, dm);
      if (out.change < rel_tol) return out;
    }
    prev = cur;
  }
  throw Error(ErrorKind::QuadratureNoConvergence,
              "ensemble average did not settle (relative change " + std::to_string(out.change) + ")");
}

SkewMatrix::SkewMatrix(int dimension) : n_(dimension), upper_(static_cast<std::size_t>(dimension) * dimension) {
  if (dimension < 0) throw Error(ErrorKind::ConfigError, "negative dimension");
}

int SkewMatrix::index(int i, int j) const { return i * n_ + j; }

cplx SkewMatrix::operator()(int i, int j) const {
  if (i == j) return {};
  return i < j ? upper_[index(i, j)] : -upper_[index(j, i)];
}

void SkewMatrix::set(int i, int j, cplx v) {
  if (i == j) throw Error(ErrorKind::ConfigError, "diagonal of a skew matrix is zero");
  if (i < j) {
    upper_[index(i, j)] = v;
  } else {
    upper_[index(j, i)] = -v;
  }
}

CMat SkewMatrix::dense() const {
  CMat a(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) a(i, j) = (*this)(i, j);
  }
  return a;
}

cplx pfaffian(const SkewMatrix& skew) {
  const int n = skew.dimension();
  if (n % 2 != 0) throw Error(ErrorKind::OddDimension, "Pfaffian of odd dimension " + std::to_string(n));
  CMat a = skew.dense();
  cplx pf{1.0, 0.0};
  for (int k = 0; k + 1 < n; k += 2) {
    Eigen::Index rel = 0;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&rel);
    const int kp = k + 1 + static_cast<int>(rel);
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == cplx{}) return {};
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const int rest = n - k - 2;
      const CVec tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
      const CVec col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

namespace {

cplx expand(const SkewMatrix& a, std::vector<int>& idx) {
  if (idx.empty()) return {1.0, 0.0};
  const int first = idx[0];
  cplx acc{};
  for (std::size_t j = 1; j < idx.size(); ++j) {
    std::vector<int> rest;
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (k != j) rest.push_back(idx[k]);
    }
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    acc += sign * a(first, idx[j]) * expand(a, rest);
  }
  return acc;
}

// Delta(x) = prod_{i<j} (x_j - x_i)
cplx vandermonde(const std::vector<cplx>& x) {
  cplx p{1.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) p *= x[j] - x[i];
  }
  return p;
}

cplx cross(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  cplx p{1.0, 0.0};
  for (const auto& a : x) {
    for (const auto& b : y) p *= a - b;
  }
  return p;
}

void require_admissible(const EnsembleSpec& spec, const std::vector<cplx>& primed) {
  for (const auto& p : primed) {
    if (spec.contains(p)) throw Error(ErrorKind::PoleOnDomain, "primed point on the support");
  }
}

std::string label(const char* name, std::size_t i, std::size_t j) {
  return std::string(name) + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

KernelReport pfaffian_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp) {
  spec.validate();
  if (x.size() != xp.size() || x.empty()) throw Error(ErrorKind::ConfigError, "x and x' must have the same positive size");
  require_admissible(spec, xp);
  const int beta = spec.beta;
  const int sz = spec.N;
  const int p = beta == 1 ? 1 : 2;
  const int shift = beta == 1 ? 2 : 1;
  if (beta == 1 && sz % 2 != 0) throw Error(ErrorKind::ConfigError, "beta = 1 needs an even particle count");
  const std::size_t m = x.size();

  KernelReport rep;
  rep.beta = beta;
  rep.size = sz;
  rep.m = static_cast<int>(m);

  std::vector<DetFactor> lhs_f;
  for (std::size_t j = 0; j < m; ++j) {
    lhs_f.push_back({x[j], p});
    lhs_f.push_back({xp[j], -p});
  }
  const EnsembleAverage lhs = average(spec, sz, lhs_f);
  rep.lhs = lhs.mean;
  const double z = lhs.partition;
  rep.max_dimension = sz;

  SkewMatrix mat(static_cast<int>(2 * m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const EnsembleAverage e = average(spec, sz - shift, {{x[i], p}, {x[j], p}});
      const double ratio = e.partition / z;
      const cplx v = beta == 1 ? double((sz - 1) * sz) * (x[i] - x[j]) * ratio * e.mean
                               : double(sz) * (x[i] - x[j]) * ratio * e.mean;
      mat.set(static_cast<int>(i), static_cast<int>(j), v);
      rep.entries.push_back({label("M++", i, j), v});

      const EnsembleAverage d = average(spec, sz + shift, {{xp[i], -p}, {xp[j], -p}});
      const double dratio = d.partition / z;
      const cplx w = beta == 1 ? (xp[i] - xp[j]) / double((sz + 1) * (sz + 2)) * dratio * d.mean
                               : (xp[i] - xp[j]) / double(sz + 1) * dratio * d.mean;
      mat.set(static_cast<int>(m + i), static_cast<int>(m + j), w);
      rep.entries.push_back({label("M--", i, j), w});
      rep.max_dimension = std::max(rep.max_dimension, sz + shift);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const EnsembleAverage k = average(spec, sz, {{x[i], p}, {xp[j], -p}});
      const cplx v = k.mean / (x[i] - xp[j]);
      mat.set(static_cast<int>(i), static_cast<int>(m + j), v);
      rep.entries.push_back({label("M+-", i, j), v});
    }
  }
  rep.rhs = cross(x, xp) / (vandermonde(x) * vandermonde(xp)) * pfaffian(mat);
  rep.residual = std::abs(rep.lhs - rep.rhs) / std::abs(rep.lhs);
  return rep;
}

}  // namespace

cplx pfaffian_expansion(const SkewMatrix& a) {
  if (a.dimension() % 2 != 0) throw Error(ErrorKind::OddDimension, "Pfaffian of odd dimension");
  std::vector<int> idx(a.dimension());
  std::iota(idx.begin(), idx.end(), 0);
  return expand(a, idx);
}

KernelReport check_beta2_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp,
                                const std::vector<cplx>& xt, const std::vector<cplx>& xtp) {
  spec.validate();
  if (spec.beta != 2) throw Error(ErrorKind::ConfigError, "determinantal formula needs beta = 2");
  if (x.size() != xp.size() || xt.size() != xtp.size() || x.empty() || xt.empty()) {
    throw Error(ErrorKind::ConfigError, "point sets must pair up and be non-empty");
  }
  require_admissible(spec, xp);
  require_admissible(spec, xtp);
  const int n = spec.N;
  const std::size_t m1 = x.size(), m2 = xt.size();
  KernelReport rep;
  rep.beta = 2;
  rep.size = n;
  rep.m = static_cast<int>(m1);
  rep.max_dimension = n + 1;

  std::vector<DetFactor> lhs_f;
  for (std::size_t j = 0; j < m1; ++j) {
    lhs_f.push_back({x[j], 1});
    lhs_f.push_back({xp[j], -1});
  }
  for (std::size_t j = 0; j < m2; ++j) {
    lhs_f.push_back({xt[j], 1});
    lhs_f.push_back({xtp[j], -1});
  }
  const EnsembleAverage lhs = average(spec, n, lhs_f);
  rep.lhs = lhs.mean;
  const double z = lhs.partition;

  auto plus_plus = [&](cplx a, cplx b) {
    const EnsembleAverage e = average(spec, n - 1, {{a, 1}, {b, 1}});
    return double(n) * e.partition / z * e.mean;
  };
  auto minus_minus = [&](cplx a, cplx b) {
    const EnsembleAverage e = average(spec, n + 1, {{a, -1}, {b, -1}});
    return e.partition / (double(n + 1) * z) * e.mean;
  };
  auto ratio = [&](cplx num, cplx den) { return average(spec, n, {{num, 1}, {den, -1}}).mean; };

  if (m1 == 1 && m2 == 1) {
    // Written without the Cauchy denominators so that x = x' stays finite.
    const cplx mpp = plus_plus(x[0], xt[0]);
    const cplx mmm = minus_minus(xtp[0], xp[0]);
    const cplx k1 = ratio(x[0], xp[0]);
    const cplx k2 = ratio(xt[0], xtp[0]);
    rep.entries = {{"M++", mpp}, {"M--", mmm}, {"<x/x'>", k1}, {"<xt/xt'>", k2}};
    rep.rhs = (x[0] - xp[0]) * (xt[0] - xtp[0]) * mpp * mmm + k1 * k2;
  } else {
    const std::size_t size = m1 + m2;
    CMat mat(size, size);
    for (std::size_t i = 0; i < m1; ++i) {
      for (std::size_t j = 0; j < m2; ++j) mat(i, j) = plus_plus(x[i], xt[j]);
      for (std::size_t j = 0; j < m1; ++j) mat(i, m2 + j) = ratio(x[i], xp[j]) / (x[i] - xp[j]);
    }
    for (std::size_t i = 0; i < m2; ++i) {
      for (std::size_t j = 0; j < m2; ++j) mat(m1 + i, j) = ratio(xt[j], xtp[i]) / (xtp[i] - xt[j]);
      for (std::size_t j = 0; j < m1; ++j) mat(m1 + i, m2 + j) = minus_minus(xtp[i], xp[j]);
    }
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) rep.entries.push_back({label("M", i, j), mat(i, j)});
    }
    const long e = (static_cast<long>(size * size) + static_cast<long>(m2) - static_cast<long>(m1)) / 2;
    const double sign = e % 2 == 0 ? 1.0 : -1.0;
    const cplx pref = cross(x, xp) / (vandermonde(x) * vandermonde(xp)) * cross(xt, xtp) /
                      (vandermonde(xt) * vandermonde(xtp));
    rep.rhs = sign * pref * mat.determinant();
  }
  rep.residual = std::abs(rep.lhs - rep.rhs) / std::abs(rep.lhs);
  return rep;
}

KernelReport check_beta1_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp) {
  if (spec.beta != 1) throw Error(ErrorKind::ConfigError, "orthogonal formula needs beta = 1");
  return pfaffian_kernel(spec, x, xp);
}

KernelReport check_beta4_kernel(const EnsembleSpec& spec, const std::vector<cplx>& x, const std::vector<cplx>& xp) {
  if (spec.beta != 4) throw Error(ErrorKind::ConfigError, "symplectic formula needs beta = 4");
  return pfaffian_kernel(spec, x, xp);
}

std::vector<cplx> sample_kernel_points(const EnsembleSpec& spec, int count, std::mt19937_64& rng) {
  const double lo = spec.intervals.front().lo, hi = spec.intervals.back().hi;
  const double width = hi - lo;
  std::uniform_real_distribution<double> re(lo - 0.2 * width, hi + 0.2 * width), im(0.3, 1.0), coin(0.0, 1.0);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < count) {
    const cplx z{re(rng), (coin(rng) < 0.5 ? 1.0 : -1.0) * im(rng)};
    const bool far = std::all_of(out.begin(), out.end(), [&](cplx w) { return std::abs(w - z) > 0.2; });
    if (far) out.push_back(z);
  }
  return out;
}

double default_kernel_tolerance(int beta, int m) {
  if (m == 1) return beta == 2 ? 1e-8 : 1e-12;
  return beta == 2 ? 1e-8 : 1e-6;
}

FiniteNRun run_finite_n(const FiniteNOptions& opts) {
  if (opts.m < 1 || opts.m > 2) throw Error(ErrorKind::ConfigError, "m must be 1 or 2");
  if (opts.samples < 1) throw Error(ErrorKind::ConfigError, "samples must be positive");
  FiniteNRun run;
  run.options = opts;
  const int particles = opts.beta == 1 ? 2 * opts.N : opts.N;
  run.spec = default_ensemble(opts.beta, particles);
  run.spec.validate();
  run.tol = opts.tol > 0.0 ? opts.tol : default_kernel_tolerance(opts.beta, opts.m);
  const std::size_t m = static_cast<std::size_t>(opts.m);
  for (int s = 0; s < opts.samples; ++s) {
    auto rng = sample_rng(opts.seed, static_cast<std::uint64_t>(s));
    const int count = opts.beta == 2 ? static_cast<int>(4 * m) : static_cast<int>(2 * m);
    const std::vector<cplx> pts = sample_kernel_points(run.spec, count, rng);
    auto part = [&](std::size_t k) { return std::vector<cplx>(pts.begin() + k * m, pts.begin() + (k + 1) * m); };
    KernelReport rep = opts.beta == 2   ? check_beta2_kernel(run.spec, part(0), part(1), part(2), part(3))
                       : opts.beta == 1 ? check_beta1_kernel(run.spec, part(0), part(1))
                                        : check_beta4_kernel(run.spec, part(0), part(1));
    run.max_residual = std::max(run.max_residual, rep.residual);
    run.points.push_back(pts);
    run.reports.push_back(std::move(rep));
  }
  return run;
}

std::string finite_n_to_json(const FiniteNRun& run) {
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["beta"] = run.options.beta;
  doc["N"] = run.options.N;
  doc["particles"] = run.spec.N;
  doc["m"] = run.options.m;
  doc["seed"] = run.options.seed;
  doc["tol"] = run.tol;
  auto intervals = nlohmann::json::array();
  for (const auto& iv : run.spec.intervals) intervals.push_back({iv.lo, iv.hi});
  doc["intervals"] = intervals;
  doc["V_coeffs"] = std::vector<double>(run.spec.v_coeffs.data(), run.spec.v_coeffs.data() + run.spec.v_coeffs.size());
  auto samples = nlohmann::json::array();
  for (std::size_t i = 0; i < run.reports.size(); ++i) {
    const KernelReport& r = run.reports[i];
    nlohmann::json s;
    s["index"] = i;
    auto pts = nlohmann::json::array();
    for (const auto& p : run.points[i]) pts.push_back(complex_json(p));
    s["points"] = pts;
    nlohmann::json entries;
    for (const auto& e : r.entries) entries[e.name] = complex_json(e.value);
    s["entries"] = entries;
    s["lhs"] = complex_json(r.lhs);
    s["rhs"] = complex_json(r.rhs);
    s["residual"] = r.residual;
    s["max_dimension"] = r.max_dimension;
    samples.push_back(s);
  }
  doc["samples"] = samples;
  doc["max_residual"] = run.max_residual;
  doc["passed"] = run.passed();
  return doc.dump(2);
}

}  // namespace hypfay
