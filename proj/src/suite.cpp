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

#include "hypfay/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hypfay/equilibrium.hpp"
#include "hypfay/finite_n.hpp"
#include "hypfay/identities.hpp"
#include "hypfay/periods.hpp"
#include "hypfay/report.hpp"

namespace hypfay {

double ThetaSelftest::max_residual() const {
  double m = 0.0;
  for (const auto& [name, v] : residuals) m = std::max(m, v);
  return m;
}

CMat random_riemann_matrix(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  RMat a(g, g), x(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) a(i, j) = u(rng);
  }
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j) x(i, j) = x(j, i) = u(rng);
  }
  const RMat y = a.transpose() * a + 0.5 * RMat::Identity(g, g);
  return x.cast<cplx>() + kI * y.cast<cplx>();
}

namespace {

CVec random_vector(int g, std::mt19937_64& rng, double size) {
  std::uniform_real_distribution<double> u(-size, size);
  CVec z(g);
  for (int i = 0; i < g; ++i) z(i) = cplx(u(rng), u(rng));
  return z;
}

Characteristic random_characteristic(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Characteristic c = Characteristic::zero(g);
  for (int i = 0; i < g; ++i) {
    c.mu(i) = u(rng);
    c.nu(i) = u(rng) - 0.5;
  }
  return c;
}

double vec_rel(const CVec& a, const CVec& b, double floor) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(floor, b.cwiseAbs().maxCoeff());
}

}  // namespace

ThetaSelftest theta_selftest(int g, std::uint64_t seed, int samples) {
  if (g < 1 || g > 3) throw Error(ErrorKind::ConfigError, "theta self-test supports g = 1..3");
  ThetaSelftest out;
  out.genus = g;
  out.samples = samples;
  auto record = [&](const std::string& name, double v) {
    double& slot = out.residuals[name];
    slot = std::max(slot, v);
  };
  const Characteristic zero = Characteristic::zero(g);
  for (int s = 0; s < samples; ++s) {
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(s));
    const CMat tau = random_riemann_matrix(g, rng);
    const ThetaContext ctx(tau);
    const ThetaContext half(CMat(0.5 * tau));
    std::uniform_int_distribution<int> shift(-2, 2), bit(0, 1);

    const Characteristic c = random_characteristic(g, rng);
    const CVec z = random_vector(g, rng, 0.5);
    Eigen::VectorXd m(g), n(g);
    for (int i = 0; i < g; ++i) {
      m(i) = shift(rng);
      n(i) = shift(rng);
    }
    const CVec mc = m.cast<cplx>(), nc = n.cast<cplx>();
    const cplx factor = std::exp(2.0 * kI * kPi * bilinear(mc, c.mu.cast<cplx>()) -
                                 kI * kPi * bilinear(nc, tau * nc + 2.0 * z + 2.0 * c.nu.cast<cplx>()));
    record("quasi_periodicity", rel_diff(ctx.value(c, z + mc + tau * nc), factor * ctx.value(c, z)));
    record("evenness", rel_diff(ctx.value(zero, -z), ctx.value(zero, z)));

    std::vector<int> e(g), ep(g);
    int dot = 0;
    do {
      dot = 0;
      for (int i = 0; i < g; ++i) {
        e[i] = bit(rng);
        ep[i] = bit(rng);
        dot += e[i] * ep[i];
      }
    } while (dot % 2 == 0);
    CVec half_point(g);
    for (int i = 0; i < g; ++i) half_point(i) = 0.5 * e[i];
    half_point += 0.5 * tau * Eigen::Map<Eigen::VectorXi>(ep.data(), g).cast<cplx>();
    const double nearby = std::abs(ctx.value(zero, half_point + CVec::Constant(g, 0.1)));
    record("odd_vanishing", std::abs(ctx.value(zero, half_point)) / std::max(nearby, 1e-300));
    record("odd_characteristic", std::abs(ctx.value(Characteristic::half(e, ep), CVec::Zero(g))) /
                                     std::abs(ctx.value(zero, CVec::Zero(g))));

    // Richardson-extrapolated central differences
    const CVec grad = ctx.gradient(c, z);
    CVec fd(g);
    for (int i = 0; i < g; ++i) {
      auto central = [&](double h) {
        CVec dz = CVec::Zero(g);
        dz(i) = h;
        return (ctx.value(c, z + dz) - ctx.value(c, z - dz)) / (2.0 * h);
      };
      fd(i) = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
    }
    record("gradient_fd", vec_rel(fd, grad, std::abs(ctx.value(c, z))));
    const CMat hess = ctx.hessian(c, z);
    record("hessian_symmetry", (hess - hess.transpose()).cwiseAbs().maxCoeff() / std::max(1e-300, hess.cwiseAbs().maxCoeff()));
    record("even_gradient", ctx.gradient(zero, CVec::Zero(g)).cwiseAbs().maxCoeff() /
                                std::abs(ctx.value(zero, CVec::Zero(g))));
    record("truncation", rel_diff(ctx.with_radius(2.0 * ctx.radius()).value(c, z), ctx.value(c, z)));

    const Characteristic c2 = random_characteristic(g, rng);
    record("binary_addition",
           binary_addition_check(half, ctx, c, c2, random_vector(g, rng, 0.4), random_vector(g, rng, 0.4)));

    for (int attempt = 0; attempt < 5; ++attempt) {
      try {
        const ModularRelation rel(tau, c, random_vector(g, rng, 0.3));
        record("modular", rel.residual(random_vector(g, rng, 0.3)));
        break;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::DegenerateProbe) throw;
      }
    }
  }
  return out;
}

cplx elliptic_tau(const Curve& curve) {
  if (curve.genus() != 1 || !curve.is_real()) throw Error(ErrorKind::InvalidCurve, "needs four real branch points");
  std::vector<double> e;
  for (const auto& p : curve.branch_points()) e.push_back(p.real());
  std::sort(e.begin(), e.end());
  const double k2 = (e[1] - e[0]) * (e[3] - e[2]) / ((e[2] - e[0]) * (e[3] - e[1]));
  auto agm = [](double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
      const double an = 0.5 * (a + b);
      b = std::sqrt(a * b);
      a = an;
    }
    return 0.5 * (a + b);
  };
  return kI * (agm(1.0, std::sqrt(1.0 - k2)) / agm(1.0, std::sqrt(k2)));
}

std::vector<Curve> genus1_curves() {
  return {Curve::real({-2, -1, 1, 2}), Curve::real({-3, -1, 0.5, 2}), Curve::real({-1.5, -0.2, 0.3, 2.2})};
}

std::vector<Curve> genus2_curves() {
  return {Curve::real({-3, -1.5, -1, 0.5, 1, 2.5}), Curve::real({-2, -1.2, -0.5, 1, 1.5, 3})};
}

Curve complex_perturbation(const Curve& curve, std::uint64_t seed) {
  auto rng = sample_rng(seed, 0x9e3779b9);
  std::uniform_real_distribution<double> radius(0.0, 0.05), angle(0.0, 2.0 * kPi);
  std::vector<cplx> pts;
  for (const auto& e : curve.branch_points()) pts.push_back(e + curve.scale() * radius(rng) * std::exp(kI * angle(rng)));
  return Curve::complex(pts);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Builder {
  CriterionResult r;
  std::vector<bool> gates;

  void metric(const std::string& name, double v) { r.metrics.emplace_back(name, v); }
  // Records the metric and requires v < limit.
  void gate(const std::string& name, double v, double limit) {
    metric(name, v);
    gates.push_back(v < limit);
  }
  void require(bool ok) { gates.push_back(ok); }
  bool all() const { return std::all_of(gates.begin(), gates.end(), [](bool b) { return b; }); }
};

double identity_sweep(IdentityKind kind, const std::vector<Curve>& curves, const SuiteOptions& opts, int samples,
                      std::map<std::string, double>& checks) {
  double worst = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const IdentityContext ctx(std::make_shared<Surface>(curves[i]));
    SamplingOptions so;
    so.samples = samples;
    so.seed = opts.seed + 101 * i;
    so.random_characteristic = true;
    so.random_signs = true;
    const IdentityReport rep = run_identity(kind, ctx, so);
    worst = std::max(worst, rep.max_residual);
    for (const auto& [name, v] : rep.max_checks) checks[name] = std::max(checks[name], v);
  }
  return worst;
}

std::vector<Curve> all_sampling_curves() {
  std::vector<Curve> c = genus1_curves();
  for (auto& x : genus2_curves()) c.push_back(x);
  return c;
}

void criterion_periods(Builder& b) {
  const Curve curve = Curve::real({-2, -1, 1, 2});
  const PeriodData pd = compute_periods(curve);
  const cplx oracle = elliptic_tau(curve);
  b.gate("tau_error", std::abs(pd.tau(0, 0) - oracle), 1e-9);
  b.gate("re_tau", std::abs(pd.tau(0, 0).real()), 1e-10);
  b.gate("symmetry", (pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  b.require(pd.tau(0, 0).imag() > 0.0);
  b.metric("im_tau", pd.tau(0, 0).imag());
}

void criterion_theta(Builder& b, const SuiteOptions& opts) {
  for (int g : {1, 2}) {
    const ThetaSelftest t = theta_selftest(g, opts.seed + g, 100);
    for (const auto& [name, v] : t.residuals) b.gate("g" + std::to_string(g) + "_" + name, v, 1e-8);
  }
}

void criterion_fay(Builder& b, const SuiteOptions& opts) {
  std::map<std::string, double> checks;
  b.gate("fay_residual", identity_sweep(IdentityKind::Fay, all_sampling_curves(), opts, 50, checks), 1e-7);
}

void criterion_beta2(Builder& b, const SuiteOptions& opts) {
  std::map<std::string, double> checks;
  const auto curves = all_sampling_curves();
  b.gate("beta2_real", identity_sweep(IdentityKind::Beta2, curves, opts, 50, checks), 1e-7);
  std::vector<Curve> perturbed;
  for (std::size_t i = 0; i < curves.size(); ++i) perturbed.push_back(complex_perturbation(curves[i], opts.seed + i));
  b.gate("beta2_complex", identity_sweep(IdentityKind::Beta2, perturbed, opts, 50, checks), 1e-7);
  std::map<std::string, double> sub;
  b.gate("fay_from_beta2", identity_sweep(IdentityKind::FayFromBeta2, curves, opts, 50, sub), 1e-7);
  for (const auto& [name, v] : sub) b.gate(name, v, 1e-7);
}

void criterion_beta1(Builder& b, const SuiteOptions& opts) {
  std::map<std::string, double> checks;
  const auto curves = all_sampling_curves();
  b.gate("beta1", identity_sweep(IdentityKind::Beta1, curves, opts, 50, checks), 1e-7);
  b.gate("beta1_equiv", identity_sweep(IdentityKind::Beta1Equiv, curves, opts, 50, checks), 1e-7);
  b.gate("reassembly", checks["reassembly"], 1e-8);
}

void criterion_beta4(Builder& b, const SuiteOptions& opts) {
  std::map<std::string, double> checks;
  b.gate("beta4", identity_sweep(IdentityKind::Beta4, all_sampling_curves(), opts, 50, checks), 1e-7);
  b.gate("modular", checks["modular"], 1e-6);
}

void criterion_energy(Builder& b) {
  const Curve g0 = Curve::real({-2, 2});
  const Curve g1 = Curve::real({-2, -1, 1, 2});
  const EquilibriumData eq0 = solve_equilibrium(g0);
  const Functionals fn0(eq0, nullptr, 2.0);
  const EnergyFormulaReport r0 = check_energy_formula(eq0, fn0, nullptr, 2.0, false);
  auto surface = std::make_shared<Surface>(g1);
  const EquilibriumData eq1 = solve_equilibrium(g1);
  const Functionals fn1(eq1, surface, 2.0);
  const EnergyFormulaReport r1 = check_energy_formula(eq1, fn1, surface.get(), 2.0, true);
  b.gate("g0_residual", r0.residual, 1e-6);
  b.gate("g1_residual", r1.residual, 1e-6);
  b.gate("im_rhs", std::max(r0.im_rhs, r1.im_rhs), 1e-9);
  b.metric("g1_energy", -r1.lhs);
  b.metric("g1_scaled_shift", r1.scaled_residual_shift);
  b.metric("predicted_shift", r1.predicted_shift);
  const bool scale_defect = std::abs(r1.scaled_residual_shift - r1.predicted_shift) < 1e-6 &&
                            std::abs(r1.predicted_shift) > 0.1;
  if (!b.all() && r0.residual < 1e-6 && r0.im_rhs < 1e-9 && r1.im_rhs < 1e-9 && scale_defect) {
    b.r.known_failure = true;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "right-hand side is scale invariant but the energy shifts by -(beta/2) ln(lambda): residual "
                  "moves by %.6f under x -> 2x (predicted %.6f); genus-0 case passes",
                  r1.scaled_residual_shift, r1.predicted_shift);
    b.r.note = buf;
  }
}

void criterion_lemma(Builder& b, const SuiteOptions& opts) {
  std::vector<Curve> curves = {Curve::real({-2, -1, 1, 2})};
  for (auto& c : genus2_curves()) curves.push_back(c);
  double line[4] = {0, 0, 0, 0}, simp = 0.0, uv = 0.0, fit = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    auto surface = std::make_shared<Surface>(curves[i]);
    const EquilibriumData eq = solve_equilibrium(curves[i]);
    const Functionals fn(eq, surface, 2.0);
    const LogFunctionalReport lr = check_log_functionals(eq, fn, *surface, 10, opts.seed + i);
    line[0] = std::max(line[0], lr.line1);
    line[1] = std::max(line[1], lr.line2);
    line[2] = std::max(line[2], lr.line3);
    line[3] = std::max(line[3], lr.line4);
    simp = std::max(simp, lr.simplification);
    uv = std::max(uv, check_u_of_v(eq, fn, *surface));
    fit = std::max(fit, fn.bidifferential_fit());
  }
  for (int k = 0; k < 4; ++k) b.gate("line" + std::to_string(k + 1), line[k], 1e-8);
  b.gate("simplification", simp, 1e-8);
  b.gate("u_of_v", uv, 1e-8);
  b.metric("bidifferential_fit", fit);
}

void criterion_weierstrass(Builder& b) {
  std::vector<Curve> curves = {Curve::real({-2, -1, 1, 2}), Curve::real({-3, -1, 0.5, 2})};
  for (auto& c : genus2_curves()) curves.push_back(c);
  double closed_vs_direct = 0.0, dual = 0.0, direct = 0.0, at_two = 0.0, imag = 0.0, graded = 0.0;
  for (const Curve& curve : curves) {
    const Surface surface(curve);
    for (int j = 0; j < 2 * curve.genus() + 2; ++j) {
      closed_vs_direct = std::max(closed_vs_direct,
                                  (surface.abel_weierstrass(j) - surface.abel_branch_direct(j)).cwiseAbs().maxCoeff());
    }
    const EquilibriumData eq = solve_equilibrium(curve);
    for (double beta : {1.0, 4.0}) {
      const VeqReport v = compute_v_eq(eq, surface, beta);
      dual = std::max(dual, (v.closed_form - v.sum_route).cwiseAbs().maxCoeff());
      direct = std::max(direct, (v.closed_form - v.direct).cwiseAbs().maxCoeff());
      graded = std::max(graded, (v.graded_form - v.direct).cwiseAbs().maxCoeff());
    }
    const VeqReport v2 = compute_v_eq(eq, surface, 2.0);
    at_two = std::max({at_two, v2.closed_form.cwiseAbs().maxCoeff(), v2.sum_route.cwiseAbs().maxCoeff(),
                       v2.direct.cwiseAbs().maxCoeff()});
    imag = std::max(imag, v2.imag_part);
  }
  b.gate("weierstrass_closed_vs_direct", closed_vs_direct, 1e-8);
  b.gate("v_eq_dual_route", dual, 1e-9);
  b.gate("v_eq_direct_route", direct, 1e-6);
  b.metric("v_eq_graded_weight_vs_direct", graded);
  b.metric("v_eq_beta2", at_two);
  b.require(at_two == 0.0 && imag == 0.0);
}

void criterion_construction(Builder& b) {
  std::vector<Curve> curves = {Curve::real({-2, 2})};
  for (auto& c : genus1_curves()) curves.push_back(c);
  for (auto& c : genus2_curves()) curves.push_back(c);
  ConstructionReport worst;
  double fallback = 0.0;
  for (const Curve& curve : curves) {
    const EquilibriumData eq = solve_equilibrium(curve);
    std::unique_ptr<Surface> surface = curve.genus() > 0 ? std::make_unique<Surface>(curve) : nullptr;
    const ConstructionReport r = check_construction(eq, surface.get());
    worst.gap_residual = std::max(worst.gap_residual, r.gap_residual);
    worst.mass_error = std::max(worst.mass_error, r.mass_error);
    worst.potential_spread = std::max(worst.potential_spread, r.potential_spread);
    worst.loop_equation = std::max(worst.loop_equation, r.loop_equation);
    worst.p_fit_error = std::max(worst.p_fit_error, r.p_fit_error);
    worst.boutroux_a = std::max(worst.boutroux_a, r.boutroux_a);
    worst.boutroux_b = std::max(worst.boutroux_b, r.boutroux_b);
    worst.decomposition = std::max(worst.decomposition, r.decomposition);
    worst.min_density = curve.genus() == 0 ? r.min_density : std::min(worst.min_density, r.min_density);
    if (eq.sweep_fallback) fallback = 1.0;
  }
  b.gate("gap_integrals", worst.gap_residual, 1e-11);
  b.gate("mass_error", worst.mass_error, 1e-10);
  b.gate("potential_spread", worst.potential_spread, 1e-7);
  b.gate("loop_equation", worst.loop_equation, 1e-9);
  b.gate("boutroux", std::max(worst.boutroux_a, worst.boutroux_b), 1e-10);
  b.metric("p_fit_error", worst.p_fit_error);
  b.metric("phi_decomposition", worst.decomposition);
  b.metric("sweep_fallback", fallback);
  b.require(worst.min_density > 0.0);
}

cplx pfaffian_by_permutations(const SkewMatrix& a) {
  const int n = a.dimension();
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  cplx acc{};
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j];
    }
    cplx term = inversions % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; i += 2) term *= a(p[i], p[i + 1]);
    acc += term;
  } while (std::next_permutation(p.begin(), p.end()));
  double norm = 1.0;
  for (int k = 1; k <= n / 2; ++k) norm *= 2.0 * k;
  return acc / norm;
}

void criterion_finite_n(Builder& b, const SuiteOptions& opts) {
  struct Cell {
    int beta, N, m;
  };
  const std::vector<Cell> cells = {{2, 1, 1}, {2, 2, 1}, {2, 1, 2}, {4, 1, 1}, {4, 2, 1},
                                   {4, 1, 2}, {4, 2, 2}, {1, 1, 1}, {1, 1, 2}};
  for (const Cell& c : cells) {
    FiniteNOptions fo;
    fo.beta = c.beta;
    fo.N = c.N;
    fo.m = c.m;
    fo.seed = opts.seed;
    fo.samples = 3;
    const FiniteNRun run = run_finite_n(fo);
    b.gate("beta" + std::to_string(c.beta) + "_N" + std::to_string(c.N) + "_m" + std::to_string(c.m),
           run.max_residual, run.tol);
  }
  auto rng = sample_rng(opts.seed, 77);
  std::normal_distribution<double> nd;
  double definitional = 0.0, expansion = 0.0;
  for (int n = 2; n <= 8; n += 2) {
    for (int trial = 0; trial < 5; ++trial) {
      SkewMatrix a(n);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) a.set(i, j, cplx(nd(rng), nd(rng)));
      }
      const cplx pf = pfaffian(a);
      if (n <= 6) definitional = std::max(definitional, rel_diff(pf, pfaffian_by_permutations(a)));
      expansion = std::max(expansion, rel_diff(pf, pfaffian_expansion(a)));
    }
  }
  b.gate("pfaffian_vs_definition", definitional, 1e-12);
  b.gate("pfaffian_vs_expansion", expansion, 1e-12);
}

const char* criterion_name(int id) {
  switch (id) {
    case 1: return "period matrix, genus 1";
    case 2: return "theta self-tests";
    case 3: return "trisecant identity";
    case 4: return "beta = 2 identity";
    case 5: return "beta = 1 identity and equivalent form";
    case 6: return "beta = 4 identity and modular cross-check";
    case 7: return "energy formula";
    case 8: return "log-functional identities";
    case 9: return "Weierstrass Abel values and v_eq";
    case 10: return "equilibrium construction";
    case 11: return "finite-N kernel formulas";
  }
  return "unknown";
}

double runtime_limit(int id) {
  switch (id) {
    case 1: return 5.0;
    case 2: return 30.0;
    case 3: return 300.0;
    case 11: return 600.0;
  }
  return 0.0;
}

}  // namespace

CriterionResult run_criterion(int id, const SuiteOptions& opts) {
  if (id < 1 || id > kCriteria) throw Error(ErrorKind::ConfigError, "criterion id out of range");
  Builder b;
  b.r.id = id;
  b.r.name = criterion_name(id);
  const auto t0 = Clock::now();
  try {
    switch (id) {
      case 1: criterion_periods(b); break;
      case 2: criterion_theta(b, opts); break;
      case 3: criterion_fay(b, opts); break;
      case 4: criterion_beta2(b, opts); break;
      case 5: criterion_beta1(b, opts); break;
      case 6: criterion_beta4(b, opts); break;
      case 7: criterion_energy(b); break;
      case 8: criterion_lemma(b, opts); break;
      case 9: criterion_weierstrass(b); break;
      case 10: criterion_construction(b); break;
      case 11: criterion_finite_n(b, opts); break;
    }
  } catch (const std::exception& e) {
    b.require(false);
    b.r.known_failure = false;
    b.r.note = std::string("error: ") + e.what();
  }
  b.r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (const double limit = runtime_limit(id); limit > 0.0) b.gate("seconds", b.r.seconds, limit);
  b.r.passed = b.all();
  if (b.r.passed) b.r.known_failure = false;
  return b.r;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    out.push_back(run_criterion(id, opts));
  }
  return out;
}

bool suite_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed || r.known_failure; });
}

std::string status_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << " (" << r.name << "): ";
  if (r.passed) {
    os << "PASS";
  } else if (r.known_failure) {
    os << "FAIL (known: " << r.note << ")";
  } else {
    os << "FAIL";
    if (!r.note.empty()) os << " (" << r.note << ")";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, " [%.1f s]", r.seconds);
  os << buf;
  return os.str();
}

std::string suite_table(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << status_line(r) << '\n';
    for (const auto& [name, v] : r.metrics) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "    %-32s %.3e\n", name.c_str(), v);
      os << buf;
    }
  }
  return os.str();
}

std::string suite_to_json(const std::vector<CriterionResult>& results, const SuiteOptions& opts) {
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["seed"] = opts.seed;
  auto arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["passed"] = r.passed;
    j["known_failure"] = r.known_failure;
    if (!r.note.empty()) j["note"] = r.note;
    // timings stay out of the report so that reruns are bit-identical
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [name, v] : r.metrics) {
      if (name != "seconds") m[name] = v;
    }
    j["metrics"] = m;
    arr.push_back(j);
  }
  doc["criteria"] = arr;
  doc["passed"] = suite_passed(results);
  return doc.dump(2);
}

}  // namespace hypfay
