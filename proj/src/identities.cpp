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

#include "hypfay/identities.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "hypfay/report.hpp"

namespace hypfay {

std::string_view to_string(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::Fay: return "fay";
    case IdentityKind::Beta2: return "beta2";
    case IdentityKind::Beta1: return "beta1";
    case IdentityKind::Beta1Equiv: return "beta1-equiv";
    case IdentityKind::Beta4: return "beta4";
    case IdentityKind::FayFromBeta2: return "fay-from-beta2";
  }
  return "unknown";
}

std::optional<IdentityKind> identity_from_string(std::string_view name) {
  for (auto k : {IdentityKind::Fay, IdentityKind::Beta2, IdentityKind::Beta1, IdentityKind::Beta1Equiv,
                 IdentityKind::Beta4, IdentityKind::FayFromBeta2}) {
    if (to_string(k) == name) return k;
  }
  if (name == "beta1_equiv") return IdentityKind::Beta1Equiv;
  return std::nullopt;
}

IdentityContext::IdentityContext(std::shared_ptr<const Surface> surface)
    : surface_(std::move(surface)),
      half_(CMat(0.5 * surface_->periods().tau)),
      double_(CMat(2.0 * surface_->periods().tau)) {}

namespace {

double max_abs(const std::vector<NamedValue>& terms) {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t.value));
  return std::max(m, 1e-300);
}

IdentityEvaluation finish(std::vector<NamedValue> terms, const std::vector<double>& signs) {
  IdentityEvaluation out;
  cplx sum{};
  for (std::size_t i = 0; i < terms.size(); ++i) sum += signs[i] * terms[i].value;
  const double scale = max_abs(terms);
  if (scale == 0.0) throw Error(ErrorKind::DegenerateConfiguration, "every term of the identity vanishes");
  out.residual = std::abs(sum) / scale;
  out.terms = std::move(terms);
  return out;
}

cplx X(const CoverPoint& p) { return p.point.X(); }

void require_distinct(const Surface& s, const PointQuad& p) {
  const double tol = 1e-6 * s.curve().scale();
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (p[i].point.sheet == p[j].point.sheet && std::abs(X(p[i]) - X(p[j])) < tol) {
        throw Error(ErrorKind::DegenerateConfiguration, "two identity points coincide");
      }
    }
  }
}

// Coefficients of the four theta products shared by the beta = 1 and beta = 4
// identities, in the order L, A, B, R (R without the constant).
struct PfaffianCoefficients {
  cplx l, a, b, r;
};

PfaffianCoefficients pfaffian_coefficients(const Surface& s, const PointQuad& p) {
  const auto& [z1, z1p, z2, z2p] = p;
  auto e2 = [&](const CoverPoint& a, const CoverPoint& b) { return s.prime_form_squared(a, b); };
  const cplx x1 = X(z1), x1p = X(z1p), x2 = X(z2), x2p = X(z2p);
  PfaffianCoefficients c;
  c.l = e2(z1, z2) * e2(z1p, z2p) / (e2(z1, z1p) * e2(z1, z2p) * e2(z2, z1p) * e2(z2, z2p));
  c.a = (x1 - x2) * (x1p - x2p) / ((x1 - x1p) * (x2 - x2p)) / (e2(z1, z2p) * e2(z1p, z2));
  c.b = (x1 - x2) * (x1p - x2p) / ((x1 - x2p) * (x2 - x1p)) / (e2(z1, z1p) * e2(z2p, z2));
  const cplx eta = s.eta(z1) * s.eta(z2) * s.eta(z1p) * s.eta(z2p);
  c.r = e2(z1, z2) * e2(z1p, z2p) * eta * eta / ((x1 - x1p) * (x1 - x2p) * (x2 - x1p) * (x2 - x2p));
  return c;
}

// Theta arguments of the four products, in the order L, A, B, R.
std::array<std::pair<CVec, CVec>, 4> pfaffian_arguments(const Surface& s, const PointQuad& p) {
  const CVec& u1 = p[0].u;
  const CVec& u1p = p[1].u;
  const CVec& u2 = p[2].u;
  const CVec& u2p = p[3].u;
  const CVec& ui = s.u_inf();
  return {{{u1 - u1p + u2 - u2p, CVec::Zero(s.genus())},
           {u1 - u2p, u2 - u1p},
           {u1 - u1p, u2 - u2p},
           {u1 + u2 - ui, -u1p - u2p + ui}}};
}

template <class Theta>
IdentityEvaluation pfaffian_identity(const IdentityContext& ctx, const PointQuad& p, Theta&& theta) {
  const Surface& s = ctx.surface();
  require_distinct(s, p);
  const auto c = pfaffian_coefficients(s, p);
  const auto args = pfaffian_arguments(s, p);
  const cplx k = ctx.eta_constant();
  std::vector<NamedValue> terms{
      {"L", c.l * theta(args[0].first) * theta(args[0].second)},
      {"A", c.a * theta(args[1].first) * theta(args[1].second)},
      {"B", c.b * theta(args[2].first) * theta(args[2].second)},
      {"K2R", k * k * c.r * theta(args[3].first) * theta(args[3].second)},
  };
  return finish(std::move(terms), {1.0, -1.0, 1.0, -1.0});
}

}  // namespace

IdentityEvaluation eval_fay(const IdentityContext& ctx, const PointQuad& z, const CVec& v) {
  const Surface& s = ctx.surface();
  const Characteristic zero = Characteristic::zero(s.genus());
  auto th = [&](const CVec& w) { return ctx.tau().value(zero, w); };
  auto odd = [&](const CVec& w) { return s.theta_odd(w); };
  const CVec &u1 = z[0].u, &u2 = z[1].u, &u3 = z[2].u, &u4 = z[3].u;
  std::vector<NamedValue> terms{
      {"t1", th(v) * odd(u1 - u3) * odd(u2 - u4) * th(v + u1 - u2 + u3 - u4)},
      {"t2", odd(u1 - u4) * odd(u3 - u2) * th(v + u1 - u2) * th(v + u3 - u4)},
      {"t3", odd(u1 - u2) * odd(u3 - u4) * th(v + u1 - u4) * th(v + u3 - u2)},
  };
  return finish(std::move(terms), {1.0, 1.0, -1.0});
}

namespace {

struct Beta2Parts {
  cplx t1, t2, rhs;
};

Beta2Parts beta2_parts(const IdentityContext& ctx, const CoverPoint& z, const CoverPoint& zp,
                       const CoverPoint& w, const CoverPoint& wp, const Characteristic& c,
                       const CVec& shift, HalfFormRegistry& reg) {
  const Surface& s = ctx.surface();
  auto th = [&](const CVec& v) { return ctx.tau().value(c, v + shift); };
  auto e = [&](const CoverPoint& a, const CoverPoint& b) { return s.prime_form(a, b, reg); };
  const CVec& ui = s.u_inf();
  Beta2Parts out;
  out.t1 = (X(w) - X(zp)) * (X(z) - X(wp)) * e(z, w) * e(zp, wp) / (e(w, zp) * e(z, wp)) *
           th(z.u - zp.u + w.u - wp.u) / (e(z, zp) * e(w, wp)) * th(CVec::Zero(s.genus()));
  out.t2 = (X(z) - X(w)) * (X(zp) - X(wp)) * th(z.u - zp.u) / e(z, zp) * th(w.u - wp.u) / e(w, wp);
  out.rhs = e(z, w) * e(zp, wp) * s.eta(z) * s.eta(zp) * s.eta(w) * s.eta(wp) * th(z.u + w.u - ui) *
            th(-zp.u - wp.u + ui);
  return out;
}

}  // namespace

IdentityEvaluation eval_beta2(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c,
                              const CVec& shift, HalfFormRegistry& reg) {
  require_distinct(ctx.surface(), p);
  const auto parts = beta2_parts(ctx, p[0], p[1], p[2], p[3], c, shift, reg);
  std::vector<NamedValue> terms{{"T1", parts.t1}, {"T2", parts.t2}, {"KR", ctx.eta_constant() * parts.rhs}};
  return finish(std::move(terms), {1.0, -1.0, -1.0});
}

IdentityEvaluation eval_beta1(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c) {
  return pfaffian_identity(ctx, p, [&](const CVec& v) { return ctx.half_tau().value(c, v); });
}

IdentityEvaluation eval_beta4(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c) {
  return pfaffian_identity(ctx, p, [&](const CVec& v) { return ctx.double_tau().value(c, 2.0 * v); });
}

namespace {

std::array<CVec, 4> equiv_arguments(const Surface& s, const PointQuad& p) {
  const CVec& u1 = p[0].u;
  const CVec& u1p = p[1].u;
  const CVec& u2 = p[2].u;
  const CVec& u2p = p[3].u;
  return {u1 - u1p + u2 - u2p, u1 + u1p - u2 - u2p, u1 - u1p - u2 + u2p, u1 + u1p + u2 + u2p - 2.0 * s.u_inf()};
}

std::vector<NamedValue> equiv_terms(const IdentityContext& ctx, const PfaffianCoefficients& c,
                                    const std::array<CVec, 4>& w, const RVec& alpha) {
  const Characteristic ch{0.5 * alpha, RVec::Zero(alpha.size())};
  auto th = [&](const CVec& v) { return ctx.tau().value(ch, v); };
  const cplx k = ctx.eta_constant();
  return {{"c1", -c.l * th(w[0])}, {"c2", c.a * th(w[1])}, {"c3", -c.b * th(w[2])}, {"c4", k * k * c.r * th(w[3])}};
}

}  // namespace

IdentityEvaluation eval_beta1_equiv(const IdentityContext& ctx, const PointQuad& p, const RVec& alpha) {
  const Surface& s = ctx.surface();
  require_distinct(s, p);
  auto terms = equiv_terms(ctx, pfaffian_coefficients(s, p), equiv_arguments(s, p), alpha);
  return finish(std::move(terms), {1.0, 1.0, 1.0, 1.0});
}

double beta1_reassembly(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c) {
  const Surface& s = ctx.surface();
  const IdentityEvaluation direct = eval_beta1(ctx, p, c);
  const cplx lhs = -direct.terms[0].value + direct.terms[1].value - direct.terms[2].value + direct.terms[3].value;
  const auto coeffs = pfaffian_coefficients(s, p);
  const auto w = equiv_arguments(s, p);
  cplx rhs{};
  for (const RVec& alpha : half_periods(s.genus())) {
    const Characteristic outer{c.mu + 0.5 * alpha, 2.0 * c.nu};
    cplx bracket{};
    for (const auto& t : equiv_terms(ctx, coeffs, w, alpha)) bracket += t.value;
    rhs += ctx.tau().value(outer, w[0]) * bracket;
  }
  return std::abs(lhs - rhs) / max_abs(direct.terms);
}

double beta4_modular_check(const IdentityContext& ctx, const PointQuad& p, const Characteristic& c) {
  const Surface& s = ctx.surface();
  const int g = s.genus();
  std::optional<ModularRelation> rel;
  for (double scale : {0.1, 0.17, 0.23, 0.31}) {
    CVec probe(g);
    for (int i = 0; i < g; ++i) probe(i) = cplx(scale * (1.0 + 0.37 * i), 0.05 * (i + 1));
    try {
      rel.emplace(s.periods().tau, c, probe);
      break;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::DegenerateProbe) throw;
    }
  }
  if (!rel) throw Error(ErrorKind::DegenerateProbe, "no usable probe for the modular relation");
  const IdentityEvaluation direct = eval_beta4(ctx, p, c);
  const IdentityEvaluation via = pfaffian_identity(ctx, p, [&](const CVec& v) { return rel->doubled_via_modular(v); });
  double dev = 0.0;
  for (std::size_t i = 0; i < direct.terms.size(); ++i) {
    dev = std::max(dev, rel_diff(direct.terms[i].value, via.terms[i].value));
  }
  return std::max(dev, via.residual);
}

IdentityEvaluation fay_from_beta2(const IdentityContext& ctx, const PointQuad& p, const CVec& nu,
                                  HalfFormRegistry& reg) {
  const Surface& s = ctx.surface();
  require_distinct(s, p);
  const auto& [z, zp, w, wp] = p;
  const Characteristic zero = Characteristic::zero(s.genus());
  const auto fwd = beta2_parts(ctx, z, zp, w, wp, zero, nu, reg);
  const auto swp = beta2_parts(ctx, w, zp, z, wp, zero, nu, reg);
  const cplx denom = (X(z) - X(w)) * (X(zp) - X(wp));
  const cplx d = (fwd.t1 - fwd.t2 + swp.t1 - swp.t2) / denom;

  auto th = [&](const CVec& v) { return ctx.tau().value(zero, v + nu); };
  auto e = [&](const CoverPoint& a, const CoverPoint& b) { return s.prime_form(a, b, reg); };
  const cplx f1 = e(z, w) * e(zp, wp) / (e(w, zp) * e(z, wp) * e(z, zp) * e(w, wp)) *
                  th(z.u - zp.u + w.u - wp.u) * th(CVec::Zero(s.genus()));
  const cplx f2 = th(w.u - zp.u) * th(z.u - wp.u) / (e(w, zp) * e(z, wp));
  const cplx f3 = th(z.u - zp.u) * th(w.u - wp.u) / (e(z, zp) * e(w, wp));

  std::vector<NamedValue> terms{{"F1", f1}, {"F2", f2}, {"F3", f3}, {"D", d}};
  IdentityEvaluation out;
  const double scale = max_abs(terms);
  const cplx f = f1 - f2 + f3;
  out.residual = std::max(std::abs(d + f), std::abs(f)) / scale;
  out.checks["eta_swap"] = rel_diff(fwd.rhs, -swp.rhs);
  out.checks["beta2_sum"] = std::abs(fwd.t1 - fwd.t2 + swp.t1 - swp.t2) /
                            std::max({std::abs(fwd.t1), std::abs(fwd.t2), std::abs(swp.t1), std::abs(swp.t2)});
  out.terms = std::move(terms);
  return out;
}

bool IdentityReport::passed() const {
  if (!(max_residual < tol)) return false;
  for (const auto& [name, v] : max_checks) {
    if (!(v < tol)) return false;
  }
  return true;
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

int thread_count() {
  if (const char* env = std::getenv("HYPFAY_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return std::min(n, 256);
  }
  return 1;
}

PointQuad sample_points(const Surface& surface, std::mt19937_64& rng) {
  const Curve& curve = surface.curve();
  const double scale = curve.scale();
  cplx centre{};
  double im_lo = 0.0, im_hi = 0.0;
  for (const auto& e : curve.branch_points()) {
    centre += e;
    im_lo = std::min(im_lo, e.imag());
    im_hi = std::max(im_hi, e.imag());
  }
  centre /= static_cast<double>(curve.branch_points().size());
  std::uniform_real_distribution<double> re(-1.3, 1.3), im(0.15, 1.0), coin(0.0, 1.0);
  PointQuad out;
  int found = 0;
  for (int attempt = 0; attempt < 100000 && found < 4; ++attempt) {
    const bool up = coin(rng) < 0.5;
    const double h = im(rng) * scale;
    const double y = up ? im_hi + h : im_lo - h;
    const cplx x{centre.real() + re(rng) * scale, y};
    if (curve.distance_to_cuts(x) < 0.1 * scale) continue;
    bool ok = true;
    for (int i = 0; i < found; ++i) ok = ok && std::abs(x - X(out[i])) >= 0.1 * scale;
    if (!ok) continue;
    out[found++] = surface.cover(x, Sheet::Plus);
  }
  if (found < 4) throw Error(ErrorKind::DegenerateConfiguration, "could not place four separated points");
  return out;
}

namespace {

IdentitySample run_one(IdentityKind kind, const IdentityContext& ctx, const SamplingOptions& opts,
                       std::uint64_t index) {
  const Surface& s = ctx.surface();
  const int g = s.genus();
  auto rng = sample_rng(opts.seed, index);
  IdentitySample out;
  out.index = index;
  out.points = sample_points(s, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-0.5, 0.5), coin(0.0, 1.0);
  out.characteristic = Characteristic::zero(g);
  out.shift = CVec::Zero(g);
  if (opts.random_characteristic) {
    for (int i = 0; i < g; ++i) {
      out.characteristic.mu(i) = unit(rng);
      out.characteristic.nu(i) = sym(rng);
    }
  }
  HalfFormRegistry reg;
  if (opts.random_signs) {
    for (const auto& p : out.points) reg.assign(p.point, coin(rng) < 0.5 ? -1 : 1);
  }
  switch (kind) {
    case IdentityKind::Fay:
    case IdentityKind::FayFromBeta2: {
      for (int i = 0; i < g; ++i) out.shift(i) = cplx(0.3 * sym(rng), 0.2 * sym(rng));
      if (kind == IdentityKind::Fay) {
        const PointQuad& p = out.points;
        out.eval = eval_fay(ctx, p, out.shift);
      } else {
        out.eval = fay_from_beta2(ctx, out.points, out.shift, reg);
      }
      break;
    }
    case IdentityKind::Beta2:
      out.eval = eval_beta2(ctx, out.points, out.characteristic, out.shift, reg);
      break;
    case IdentityKind::Beta1:
      out.eval = eval_beta1(ctx, out.points, out.characteristic);
      break;
    case IdentityKind::Beta1Equiv: {
      IdentityEvaluation all;
      for (const RVec& alpha : half_periods(g)) {
        std::string tag = "alpha=";
        for (int i = 0; i < g; ++i) tag += alpha(i) > 0.5 ? '1' : '0';
        const auto ev = eval_beta1_equiv(ctx, out.points, alpha);
        for (const auto& t : ev.terms) all.terms.push_back({tag + ":" + t.name, t.value});
        all.residual = std::max(all.residual, ev.residual);
      }
      all.checks["reassembly"] = beta1_reassembly(ctx, out.points, out.characteristic);
      out.eval = std::move(all);
      break;
    }
    case IdentityKind::Beta4:
      out.eval = eval_beta4(ctx, out.points, out.characteristic);
      out.eval.checks["modular"] = beta4_modular_check(ctx, out.points, out.characteristic);
      break;
  }
  return out;
}

}  // namespace

IdentityReport run_identity(IdentityKind kind, const IdentityContext& ctx, const SamplingOptions& opts) {
  IdentityReport report;
  report.kind = kind;
  report.seed = opts.seed;
  report.tol = opts.tol;
  const int n = std::max(opts.samples, 0);
  report.samples.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        report.samples[i] = run_one(kind, ctx, opts, static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min(thread_count(), std::max(n, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& s : report.samples) {
    report.max_residual = std::max(report.max_residual, s.eval.residual);
    for (const auto& [name, v] : s.eval.checks) {
      auto& slot = report.max_checks[name];
      slot = std::max(slot, v);
    }
  }
  return report;
}

std::string report_to_json(const IdentityReport& report, const Curve& curve) {
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["identity"] = std::string(to_string(report.kind));
  doc["curve"] = nlohmann::json::parse(curve_to_json(curve));
  doc["curve_hash"] = curve.hash();
  doc["seed"] = report.seed;
  doc["tol"] = report.tol;
  auto samples = nlohmann::json::array();
  for (const auto& s : report.samples) {
    nlohmann::json js;
    js["index"] = s.index;
    auto pts = nlohmann::json::array();
    for (const auto& p : s.points) {
      pts.push_back({{"x", complex_json(p.point.X())},
                     {"sheet", p.point.sheet == Sheet::Plus ? "plus" : "minus"},
                     {"u", vector_json(p.u)},
                     {"path", p.path}});
    }
    js["points"] = pts;
    js["characteristic"] = {{"mu", vector_json(s.characteristic.mu.cast<cplx>())},
                            {"nu", vector_json(s.characteristic.nu.cast<cplx>())}};
    js["shift"] = vector_json(s.shift);
    js["residual"] = s.eval.residual;
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& t : s.eval.terms) terms[t.name] = complex_json(t.value);
    js["terms"] = terms;
    if (!s.eval.checks.empty()) js["checks"] = s.eval.checks;
    samples.push_back(js);
  }
  doc["samples"] = samples;
  doc["max_residual"] = report.max_residual;
  if (!report.max_checks.empty()) doc["max_checks"] = report.max_checks;
  doc["passed"] = report.passed();
  return doc.dump(2);
}

}  // namespace hypfay
