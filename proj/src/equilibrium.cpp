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

#include "hypfay/equilibrium.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hypfay/identities.hpp"
#include "hypfay/report.hpp"

namespace hypfay {

namespace {

template <class T>
T polyval(const RVec& c, T x) {
  T acc{};
  for (Eigen::Index i = c.size(); i-- > 0;) acc = acc * x + c(i);
  return acc;
}

// Gauss-Chebyshev nodes for a gap, with the weight d sin(theta) pi/n folded
// into the values of s so that sums approximate int s(x) f(x) dx.
struct GapRule {
  std::vector<double> x;
  std::vector<double> ws;  // weight * s(x)
};

GapRule gap_rule(const Curve& curve, int h, int n) {
  const double lo = curve.right(h - 1).real(), hi = curve.left(h).real();
  const double m = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
  GapRule r;
  for (int j = 0; j < n; ++j) {
    const double th = (j + 0.5) * kPi / n;
    const double x = m - d * std::cos(th);
    r.x.push_back(x);
    r.ws.push_back(d * std::sin(th) * (kPi / n) * curve.s(cplx(x, 0.0)).real());
  }
  return r;
}

double prod_except(const RVec& z, double x, Eigen::Index skip) {
  double p = 1.0;
  for (Eigen::Index l = 0; l < z.size(); ++l) {
    if (l != skip) p *= x - z(l);
  }
  return p;
}

bool inside_gaps(const Curve& curve, const RVec& z) {
  for (Eigen::Index h = 0; h < z.size(); ++h) {
    const double lo = curve.right(h).real(), hi = curve.left(h + 1).real();
    if (!(z(h) > lo && z(h) < hi)) return false;
  }
  return true;
}

// Tanh-sinh on [a, b] through the complement form on [-1, 1], so that points
// next to either end are resolved to full relative precision.
double ts_integrate(const std::function<double(double)>& f, double a, double b, double* err = nullptr) {
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  const double d = 0.5 * (b - a);
  if (!(d > 0.0)) return 0.0;
  auto g = [&](double t, double tc) {
    const double y = t < 0 ? a - d * tc : b - d * tc;
    return f(std::clamp(y, a, b));
  };
  double e = 0.0;
  const double v = d * ts.integrate(g, 1e-13, &e);
  if (err) *err += e * std::abs(v);
  return v;
}

double wrap_2pi_i(cplx d) {
  const double im = d.imag() - 2.0 * kPi * std::round(d.imag() / (2.0 * kPi));
  return std::hypot(d.real(), im);
}

}  // namespace

cplx EquilibriumData::M(cplx x) const { return polyval(m_coeffs, x); }
cplx EquilibriumData::V(cplx x) const { return polyval(v_coeffs, x); }
cplx EquilibriumData::Vp(cplx x) const { return polyval(vp_coeffs, x); }
cplx EquilibriumData::W1(cplx x) const { return 0.5 * (Vp(x) - M(x) * curve.s(x)); }
cplx EquilibriumData::P(cplx x) const {
  const cplx vp = Vp(x), m = M(x);
  return 0.25 * (vp * vp - m * m * curve.sigma(x));
}

double EquilibriumData::density(double x) const {
  const auto h = curve.cut_containing(cplx(x, 0.0));
  if (!h) return 0.0;
  return (M(cplx(x, 0.0)) * curve.s(cplx(x, 0.0), Side::Above)).imag() / (2.0 * kPi);
}

RVec gap_integrals(const Curve& curve, const RVec& z, int nodes) {
  const int g = curve.genus();
  RVec out(g);
  for (int h = 1; h <= g; ++h) {
    const GapRule r = gap_rule(curve, h, nodes);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.x.size(); ++j) acc += r.ws[j] * prod_except(z, r.x[j], -1);
    out(h - 1) = acc;
  }
  return out;
}

RMat gap_jacobian(const Curve& curve, const RVec& z, int nodes) {
  const int g = curve.genus();
  RMat jac(g, g);
  for (int h = 1; h <= g; ++h) {
    const GapRule r = gap_rule(curve, h, nodes);
    for (int k = 0; k < g; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < r.x.size(); ++j) acc -= r.ws[j] * prod_except(z, r.x[j], k);
      jac(h - 1, k) = acc;
    }
  }
  return jac;
}

EquilibriumData solve_equilibrium(const Curve& curve, const EquilibriumOptions& opts) {
  if (!curve.is_real()) throw Error(ErrorKind::InvalidCurve, "equilibrium construction needs real branch points");
  const int g = curve.genus();
  EquilibriumData eq(curve);
  RVec z(g);
  for (int h = 0; h < g; ++h) z(h) = 0.5 * (curve.right(h).real() + curve.left(h + 1).real());

  const double scale = curve.scale();
  const double jscale = std::pow(scale, g + 2);
  auto converged = [&](const RVec& j) { return g == 0 || j.cwiseAbs().maxCoeff() <= opts.tol * jscale; };

  RVec j = gap_integrals(curve, z, opts.gap_nodes);
  int it = 0;
  bool ok = converged(j);
  for (; it < opts.max_iterations && !ok; ++it) {
    const RMat jac = gap_jacobian(curve, z, opts.gap_nodes);
    const RVec step = jac.colPivHouseholderQr().solve(j);
    double lambda = 1.0;
    RVec next = z - step;
    while ((!inside_gaps(curve, next) || gap_integrals(curve, next, opts.gap_nodes).norm() > j.norm()) &&
           lambda > 1e-6) {
      lambda *= 0.5;
      next = z - lambda * step;
    }
    if (!inside_gaps(curve, next)) break;
    z = next;
    j = gap_integrals(curve, z, opts.gap_nodes);
    ok = converged(j) || lambda * step.norm() < 1e-15 * scale;
  }
  if (!ok) {
    // Coordinate sweeps: each equation is linear in its own root, whose
    // solution is a positive-weight average over its gap.
    eq.sweep_fallback = true;
    for (int sweep = 0; sweep < 2000 && !converged(j); ++sweep) {
      for (int h = 1; h <= g; ++h) {
        const GapRule r = gap_rule(curve, h, opts.gap_nodes);
        double num = 0.0, den = 0.0;
        for (std::size_t q = 0; q < r.x.size(); ++q) {
          const double p = r.ws[q] * prod_except(z, r.x[q], h - 1);
          num += p * r.x[q];
          den += p;
        }
        z(h - 1) = num / den;
      }
      j = gap_integrals(curve, z, opts.gap_nodes);
      ++it;
    }
    if (!converged(j)) {
      throw Error(ErrorKind::NoConvergence, "gap conditions not met: " + std::to_string(j.cwiseAbs().maxCoeff()));
    }
  }
  if (!inside_gaps(curve, z)) throw Error(ErrorKind::RootEscapedGap, "root of M left its gap");
  eq.z_roots = z;
  eq.iterations = it;

  // monic product, ascending coefficients
  RVec mono = RVec::Zero(g + 1);
  mono(0) = 1.0;
  for (int h = 0; h < g; ++h) {
    RVec next = RVec::Zero(g + 1);
    for (int i = 0; i < g; ++i) {
      next(i + 1) += mono(i);
      next(i) -= z(h) * mono(i);
    }
    mono = next;
  }

  double raw_mass = 0.0;
  for (int h = 0; h <= g; ++h) {
    auto f = [&](cplx x) {
      return cplx((polyval(mono, cplx(x.real(), 0.0)) * curve.s(cplx(x.real(), 0.0), Side::Above)).imag(), 0.0);
    };
    raw_mass += quad::chebyshev_segment(f, curve.left(h), curve.right(h), 1e-12 * jscale).value.real();
  }
  eq.t_top = 2.0 * kPi / raw_mass;
  eq.m_coeffs = eq.t_top * mono;

  // s / x^{g+1} = prod_j sqrt(1 - e_j / x) as a series in 1/x
  const int terms = 2 * g + 4;
  RVec ser = RVec::Zero(terms);
  ser(0) = 1.0;
  for (const auto& e : curve.branch_points()) {
    RVec f(terms);
    for (int k = 0; k < terms; ++k) {
      double c = 1.0;  // binom(1/2, k)
      for (int i = 0; i < k; ++i) c *= (0.5 - i) / (i + 1);
      f(k) = c * std::pow(-e.real(), k);
    }
    RVec conv = RVec::Zero(terms);
    for (int a = 0; a < terms; ++a) {
      for (int b = 0; a + b < terms; ++b) conv(a + b) += ser(a) * f(b);
    }
    ser = conv;
  }
  eq.vp_coeffs = RVec::Zero(2 * g + 2);
  for (int jj = 0; jj <= g; ++jj) {
    for (int k = 0; k < terms; ++k) {
      const int p = jj + g + 1 - k;
      if (p >= 0) eq.vp_coeffs(p) += eq.m_coeffs(jj) * ser(k);
    }
  }
  eq.v_coeffs = RVec::Zero(2 * g + 3);
  for (int p = 0; p <= 2 * g + 1; ++p) eq.v_coeffs(p + 1) = eq.vp_coeffs(p) / (p + 1);

  eq.cut_masses = RVec(g + 1);
  for (int h = 0; h <= g; ++h) {
    const double a = curve.left(h).real(), b = curve.right(h).real();
    eq.cut_masses(h) = ts_integrate([&](double x) { return eq.density(x); }, a, b);
  }
  eq.mass = eq.cut_masses.sum();
  eq.eps_star = eq.cut_masses.tail(g);
  eq.gap_residual = g == 0 ? 0.0 : eq.t_top * gap_integrals(curve, z, 4 * opts.gap_nodes).cwiseAbs().maxCoeff();
  return eq;
}

Functionals::Contour Functionals::build(const Curve& curve, double factor) {
  Contour c;
  const auto& rule = quad::gauss_legendre(16);
  for (int h = 0; h <= curve.genus(); ++h) {
    const double offset = factor * curve.local_gap(h);
    const CyclePath path = stadium(curve, h, offset);
    for (const Arc& arc : path.arcs) {
      const int panels = std::max(1, static_cast<int>(std::ceil(arc.length() / offset)));
      for (int p = 0; p < panels; ++p) {
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          const double t = (p + 0.5 + 0.5 * rule.x[i]) / panels;
          c.x.push_back(arc.point(t));
          c.w.push_back(arc.tangent(t) * (0.5 * rule.w[i] / panels));
        }
      }
    }
  }
  return c;
}

Functionals::Functionals(const EquilibriumData& eq, std::shared_ptr<const Surface> surface, double beta)
    : eq_(eq), surface_(std::move(surface)), beta_(beta) {
  const int g = eq.genus();
  if (g > 0 && !surface_) throw Error(ErrorKind::InvalidCurve, "functionals need the surface for genus >= 1");
  inner_ = build(eq.curve, 0.2);
  outer_ = build(eq.curve, 0.3);
  for (const auto& x : outer_.x) height_ = std::max(height_, std::abs(x.imag()));
  for (const auto& x : inner_.x) w1_inner_.push_back(eq.W1(x));

  sigma_ = CVec::Zero(1);
  sigma_(0) = 1.0;
  for (const auto& e : eq.curve.branch_points()) {
    CVec next = CVec::Zero(sigma_.size() + 1);
    next.tail(sigma_.size()) += sigma_;
    next.head(sigma_.size()) -= e * sigma_;
    sigma_ = next;
  }
  holo_ = CMat::Zero(g, g);
  if (g > 0) {
    for (const auto& x : inner_.x) du_inner_.push_back(holomorphic_du(eq.curve, surface_->periods(), x, eq.curve.s(x)));
    fit_holomorphic_part();
  }

  std::vector<cplx> s_in, s_out;
  for (const auto& x : inner_.x) s_in.push_back(eq.curve.s(x));
  for (const auto& x : outer_.x) s_out.push_back(eq.curve.s(x));
  w2_.resize(inner_.x.size(), outer_.x.size());
  for (std::size_t i = 0; i < inner_.x.size(); ++i) {
    for (std::size_t j = 0; j < outer_.x.size(); ++j) w2_(i, j) = w2(inner_.x[i], outer_.x[j], s_in[i], s_out[j]);
  }
}

// Algebraic part (2 s1 s2 + F(x1, x2)) / (4 s1 s2 (x1 - x2)^2) with the
// Kleinian polynomial F of sigma.
cplx Functionals::algebraic_bidifferential(cplx x1, cplx x2, cplx s1, cplx s2) const {
  const Eigen::Index n = sigma_.size();
  auto lam = [&](Eigen::Index i) { return i < n ? sigma_(i) : cplx{}; };
  cplx f{}, pk{1.0, 0.0};
  for (Eigen::Index k = 0; 2 * k < n; ++k) {
    f += pk * (2.0 * lam(2 * k) + lam(2 * k + 1) * (x1 + x2));
    pk *= x1 * x2;
  }
  const cplx d = x1 - x2;
  return (2.0 * s1 * s2 + f) / (4.0 * s1 * s2 * d * d);
}

cplx Functionals::holomorphic_part(cplx x1, cplx x2, cplx s1, cplx s2) const {
  const int g = eq_.genus();
  cplx acc{};
  cplx pi{1.0, 0.0};
  for (int i = 0; i < g; ++i, pi *= x1) {
    cplx pj{1.0, 0.0};
    for (int j = 0; j < g; ++j, pj *= x2) acc += holo_(i, j) * pi * pj;
  }
  return acc / (s1 * s2);
}

// The normalized bidifferential differs from the algebraic part by a symmetric
// holomorphic bidifferential sum L_ij x1^i x2^j / (s1 s2); L is fitted to
// theta-function values at pairs of contour nodes.
void Functionals::fit_holomorphic_part() {
  const int g = eq_.genus();
  const int unknowns = g * (g + 1) / 2;
  const int pairs = 3 * unknowns + 6;
  const Curve& curve = eq_.curve;
  auto node = [](const Contour& c, int k, int count) {
    return c.x[(static_cast<std::size_t>(k) * 7919 + c.x.size() / (count + 1)) % c.x.size()];
  };
  CMat a(pairs, unknowns);
  CVec rhs(pairs);
  std::vector<cplx> exact(pairs);
  for (int k = 0; k < pairs; ++k) {
    const cplx x1 = node(inner_, k, pairs), x2 = node(outer_, 3 * k + 1, pairs);
    const cplx s1 = curve.s(x1), s2 = curve.s(x2);
    const CoverPoint p1 = surface_->cover(SurfacePoint::at(curve, x1), false);
    const CoverPoint p2 = surface_->cover(SurfacePoint::at(curve, x2), false);
    exact[k] = surface_->bidifferential(p1, p2);
    rhs(k) = (exact[k] - algebraic_bidifferential(x1, x2, s1, s2)) * s1 * s2;
    int col = 0;
    for (int i = 0; i < g; ++i) {
      for (int j = i; j < g; ++j, ++col) {
        a(k, col) = std::pow(x1, i) * std::pow(x2, j) + (i == j ? cplx{} : std::pow(x1, j) * std::pow(x2, i));
      }
    }
  }
  const CVec l = a.colPivHouseholderQr().solve(rhs);
  int col = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j, ++col) holo_(i, j) = holo_(j, i) = l(col);
  }
  for (int k = 0; k < pairs; ++k) {
    const cplx x1 = node(inner_, k, pairs), x2 = node(outer_, 3 * k + 1, pairs);
    const cplx s1 = curve.s(x1), s2 = curve.s(x2);
    const cplx model = algebraic_bidifferential(x1, x2, s1, s2) + holomorphic_part(x1, x2, s1, s2);
    fit_error_ = std::max(fit_error_, std::abs(model - exact[k]) / std::max(1.0, std::abs(exact[k])));
  }
}

cplx Functionals::w2(cplx x1, cplx x2, cplx s1, cplx s2) const {
  const cplx d = x1 - x2;
  return algebraic_bidifferential(x1, x2, s1, s2) + holomorphic_part(x1, x2, s1, s2) - 1.0 / (d * d);
}

cplx Functionals::L(const Fn& f) const {
  cplx acc{};
  for (std::size_t i = 0; i < inner_.x.size(); ++i) acc += inner_.w[i] * w1_inner_[i] * f(inner_.x[i]);
  return acc / (2.0 * kPi * kI);
}

cplx Functionals::Q_bare(const Fn& f, const Fn& g) const {
  CVec fi(inner_.x.size()), go(outer_.x.size());
  for (std::size_t i = 0; i < inner_.x.size(); ++i) fi(i) = inner_.w[i] * f(inner_.x[i]);
  for (std::size_t j = 0; j < outer_.x.size(); ++j) go(j) = outer_.w[j] * g(outer_.x[j]);
  const cplx tpi = 2.0 * kPi * kI;
  return bilinear(fi, w2_ * go) / (tpi * tpi);
}

CVec Functionals::U(const Fn& f) const {
  CVec acc = CVec::Zero(eq_.genus());
  for (std::size_t i = 0; i < inner_.x.size() && !du_inner_.empty(); ++i) {
    acc += (inner_.w[i] * f(inner_.x[i])) * du_inner_[i];
  }
  return acc / (2.0 * kPi * kI);
}

namespace {

double log_potential(const EquilibriumData& eq, double x, double* err) {
  double acc = 0.0;
  for (int h = 0; h <= eq.genus(); ++h) {
    const double a = eq.curve.left(h).real(), b = eq.curve.right(h).real();
    auto f = [&](double y) { return y == x ? 0.0 : std::log(std::abs(x - y)) * eq.density(y); };
    if (x > a && x < b) {
      acc += ts_integrate(f, a, x, err) + ts_integrate(f, x, b, err);
    } else {
      acc += ts_integrate(f, a, b, err);
    }
  }
  return acc;
}

}  // namespace

double effective_potential(const EquilibriumData& eq, double x) {
  return eq.V(cplx(x, 0.0)).real() - 2.0 * log_potential(eq, x, nullptr);
}

EnergyResult energy_direct(const EquilibriumData& eq, double beta) {
  EnergyResult r;
  double err = 0.0;
  for (int h = 0; h <= eq.genus(); ++h) {
    const double a = eq.curve.left(h).real(), b = eq.curve.right(h).real();
    r.log_energy += ts_integrate([&](double x) { return eq.density(x) * log_potential(eq, x, &err); }, a, b, &err);
    r.potential += ts_integrate([&](double x) { return eq.density(x) * eq.V(cplx(x, 0.0)).real(); }, a, b, &err);
  }
  r.energy = 0.5 * beta * (r.log_energy - r.potential);
  r.error = 0.5 * beta * err;
  return r;
}

namespace {

cplx energy_rhs(const EquilibriumData& eq, const Functionals& fn, const Surface* surface, double beta) {
  auto v = [&](cplx x) { return eq.V(x); };
  cplx rhs = 0.5 * beta * fn.L(v) + beta * beta / 8.0 * fn.Q(v, v);
  if (surface && eq.genus() > 0) {
    const CVec eps = eq.eps_star.cast<cplx>();
    rhs += kI * kPi * beta * bilinear(eps, surface->periods().tau * eps + surface->u_inf());
  }
  return rhs;
}

}  // namespace

EnergyFormulaReport check_energy_formula(const EquilibriumData& eq, const Functionals& fn, const Surface* surface,
                                         double beta, bool with_scaling) {
  EnergyFormulaReport rep;
  const EnergyResult e = energy_direct(eq, beta);
  rep.lhs = -e.energy;
  rep.energy_error = e.error;
  rep.rhs = energy_rhs(eq, fn, surface, beta);
  rep.residual = std::abs(rep.lhs - rep.rhs.real());
  rep.im_rhs = std::abs(rep.rhs.imag());
  if (with_scaling) {
    const Curve scaled = eq.curve.scaled(rep.scale_factor);
    const EquilibriumData eq2 = solve_equilibrium(scaled);
    std::shared_ptr<const Surface> s2 = scaled.genus() > 0 ? std::make_shared<Surface>(scaled) : nullptr;
    const Functionals fn2(eq2, s2, beta);
    const double lhs2 = -energy_direct(eq2, beta).energy;
    const cplx rhs2 = energy_rhs(eq2, fn2, s2.get(), beta);
    rep.scaled_residual_shift = (lhs2 - rhs2.real()) - (rep.lhs - rep.rhs.real());
    rep.predicted_shift = -0.5 * beta * std::log(rep.scale_factor);
  }
  return rep;
}

VeqReport compute_v_eq(const EquilibriumData& eq, const Surface& surface, double beta) {
  const int g = eq.genus();
  const Curve& curve = eq.curve;
  const CMat& tau = surface.periods().tau;
  const CVec& ui = surface.u_inf();
  VeqReport rep;
  std::vector<CVec> uz;
  for (int k = 0; k < g; ++k) uz.push_back(surface.abel(SurfacePoint::at(curve, cplx(eq.z_roots(k), 0.0)), false).u);

  const double pref = 2.0 * kPi * (1.0 - 0.5 * beta);
  RVec closed = 0.5 * (g + 1) * ui.imag(), graded = closed;
  for (int k = 1; k <= g; ++k) {
    closed += uz[k - 1].imag() + 0.5 * tau.col(k - 1).imag();
    graded += uz[k - 1].imag() + 0.5 * (g + 1 - k) * tau.col(k - 1).imag();
  }
  rep.closed_form = pref * closed;
  rep.graded_form = pref * graded;

  CVec bracket = CVec::Zero(g);
  for (int k = 1; k <= g; ++k) {
    bracket += uz[k - 1];
    for (int l = 0; l < k; ++l) bracket += surface.abel_weierstrass(2 * l) - surface.abel_weierstrass(2 * l + 1);
  }
  for (int k = 0; k <= g; ++k) bracket += 0.5 * (surface.abel_weierstrass(2 * k) + surface.abel_weierstrass(2 * k + 1));
  const CVec v = (2.0 * kI * kPi * (0.5 * beta - 1.0)) * bracket;
  rep.sum_route = v.real();
  rep.imag_part = v.size() ? v.imag().cwiseAbs().maxCoeff() : 0.0;

  rep.direct = RVec::Zero(g);
  for (int h = 0; h < g; ++h) {
    double acc = 0.0;
    for (int c = 0; c <= g; ++c) {
      const double a = curve.left(c).real(), b = curve.right(c).real();
      auto f = [&](double x) {
        const cplx xc(x, 0.0);
        const cplx du = holomorphic_du(curve, surface.periods(), xc, curve.s(xc, Side::Above))(h);
        const double rho = eq.density(x);
        return rho > 0.0 ? (-2.0 * du).real() * std::log(rho) : 0.0;
      };
      acc += ts_integrate(f, a, b);
    }
    rep.direct(h) = (0.5 * beta - 1.0) * acc;
  }
  return rep;
}

LogFunctionalReport check_log_functionals(const EquilibriumData& eq, const Functionals& fn,
                                          const Surface& surface, int points, std::uint64_t seed) {
  LogFunctionalReport rep;
  rep.points = points;
  const Curve& curve = eq.curve;
  const double beta = fn.beta();
  const int d = eq.degree();
  const CVec eps = eq.eps_star.cast<cplx>();
  const CVec& ui = surface.u_inf();
  const cplx wplus = surface.omega_inf(Sheet::Plus);
  const CVec zero = CVec::Zero(surface.genus());
  double emax = 0.0;
  for (const auto& e : curve.branch_points()) emax = std::max(emax, std::abs(e));
  const double scale = curve.scale();

  auto rng = sample_rng(seed, 0);
  std::uniform_real_distribution<double> re(-1.2, 1.2), im(0.1, 0.6), coin(0.0, 1.0);
  std::vector<CoverPoint> zs;
  while (static_cast<int>(zs.size()) < points) {
    const double y = fn.contour_height() + im(rng) * scale;
    const cplx x{re(rng) * scale, coin(rng) < 0.5 ? y : -y};
    if (std::abs(x) > 1.4 * emax) continue;
    bool far = true;
    for (const auto& p : zs) far = far && std::abs(p.point.X() - x) > 0.1 * scale;
    if (far) zs.push_back(surface.cover(SurfacePoint::at(curve, x), false));
  }
  auto v = [&](cplx x) { return eq.V(x); };
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const CoverPoint& z = zs[i];
    const cplx x = z.point.X();
    auto lg = [x](cplx xi) { return std::log(x - xi); };
    cplx sum_db{};
    for (int k = 1; k <= d; ++k) sum_db += eq.t(k) / static_cast<double>(k) * surface.second_kind_integral(k, z);
    const cplx core = surface.theta_odd(-ui) * surface.theta_odd(z.u - zero) / (surface.theta_odd(z.u - ui) * wplus);
    const cplx head = 2.0 * kI * kPi * bilinear(eps, z.u) - std::log(core);

    const cplx l_log = fn.L(lg);
    const cplx q_log_v = fn.Q(lg, v);
    rep.line1 = std::max(rep.line1, wrap_2pi_i(l_log - (head - sum_db)));
    rep.line2 = std::max(rep.line2, std::abs(q_log_v - (2.0 / beta) * sum_db));
    rep.simplification = std::max(rep.simplification, wrap_2pi_i(l_log + 0.5 * beta * q_log_v - head));

    const cplx th = surface.theta_odd(z.u);
    const cplx q_self = 0.5 * beta * fn.Q(lg, lg);
    rep.line4 = std::max(rep.line4, wrap_2pi_i(q_self - std::log(-z.omega * wplus / (th * th))));
    rep.line4_unsigned = std::max(rep.line4_unsigned, wrap_2pi_i(q_self - std::log(z.omega * wplus / (th * th))));

    const CoverPoint& w = zs[(i + 1) % zs.size()];
    const cplx xw = w.point.X();
    auto lw = [xw](cplx xi) { return std::log(xw - xi); };
    const cplx ratio = surface.theta_odd(z.u - w.u) * wplus /
                       (surface.theta_odd(z.u) * surface.theta_odd(w.u) * (xw - x));
    rep.line3 = std::max(rep.line3, wrap_2pi_i(0.5 * beta * fn.Q(lg, lw) - std::log(ratio)));
  }
  return rep;
}

double check_u_of_v(const EquilibriumData& eq, const Functionals& fn, const Surface& surface) {
  const CVec lhs = fn.U([&](cplx x) { return eq.V(x); });
  const CVec eps = eq.eps_star.cast<cplx>();
  const CVec rhs = surface.periods().tau * eps + surface.u_inf();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

ConstructionReport check_construction(const EquilibriumData& eq, const Surface* surface) {
  ConstructionReport rep;
  const Curve& curve = eq.curve;
  const int g = eq.genus();
  const double scale = curve.scale();
  rep.gap_residual = eq.gap_residual;
  rep.mass_error = std::abs(eq.mass - 1.0);

  double umin = 1e300, umax = -1e300, dmin = 1e300;
  for (int h = 0; h <= g; ++h) {
    const double a = curve.left(h).real(), b = curve.right(h).real();
    for (int i = 1; i <= 9; ++i) {
      const double x = a + (b - a) * i / 10.0;
      const double u = effective_potential(eq, x);
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      dmin = std::min(dmin, eq.density(x));
    }
  }
  rep.potential_spread = umax - umin;
  rep.min_density = dmin;

  // loop equation with P fitted from 4g+8 samples
  const int n = 4 * g + 8;
  cplx centre{};
  for (const auto& e : curve.branch_points()) centre += e;
  centre /= static_cast<double>(curve.branch_points().size());
  std::vector<cplx> xs;
  for (int i = 0; i < n; ++i) {
    xs.push_back(centre + 1.5 * scale * std::exp(kI * (2.0 * kPi * (i + 0.3) / n)));
  }
  CMat vand(n, 2 * g + 1);
  CVec rhs(n);
  double mag = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx y = (xs[i] - centre) / scale;
    for (int p = 0; p <= 2 * g; ++p) vand(i, p) = std::pow(y, p);
    const cplx w = eq.W1(xs[i]);
    rhs(i) = eq.Vp(xs[i]) * w - w * w;
    mag = std::max(mag, std::abs(eq.Vp(xs[i]) * w));
  }
  const CVec coef = vand.colPivHouseholderQr().solve(rhs);
  auto pfit = [&](cplx x) {
    const cplx y = (x - centre) / scale;
    cplx acc{};
    for (int p = 2 * g; p >= 0; --p) acc = acc * y + coef(p);
    return acc;
  };
  for (int i = 0; i < 2 * n; ++i) {
    const cplx x = centre + scale * (0.7 + 0.9 * i / (2.0 * n)) * std::exp(kI * (0.37 + 2.0 * kPi * i / (2 * n)));
    if (curve.distance_to_cuts(x) < 0.05 * scale) continue;
    const cplx w = eq.W1(x);
    rep.loop_equation = std::max(rep.loop_equation, std::abs(w * w - eq.Vp(x) * w + pfit(x)) / mag);
    rep.p_fit_error = std::max(rep.p_fit_error, std::abs(pfit(x) - eq.P(x)) / mag);
  }

  if (g > 0) {
    Differential phi{[&](cplx x, cplx s) { return 0.5 * (eq.Vp(x) - eq.M(x) * s); }, "W1 dX"};
    const double size = scale * std::max(1.0, std::abs(eq.Vp(centre + 1.5 * scale)));
    const BoutrouxReport br = boutroux_check(curve, phi, 1e-12 * size);
    for (int h = 0; h < g; ++h) {
      rep.boutroux_a = std::max(rep.boutroux_a, std::abs(br.a_periods[h] - 2.0 * kPi * kI * eq.eps_star(h)));
    }
    rep.boutroux_b = br.max_abs_b;
  }
  if (surface && g > 0) {
    const CVec eps = eq.eps_star.cast<cplx>();
    const CoverPoint ip = surface->infinity(Sheet::Plus), im = surface->infinity(Sheet::Minus);
    const SurfacePoint minus_inf = SurfacePoint::infinity(Sheet::Minus);
    for (int i = 0; i < 6; ++i) {
      const cplx x = centre + scale * (0.5 + 0.15 * i) * std::exp(kI * (0.4 + 1.1 * i));
      if (curve.distance_to_cuts(x) < 0.1 * scale) continue;
      const CoverPoint z = surface->cover(SurfacePoint::at(curve, x), false);
      cplx rec = 2.0 * kI * kPi * bilinear(eps, surface->du(z.point)) + surface->third_kind(ip, im, z);
      for (int k = 1; k <= eq.degree(); ++k) {
        rec -= eq.t(k) / static_cast<double>(k) * surface->second_kind(minus_inf, k, z);
      }
      const cplx w = eq.W1(x);
      rep.decomposition = std::max(rep.decomposition, std::abs(rec - w) / std::max(1.0, std::abs(w)));
    }
  }
  return rep;
}

std::string equilibrium_to_json(const EquilibriumData& eq, double beta) {
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["curve"] = nlohmann::json::parse(curve_to_json(eq.curve));
  doc["beta"] = beta;
  auto vec = [](const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  doc["z_roots"] = vec(eq.z_roots);
  doc["t_top"] = eq.t_top;
  doc["M_coeffs"] = vec(eq.m_coeffs);
  doc["V_coeffs"] = vec(eq.v_coeffs);
  doc["eps_star"] = vec(eq.eps_star);
  doc["cut_masses"] = vec(eq.cut_masses);
  doc["mass"] = eq.mass;
  doc["gap_residual"] = eq.gap_residual;
  doc["newton_iterations"] = eq.iterations;
  doc["sweep_fallback"] = eq.sweep_fallback;
  return doc.dump(2);
}

std::string density_csv(const EquilibriumData& eq, int samples_per_cut) {
  std::ostringstream os;
  os.precision(17);
  os << "x,rho\n";
  for (int h = 0; h <= eq.genus(); ++h) {
    const double a = eq.curve.left(h).real(), b = eq.curve.right(h).real();
    for (int i = 0; i <= samples_per_cut; ++i) {
      const double x = a + (b - a) * i / samples_per_cut;
      os << x << ',' << eq.density(x) << '\n';
    }
  }
  return os.str();
}

}  // namespace hypfay
