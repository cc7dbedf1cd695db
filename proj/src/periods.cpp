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

#include "hypfay/periods.hpp"

#include <sstream>

#include <json.hpp>

#include "hypfay/report.hpp"

namespace hypfay {

cplx Arc::point(double t) const {
  if (kind == Kind::Line) return start + t * (end - start);
  return center + radius * std::exp(kI * (theta0 + t * (theta1 - theta0)));
}

cplx Arc::tangent(double t) const {
  if (kind == Kind::Line) return end - start;
  const double dth = theta1 - theta0;
  return kI * dth * radius * std::exp(kI * (theta0 + t * dth));
}

double Arc::length() const {
  if (kind == Kind::Line) return std::abs(end - start);
  return std::abs(theta1 - theta0) * radius;
}

CyclePath stadium(const Curve& curve, int h, double offset) {
  const cplx a = curve.left(h), b = curve.right(h);
  const cplx dir = (b - a) / std::abs(b - a);
  const cplx nrm = kI * dir;
  const double phi = std::arg(dir);
  CyclePath path;
  path.kind = CycleKind::A;
  path.index = h;
  auto line = [](cplx p, cplx q) {
    Arc arc;
    arc.kind = Arc::Kind::Line;
    arc.start = p;
    arc.end = q;
    return arc;
  };
  auto circle = [&](cplx c, double t0, double t1) {
    Arc arc;
    arc.kind = Arc::Kind::Circle;
    arc.center = c;
    arc.radius = offset;
    arc.theta0 = phi + t0;
    arc.theta1 = phi + t1;
    return arc;
  };
  path.arcs.push_back(line(a - offset * nrm, b - offset * nrm));
  path.arcs.push_back(circle(b, -kPi / 2, kPi / 2));
  path.arcs.push_back(line(b + offset * nrm, a + offset * nrm));
  path.arcs.push_back(circle(a, kPi / 2, 3 * kPi / 2));
  std::ostringstream os;
  os << "stadium around cut " << h << " at distance " << offset;
  path.description = os.str();
  return path;
}

CyclePath a_cycle(const Curve& curve, int h, double offset_factor) {
  return stadium(curve, h, offset_factor * curve.local_gap(h));
}

CyclePath b_cycle(const Curve& curve, int h) {
  CyclePath path;
  path.kind = CycleKind::B;
  path.index = h;
  for (int l = 1; l <= h; ++l) {
    Arc arc;
    arc.start = curve.right(l - 1);
    arc.end = curve.left(l);
    arc.sheet = Sheet::Plus;
    path.arcs.push_back(arc);
  }
  for (int l = h; l >= 1; --l) {
    Arc arc;
    arc.start = curve.left(l);
    arc.end = curve.right(l - 1);
    arc.sheet = Sheet::Minus;
    path.arcs.push_back(arc);
  }
  path.description = "gap run from cut 0 to cut " + std::to_string(h) + " and back on the minus sheet";
  return path;
}

Differential monomial_differential(int k) {
  return {[k](cplx x, cplx s) { return std::pow(x, k) / s; }, "x^" + std::to_string(k) + " dx/s"};
}

namespace {

bool is_branch_point(const Curve& curve, cplx x) {
  for (const auto& e : curve.branch_points()) {
    if (std::abs(e - x) <= 1e-14 * (1.0 + std::abs(e))) return true;
  }
  return false;
}

}  // namespace

quad::Integral<cplx> integrate_differential(const Curve& curve, const CyclePath& path,
                                            const Differential& form, double tol) {
  quad::Integral<cplx> total{cplx{}, 0.0, 0};
  const double arc_tol = tol / std::max<std::size_t>(1, path.arcs.size());
  for (const Arc& arc : path.arcs) {
    const double sg = sign_of(arc.sheet);
    quad::Integral<cplx> piece{};
    if (arc.kind == Arc::Kind::Line && is_branch_point(curve, arc.start) && is_branch_point(curve, arc.end)) {
      piece = quad::chebyshev_segment(
          [&](cplx x) { return form.coefficient(x, sg * curve.s(x)); }, arc.start, arc.end, arc_tol);
    } else {
      if (arc.kind == Arc::Kind::Line) {
        const cplx mid = 0.5 * (arc.start + arc.end);
        if (curve.distance_to_cuts(mid) < 1e-12 && !curve.cut_containing(mid)) {
          throw Error(ErrorKind::PathHitsSingularity, "segment passes through a branch point");
        }
      }
      for (int i = 0; i <= 8; ++i) {
        if (curve.cut_containing(arc.point(i / 8.0))) {
          throw Error(ErrorKind::PathHitsSingularity, "path arc runs along a cut");
        }
      }
      piece = quad::gauss_kronrod(
          [&](double t) {
            const cplx x = arc.point(t);
            return form.coefficient(x, sg * curve.s(x)) * arc.tangent(t);
          },
          0.0, 1.0, arc_tol);
    }
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
  }
  return total;
}

PeriodData compute_periods(const Curve& curve, const PeriodOptions& opts) {
  const int g = curve.genus();
  PeriodData pd;
  pd.a_periods = CMat::Zero(g, g);
  pd.b_periods = CMat::Zero(g, g);
  if (g == 0) {
    pd.coeffs = CMat::Zero(0, 0);
    pd.tau = CMat::Zero(0, 0);
    return pd;
  }
  for (int h = 1; h <= g; ++h) {
    const CyclePath acyc = a_cycle(curve, h, opts.offset_factor);
    const CyclePath bcyc = b_cycle(curve, h);
    for (int k = 0; k < g; ++k) {
      const Differential form = monomial_differential(k);
      const auto qa = integrate_differential(curve, acyc, form, opts.tol);
      const auto qb = integrate_differential(curve, bcyc, form, opts.tol);
      pd.a_periods(k, h - 1) = qa.value;
      pd.b_periods(k, h - 1) = qb.value;
      pd.quad_error = std::max({pd.quad_error, qa.error, qb.error});
    }
  }
  Eigen::JacobiSVD<CMat> svd(pd.a_periods);
  const auto& sv = svd.singularValues();
  pd.cond_q = sv(0) / sv(sv.size() - 1);
  if (!(pd.cond_q < opts.max_condition)) {
    throw Error(ErrorKind::IllConditionedQ, "cond(Q) = " + std::to_string(pd.cond_q));
  }
  Eigen::ColPivHouseholderQR<CMat> qr(pd.a_periods);
  pd.coeffs = qr.solve(CMat::Identity(g, g));
  pd.tau = (pd.coeffs * pd.b_periods).transpose();
  std::ostringstream os;
  os << "A_h: stadium at " << opts.offset_factor << " x local gap; B_h: doubled gap integrals";
  pd.a_cycle_note = os.str();
  return pd;
}

CVec holomorphic_du(const Curve& curve, const PeriodData& periods, cplx x, cplx s) {
  const int g = curve.genus();
  CVec mono(g);
  cplx p{1.0};
  for (int k = 0; k < g; ++k) {
    mono(k) = p;
    p *= x;
  }
  return periods.coeffs * mono / s;
}

BoutrouxReport boutroux_check(const Curve& curve, const Differential& phi, double tol) {
  BoutrouxReport rep;
  for (int h = 1; h <= curve.genus(); ++h) {
    const cplx a = integrate_differential(curve, a_cycle(curve, h), phi, tol).value;
    const cplx b = integrate_differential(curve, b_cycle(curve, h), phi, tol).value;
    rep.a_periods.push_back(a);
    rep.b_periods.push_back(b);
    rep.max_real_a = std::max(rep.max_real_a, std::abs(a.real()));
    rep.max_abs_b = std::max(rep.max_abs_b, std::abs(b));
  }
  return rep;
}

std::string periods_to_json(const Curve& curve, const PeriodData& pd) {
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["curve"] = nlohmann::json::parse(curve_to_json(curve));
  doc["genus"] = curve.genus();
  doc["tau"] = matrix_json(pd.tau);
  doc["a_periods"] = matrix_json(pd.a_periods);
  doc["du_coeffs"] = matrix_json(pd.coeffs);
  doc["cond_q"] = pd.cond_q;
  doc["quadrature_error"] = pd.quad_error;
  doc["cycles"] = pd.a_cycle_note;
  const int g = curve.genus();
  if (g > 0) {
    doc["symmetry_defect"] = (pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff();
    doc["max_abs_re_tau"] = pd.tau.real().cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (pd.tau.imag() + pd.tau.imag().transpose()));
    doc["min_eig_im_tau"] = es.eigenvalues()(0);
  }
  return doc.dump(2);
}

}  // namespace hypfay
