// Copyright 2026 The qbrown developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbrown/qbe.hpp"

#include <cmath>

#include "qbrown/numerics.hpp"

namespace qbrown::qbe {

double criterion(const OscillatorParams& params, double u) {
  params.validate();
  if (u < 0.0) throw std::invalid_argument("criterion: u >= 0 required");
  const double et = params.eta_tilde();
  const double r = params.r();
  const double sn = std::sin(et * u);
  const double sh = std::sinh(u);
  return sn * sn - r * r * sh * sh;
}

PositivityClass classify(double s, double tol) {
  if (s > tol) return PositivityClass::non_positive;
  if (s < -tol) return PositivityClass::excess_fluctuations;
  return PositivityClass::marginal;
}

QbeSolutionAt solve_at(const OscillatorParams& params, double t) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("solve_at: t >= 0 required");

  const double m = params.m, kT = params.kT, hbar = params.hbar;
  const double G = params.gamma, w = params.omega;
  const double et = params.eta_tilde();
  const double r = params.r();
  const double u = G * t;

  QbeSolutionAt sol;
  sol.t = t;
  sol.u = u;
  const double sn = std::sin(et * u);
  const double sh = std::sinh(u);
  sol.s = sn * sn - r * r * sh * sh;

  if (t == 0.0) {
    // limits: l1, l3 -> 0, b_q -> sqrt(2 m kT)/hbar, b_p -> i/(2 hbar b_q)
    sol.delta = 0.0;
    sol.l1 = 0.0;
    sol.l3 = 0.0;
    const double bq = std::sqrt(2.0 * m * kT) / hbar;
    sol.b_q = Complex(bq, 0.0);
    sol.b_p = Complex(0.0, 1.0 / (2.0 * hbar * bq));
    return sol;
  }

  // l1 = (m kT e^{2u} / 2 hbar^2) [1 - e^{-2u} + (1 - cos 2 eta~ u)/eta~^2
  //       + sin(2 eta~ u)/eta~]
  const double one_minus = -std::expm1(-2.0 * u);
  const double one_minus_cos = 2.0 * sn * sn;  // 1 - cos(2x) = 2 sin^2 x
  const double bracket = one_minus + one_minus_cos / (et * et) +
                         std::sin(2.0 * et * u) / et;
  const double e2u = std::exp(2.0 * u);
  sol.l1 = m * kT * e2u * bracket / (2.0 * hbar * hbar);
  sol.l3 = kT * e2u * one_minus_cos / (2.0 * hbar * hbar * G * et * et);

  const double pref = kT / (et * hbar * hbar * w);
  sol.delta = pref * pref * sol.s / sol.l1;

  const double em1 = std::expm1(2.0 * u);  // e^{2u} - 1
  const double bq = std::sqrt(2.0 * sol.l1 / em1);
  sol.b_q = Complex(bq, 0.0);
  sol.b_p = std::sqrt(em1 / (2.0 * sol.l1)) *
            Complex(2.0 * sol.l3 / em1, 1.0 / (2.0 * hbar));
  return sol;
}

wn::MasterEqCoefficients master_eq_coefficients(const OscillatorParams& p) {
  p.validate();
  const double b11 = 0.5 * p.m * p.omega * p.omega;
  const double b12 = 0.5 * p.gamma;
  const double b22 = 0.5 / p.m;
  const double k1 = 2.0 * p.gamma * p.m * p.kT / (p.hbar * p.hbar);
  const Complex k3(0.0, -0.5 * p.gamma / p.hbar);  // Gamma/(2 hbar i)
  return wn::MasterEqCoefficients::constants(b11, b12, b22, k1, 0.0, k3);
}

witness::LemmaForm damping_factor_form(const QbeSolutionAt& sol,
                                       const OscillatorParams& params) {
  const double u = sol.u;
  const double Gt = u;  // Gamma * t in the exponent -Gamma t {B^dag,.,B^dag}
  (void)params;
  witness::LemmaForm f;
  f.eta = Gt * std::norm(sol.b_q);
  f.xi = Gt * std::norm(sol.b_p);
  f.zeta = -Gt * sol.b_q * std::conj(sol.b_p);
  return f;
}

witness::LemmaForm combined_form(const OscillatorParams& params, double t) {
  const QbeSolutionAt sol = solve_at(params, t);
  const witness::LemmaForm damp = damping_factor_form(sol, params);

  witness::MomentMap map = witness::lemma_moment_map(damp, params.hbar);
  // Second factor exp[delta {p,.,p}]: eta = zeta = 0, xi = -delta.  Its
  // moment map is valid for either sign of delta.
  witness::LemmaForm spread;
  spread.xi = -sol.delta;
  map = map.then(witness::lemma_moment_map(spread, params.hbar));
  return witness::form_from_moment_map(map, params.hbar);
}

GaussianState propagate_gaussian(const OscillatorParams& params, double t,
                                 const GaussianState& rho0) {
  params.validate();
  if (!rho0.allowable(params.hbar, 1e-12))
    throw std::invalid_argument("propagate_gaussian: rho0 not allowable");

  const QbeSolutionAt sol = solve_at(params, t);
  const witness::LemmaForm damp = damping_factor_form(sol, params);
  witness::LemmaForm spread;
  spread.xi = -sol.delta;

  const witness::MomentMap map =
      witness::lemma_moment_map(damp, params.hbar)
          .then(witness::lemma_moment_map(spread, params.hbar));

  // central covariances follow the same affine law as raw moments because
  // the means scale with the square root of the second-moment scale
  const witness::SecondMoments cov0{rho0.cov_qq, rho0.cov_pp, 2.0 * rho0.cov_qp};
  const witness::SecondMoments cov1 = map.apply(cov0);
  const double mean_scale = witness::lemma_mean_scale(damp, params.hbar) *
                            witness::lemma_mean_scale(spread, params.hbar);

  GaussianState out;
  out.mean_q = mean_scale * rho0.mean_q;
  out.mean_p = mean_scale * rho0.mean_p;
  out.cov_qq = cov1.q2;
  out.cov_pp = cov1.p2;
  out.cov_qp = 0.5 * cov1.qp_sym;
  return out;
}

GaussianState two_photon_coherent(const OscillatorParams& params, double t,
                                  Complex beta) {
  const QbeSolutionAt sol = solve_at(params, t);
  const double hbar = params.hbar;
  GaussianState g;
  g.cov_qq = hbar * hbar * std::norm(sol.b_p);
  g.cov_pp = hbar * hbar * std::norm(sol.b_q);
  g.cov_qp = -hbar * hbar * (std::conj(sol.b_q) * sol.b_p).real();
  // means from b_q <q> + b_p <p> = beta (b_q real and positive for t >= 0)
  const double bq = sol.b_q.real();
  const double im_bp = sol.b_p.imag();
  g.mean_p = beta.imag() / im_bp;
  g.mean_q = (beta.real() - sol.b_p.real() * g.mean_p) / bq;
  return g;
}

std::vector<double> marginal_times(const OscillatorParams& params,
                                   double u_max, int scan_points) {
  params.validate();
  std::vector<double> roots;
  double prev_u = 1e-9;
  double prev_s = criterion(params, prev_u);
  for (int i = 1; i <= scan_points; ++i) {
    const double u = u_max * static_cast<double>(i) / scan_points;
    const double s = criterion(params, u);
    if ((prev_s > 0.0) != (s > 0.0)) {
      double lo = prev_u, hi = u;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((criterion(params, mid) > 0.0) == (prev_s > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_u = u;
    prev_s = s;
  }
  return roots;
}

double last_violation_time(const OscillatorParams& params, double u_max,
                           int scan_points) {
  double last = 0.0;
  for (int i = 1; i <= scan_points; ++i) {
    const double u = u_max * static_cast<double>(i) / scan_points;
    if (criterion(params, u) > 0.0) last = u;
  }
  return last;
}

Eigen::Matrix2d reversible_flow_first(const OscillatorParams& p, double t) {
  Eigen::Matrix2d A;
  A << p.gamma, 1.0 / p.m,
       -p.m * p.omega * p.omega, -p.gamma;
  return expm(Matrix(A * t));
}

Eigen::Matrix3d reversible_flow_second(const OscillatorParams& p, double t) {
  // ordering (<q^2>, <p^2>, <qp+pq>)
  Eigen::Matrix3d A;
  A << 2.0 * p.gamma, 0.0, 1.0 / p.m,
       0.0, -2.0 * p.gamma, -p.m * p.omega * p.omega,
       -2.0 * p.m * p.omega * p.omega, 2.0 / p.m, 0.0;
  return expm(Matrix(A * t));
}

ViolationScanResult long_time_violation_scan(double chi_min, double u_star) {
  if (!(chi_min > 1.0))
    throw std::invalid_argument("long_time_violation_scan: chi_min > 1 required");
  if (u_star < 0.0)
    throw std::invalid_argument("long_time_violation_scan: u_star >= 0 required");
  if (u_star > 350.0)
    throw GateError("long_time_violation_scan", "sinh range",
                    "u_star beyond numeric range of sinh");

  ViolationScanResult out;
  out.u_star = u_star;

  const double probe = (u_star > 1e-6) ? u_star : 1e-3;

  // Put eta~ * u_star on a peak of sin^2 and make r exponentially small by
  // driving hbar omega / 2kT up toward 1.
  const double k = std::ceil((2.0 * chi_min * probe - 0.5 * M_PI) / M_PI);
  const double eta = (0.5 * M_PI + std::max(0.0, k) * M_PI) / probe;
  const double r_target = 0.5 * std::min(eta, std::exp(-probe));

  OscillatorParams p;
  p.m = 1.0;
  p.hbar = 1.0;
  p.gamma = 1.0;
  p.omega = std::sqrt(1.0 + eta * eta);
  // invert r = eta sqrt(1 - (hbar omega / 2kT)^2) for kT
  const double ratio2 = 1.0 - (r_target / eta) * (r_target / eta);
  p.kT = p.hbar * p.omega / (2.0 * std::sqrt(ratio2));
  p.validate();

  out.params = p;
  out.chi = p.kT / (p.hbar * p.gamma);
  out.cond4 = probe * out.chi;
  out.s_at_u_star = criterion(p, probe);

  if (out.chi < chi_min)
    throw GateError("long_time_violation_scan", "kT/(hbar Gamma) >= chi_min",
                    "constructed chi too small");
  if (!(out.s_at_u_star > 0.0))
    throw GateError("long_time_violation_scan", "s(u_star) > 0",
                    "criterion not positive at the target time");
  return out;
}

}  // namespace qbrown::qbe
