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

#include "qbrown/witness.hpp"

#include <cmath>

#include "qbrown/numerics.hpp"

namespace qbrown::witness {

namespace {

// K = hbar (1 - e^{-x})/(2 Im zeta) = 2 hbar^2 (1 - e^{-x})/x, x = 4 hbar Im zeta
double offset_kernel(double im_zeta, double hbar) {
  const double x = 4.0 * hbar * im_zeta;
  return 2.0 * hbar * hbar * expm1_ratio(x);
}

}  // namespace

MomentMap lemma_moment_map(const LemmaForm& form, double hbar) {
  const double x = 4.0 * hbar * form.zeta.imag();
  const double K = offset_kernel(form.zeta.imag(), hbar);
  MomentMap m;
  m.scale = std::exp(-x);
  m.offset = Eigen::Vector3d(K * form.xi, K * form.eta, 2.0 * K * form.zeta.real());
  return m;
}

LemmaForm form_from_moment_map(const MomentMap& map, double hbar) {
  if (!(map.scale > 0.0))
    throw std::invalid_argument("form_from_moment_map: scale must be positive");
  LemmaForm f;
  const double x = -std::log(map.scale);
  const double im = x / (4.0 * hbar);
  const double K = offset_kernel(im, hbar);
  f.xi = map.offset[0] / K;
  f.eta = map.offset[1] / K;
  f.zeta = Complex(map.offset[2] / (2.0 * K), im);
  return f;
}

SecondMoments lemma_moments(const LemmaForm& form, const SecondMoments& sigma,
                            double hbar) {
  form.validate();
  return lemma_moment_map(form, hbar).apply(sigma);
}

double lemma_mean_scale(const LemmaForm& form, double hbar) {
  return std::exp(-2.0 * hbar * form.zeta.imag());
}

bool theorem_hypotheses_hold(const LemmaForm& form, std::string* why) {
  const double re = form.zeta.real(), im = form.zeta.imag();
  const double gap = form.eta * form.xi - re * re;
  if (!(im > 0.0)) {
    if (why) *why = "Im zeta <= 0";
    return false;
  }
  if (!(form.eta > 0.0)) {
    if (why) *why = "eta_form <= 0";
    return false;
  }
  if (gap < 0.0) {
    if (why) *why = "eta xi - Re^2 zeta < 0";
    return false;
  }
  if (!(gap < im * im)) {
    if (why) *why = "eta xi - Re^2 zeta >= Im^2 zeta";
    return false;
  }
  return true;
}

double choose_lambda2(const LemmaForm& form, double hbar) {
  std::string why;
  if (!theorem_hypotheses_hold(form, &why))
    throw GateError("witness", "hypotheses (81)", why);

  const double eta = form.eta, xi = form.xi;
  const double re = form.zeta.real(), im = form.zeta.imag();
  const double prod = eta * xi;
  const double scale = std::max({1.0, prod, re * re, im * im});

  if (std::abs(re) * std::abs(re) <= 1e-15 * scale) {
    // Re zeta = 0: lambda_2 = 0 works both for eta*xi = 0 and for
    // 0 < eta*xi < Im^2 zeta, where d_p = hbar^2 (Im^2 zeta - eta xi) > 0.
    return 0.0;
  }

  // Re zeta != 0.  Work with x = hbar Im zeta + lambda_2 Re zeta and the
  // quadratic (Re^2 - eta xi) x^2 + 2 eta xi hbar Im zeta x - eta xi hbar^2 |zeta|^2,
  // positive on an open window of admissible x.  Within the window, pick the
  // x closest to hbar Im zeta: that minimizes |lambda_2|, and the witness
  // state's irreducible occupation is (sqrt(1 + (lambda_2/hbar)^2) - 1)/2,
  // so the smallest |lambda_2| keeps the Fock-space oracle well conditioned.
  const double a = re * re - prod;
  double x;
  if (std::abs(a) <= 1e-14 * scale) {
    // boundary case Re^2 zeta = eta xi: need x > hbar |zeta|^2 / (2 Im zeta)
    const double bound = 0.5 * hbar * std::norm(form.zeta) / im;
    x = std::max(2.0 * bound, hbar * im);
  } else {
    // a < 0 (concave down) with both roots positive
    const double disc = prod * hbar * hbar * re * re *
                        (std::norm(form.zeta) - prod);
    const double root = std::sqrt(std::max(disc, 0.0));
    const double x_lo = (-prod * hbar * im + root) / a;  // a < 0: smaller root
    const double x_hi = (-prod * hbar * im - root) / a;
    const double margin = 0.1 * (x_hi - x_lo);
    x = std::clamp(hbar * im, x_lo + margin, x_hi - margin);
  }
  return (x - hbar * im) / re;
}

WitnessConstruction build_witness(const LemmaForm& form, double hbar) {
  std::string why;
  if (!theorem_hypotheses_hold(form, &why))
    throw GateError("witness", "Eq. (81) fails", why);

  const double eta = form.eta, xi = form.xi;
  const double re = form.zeta.real(), im = form.zeta.imag();

  WitnessConstruction wc;
  wc.lambda2 = choose_lambda2(form, hbar);

  const double x = hbar * im + wc.lambda2 * re;
  wc.d_p = x * x - eta * xi * (hbar * hbar + wc.lambda2 * wc.lambda2);
  if (!(wc.d_p > 0.0))
    throw GateError("witness", "Eq. (83)", "d_p <= 0 for the chosen lambda2");
  if (!(x > 0.0))
    throw GateError("witness", "Eq. (84)", "hbar Im zeta + lambda2 Re zeta <= 0");

  const double root = std::sqrt(wc.d_p);
  wc.s_minus = (x - root) / (2.0 * eta);
  wc.s_plus = (x + root) / (2.0 * eta);
  if (wc.s_minus < -1e-14 || !(wc.s_plus > 0.0))
    throw GateError("witness", "Eq. (89)", "roots s_-/s_+ out of range");

  wc.lambda1 = 0.5 * (wc.s_minus + wc.s_plus);
  wc.lambda3 = (hbar * hbar + wc.lambda2 * wc.lambda2) / (4.0 * wc.lambda1);

  // strict negativity of the quadratic at the midpoint of its roots
  const double q91 = eta * wc.lambda1 * wc.lambda1 - x * wc.lambda1 +
                     0.25 * xi * (hbar * hbar + wc.lambda2 * wc.lambda2);
  if (!(q91 < 0.0)) throw GateError("witness", "Eq. (91)", "quadratic not negative");

  const double ex = std::exp(-4.0 * hbar * im);
  const double ratio = (1.0 - ex) / im;
  const double w92 = 2.0 * hbar * ex * ratio * (x - eta * wc.lambda1 - xi * wc.lambda3);
  if (!(w92 > 0.0)) throw GateError("witness", "Eq. (92)", "w <= 0");

  // evolved <p^2> coefficient, the bracket of Eq. (93)
  const double P3 = ex * wc.lambda3 + 0.5 * hbar * ratio * eta;
  wc.lambda = (hbar + std::sqrt(w92)) / (2.0 * P3);

  // root membership in the quadratic of Eq. (94)
  const double res94 = P3 * wc.lambda * wc.lambda - hbar * wc.lambda +
                       (hbar * hbar - w92) / (4.0 * P3);
  if (std::abs(res94) > 1e-9 * std::max(1.0, std::abs(P3 * wc.lambda * wc.lambda)))
    throw GateError("witness", "Eq. (94)", "lambda is not a root");

  // quadratic in beta from the evolved moments
  const double P2 = ex * wc.lambda2 + hbar * ratio * re;
  const double C = P3 * wc.lambda * wc.lambda - hbar * wc.lambda + ex * wc.lambda1 +
                   0.5 * hbar * ratio * xi;
  const double disc = P2 * P2 - 4.0 * P3 * C;
  if (!(disc > 0.0)) throw GateError("witness", "Eq. (100)", "discriminant <= 0");

  wc.beta_bar = -0.5 * P2 / P3;  // midpoint of the two real roots
  wc.I_value = P3 * wc.beta_bar * wc.beta_bar + P2 * wc.beta_bar + C;
  if (!(wc.I_value < 0.0)) throw GateError("witness", "I < 0", "I(beta_bar) >= 0");

  wc.sigma.mean_q = 0.0;
  wc.sigma.mean_p = 0.0;
  wc.sigma.cov_qq = wc.lambda1;
  wc.sigma.cov_pp = wc.lambda3;
  wc.sigma.cov_qp = 0.5 * wc.lambda2;
  return wc;
}

double witness_value(const LemmaForm& form, const SecondMoments& sigma,
                     double beta, double lambda, double hbar) {
  const SecondMoments m = lemma_moment_map(form, hbar).apply(sigma);
  return m.q2 + beta * m.qp_sym + (beta * beta + lambda * lambda) * m.p2 -
         lambda * hbar;
}

}  // namespace qbrown::witness
