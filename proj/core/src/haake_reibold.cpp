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

#include "qbrown/haake_reibold.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

#include "qbrown/numerics.hpp"

namespace qbrown::hr {

HrSolved solve_gamma_omega(const HrModelParams& p) {
  p.validate();
  const double alpha = p.alpha, kappa = p.kappa, w0 = p.omega0;
  const double w2 = p.omega2();

  // The pair of implicit equations is equivalent to -Gamma +- i Omega being
  // the complex roots of z^3 + alpha z^2 + omega0^2 z + alpha omega^2 (the
  // real root is then -(alpha - 2 Gamma) from the trace).  Solve the cubic
  // for the seed, then polish both residuals with damped Newton.
  Eigen::Matrix3d companion;
  companion << 0.0, 0.0, -alpha * w2,
               1.0, 0.0, -w0 * w0,
               0.0, 1.0, -alpha;
  Eigen::EigenSolver<Eigen::Matrix3d> es(companion);
  double G = -1.0, Om = -1.0;
  for (int i = 0; i < 3; ++i) {
    const Complex z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z))) {
      G = -z.real();
      Om = std::abs(z.imag());
      break;
    }
  }
  if (G < 0.0)
    throw GateError("haake_reibold", "physical branch",
                    "no underdamped root (Omega^2 <= 0 everywhere)");

  auto residuals = [&](double g, double om, double* f1, double* f2) {
    *f1 = g * ((alpha - g) * (alpha - g) + om * om) - 0.5 * kappa * alpha * alpha;
    *f2 = om * om - alpha * w2 / (alpha - 2.0 * g) + g * g;
  };

  for (int it = 0; it < 60; ++it) {
    double f1, f2;
    residuals(G, Om, &f1, &f2);
    const double scale = std::max({1.0, std::abs(G), Om * Om});
    if (std::abs(f1) < 1e-13 * scale && std::abs(f2) < 1e-13 * scale) break;
    const double am = alpha - G;
    const double j11 = am * am + Om * Om - 2.0 * G * am;
    const double j12 = 2.0 * G * Om;
    const double j21 =
        -2.0 * alpha * w2 / ((alpha - 2.0 * G) * (alpha - 2.0 * G)) + 2.0 * G;
    const double j22 = 2.0 * Om;
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) break;
    const double dG = (f1 * j22 - f2 * j12) / det;
    const double dOm = (j11 * f2 - j21 * f1) / det;
    double damp = 1.0;
    while (damp > 1e-4 && (G - damp * dG <= 0.0 || Om - damp * dOm <= 0.0))
      damp *= 0.5;
    G -= damp * dG;
    Om -= damp * dOm;
  }

  HrSolved out;
  out.Gamma = G;
  out.Omega = Om;
  out.omega = std::sqrt(w2);
  residuals(G, Om, &out.residual1, &out.residual2);

  if (!(G > 0.0 && Om > 0.0 && alpha - 2.0 * G > 0.0))
    throw GateError("haake_reibold", "physical branch",
                    "root outside 0 < Gamma, 0 < Omega, alpha > 2 Gamma");
  if (alpha < 3.0 * G)
    throw GateError("haake_reibold", "alpha >= 3 Gamma",
                    "solved Gamma violates the cutoff bound");
  return out;
}

ResponseFunction::ResponseFunction(const HrModelParams& p, const HrSolved& s) {
  const double G = s.Gamma, Om = s.Omega, alpha = p.alpha;
  const double den = (alpha - 3.0 * G) * (alpha - 3.0 * G) + Om * Om;
  const double beta = (alpha - 2.0 * G) * (alpha - 2.0 * G) + Om * Om - G * G;
  z_[0] = Complex(-G, Om);
  z_[1] = Complex(-G, -Om);
  z_[2] = Complex(2.0 * G - alpha, 0.0);
  a_[0] = Complex(-G, -beta / (2.0 * Om)) / den;
  a_[1] = std::conj(a_[0]);
  a_[2] = Complex(2.0 * G / den, 0.0);
}

double ResponseFunction::deriv(double t, int k) const {
  Complex acc(0.0, 0.0);
  for (int j = 0; j < 3; ++j) {
    Complex zk(1.0, 0.0);
    for (int i = 0; i < k; ++i) zk *= z_[j];
    acc += a_[j] * zk * std::exp(z_[j] * t);
  }
  return acc.real();
}

double ResponseFunction::R2(double t) const {
  const double ad = deriv(t, 1);
  return ad * ad - deriv(t, 0) * deriv(t, 2);
}

// ---------------------------------------------------------------------------
// Frequency integrals

namespace {

// (hbar/2) f(w)/w coth(hbar w / 2kT), finite as w -> 0
double weight_fn(const HrModelParams& p, double w) {
  const double f_over_w =
      (2.0 / M_PI) * p.kappa * p.alpha * p.alpha * w / (p.alpha * p.alpha + w * w);
  const double x = p.hbar * w / (2.0 * p.kT);
  double coth;
  if (x < 1e-4)
    coth = 1.0 / x + x / 3.0;
  else
    coth = 1.0 / std::tanh(x);
  return 0.5 * p.hbar * f_over_w * coth;
}

// The inner time integrals split as G = e^{iwt} P - Q with
//   P = sum_j a_j e^{z_j t} / (z_j + iw),  Q = sum_j a_j / (z_j + iw)
// (and the same with a_j z_j for the Adot integral H), so every frequency
// integrand is a smooth part plus Re(e^{iwt} * osc(w)) with osc rational.
struct SplitParts {
  Complex P, Q, Ph, Qh;
};

SplitParts parts_at(const ResponseFunction& resp, double t, double w) {
  SplitParts out{{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  for (int j = 0; j < 3; ++j) {
    const Complex z = resp.exponents()[j];
    const Complex a = resp.amplitudes()[j];
    const Complex d = z + Complex(0.0, w);
    const Complex growth = a * std::exp(z * t) / d;
    out.P += growth;
    out.Q += a / d;
    out.Ph += z * growth;
    out.Qh += a * z / d;
  }
  return out;
}

// integrand(w) = smooth(w) + Re(e^{iwt} osc(w)): the smooth part is
// integrated over the whole half-line, the oscillation is resolved up to a
// cutoff and the remaining tail closed with two integration-by-parts
// boundary terms (osc decays like 1/w^3, so the dropped remainder is
// third order in 1/(t w_c)).
double integrate_split(const std::function<double(double)>& smooth,
                       const std::function<Complex(double)>& osc, double t,
                       double w_cut, double rtol) {
  const double inf = std::numeric_limits<double>::infinity();
  auto full = [&](double w) {
    return smooth(w) + (std::exp(Complex(0.0, w * t)) * osc(w)).real();
  };
  const double head = adaptive_quad(full, 0.0, w_cut, rtol, 40000);
  const double tail_smooth = adaptive_quad(smooth, w_cut, inf, rtol, 40000);

  const double hfd = 1e-5 * w_cut;
  const Complex o = osc(w_cut);
  const Complex op = (osc(w_cut + hfd) - osc(w_cut - hfd)) / (2.0 * hfd);
  const Complex phase = std::exp(Complex(0.0, w_cut * t));
  const Complex tail_osc =
      phase * (Complex(0.0, 1.0) * o / t - op / (t * t));
  return head + tail_smooth + tail_osc.real();
}

}  // namespace

XyValues xy_integrals(const HrModelParams& p, const HrSolved& s,
                      const ResponseFunction& resp, double t,
                      double quad_rtol) {
  if (t < 0.0) throw std::invalid_argument("xy_integrals: t >= 0 required");
  XyValues out;
  if (t == 0.0) return out;

  const double Ad_t = resp.deriv(t, 1);
  // resolve the e^{iwt} oscillation up to the cutoff; past it the physical
  // weights have no features and the tail is handled analytically
  const double w_cut = std::max({8.0 * p.alpha, 2.0 * p.kT / p.hbar + 10.0,
                                 4.0 * (s.Omega + s.Gamma) + 10.0, 60.0 / t});

  auto W = [&p](double w) { return weight_fn(p, w); };

  out.X = integrate_split(
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return W(w) * (std::norm(c.P) + std::norm(c.Q));
      },
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return Complex(-2.0 * W(w)) * (c.P * std::conj(c.Q));
      },
      t, w_cut, quad_rtol);

  out.Y = integrate_split(
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return W(w) * (std::norm(c.Ph) + std::norm(c.Qh));
      },
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return Complex(-2.0 * W(w)) * (c.Ph * std::conj(c.Qh));
      },
      t, w_cut, quad_rtol);

  // Xdot = int W * 2 Re(conj(G) H), using e^{iwt} A(t) = H + iwG (A(0) = 0)
  out.Xdot = integrate_split(
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return 2.0 * W(w) *
               (std::conj(c.P) * c.Ph + std::conj(c.Q) * c.Qh).real();
      },
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return Complex(-2.0 * W(w)) *
               (c.P * std::conj(c.Qh) + std::conj(c.Q) * c.Ph);
      },
      t, w_cut, quad_rtol);

  out.Ydot = integrate_split(
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return 2.0 * Ad_t * W(w) * std::conj(c.Ph).real();
      },
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        return Complex(-2.0 * Ad_t * W(w)) * std::conj(c.Qh);
      },
      t, w_cut, quad_rtol);

  // Xddot = int W * 2 [ |H|^2 + w Im(conj(G) H) + Adot Re(conj(G) e^{iwt}) ]
  out.Xddot = integrate_split(
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        const double h2 = std::norm(c.Ph) + std::norm(c.Qh);
        const double im = (std::conj(c.P) * c.Ph + std::conj(c.Q) * c.Qh).imag();
        return 2.0 * W(w) * (h2 + w * im + Ad_t * std::conj(c.P).real());
      },
      [&](double w) {
        const SplitParts c = parts_at(resp, t, w);
        Complex o = -4.0 * (c.Ph * std::conj(c.Qh));               // |H|^2 part
        o += Complex(0.0, -2.0 * w) *
             (c.P * std::conj(c.Qh) - std::conj(c.Q) * c.Ph);      // w Im part
        o += -2.0 * Ad_t * std::conj(c.Q);                          // Adot part
        return Complex(W(w)) * o;
      },
      t, w_cut, quad_rtol);

  return out;
}

std::vector<HrCoefficientsAt> hr_coeffs(const HrModelParams& p,
                                        const TimeGrid& grid,
                                        double quad_rtol) {
  p.validate();
  grid.validate();
  const HrSolved s = solve_gamma_omega(p);
  const ResponseFunction resp(p, s);

  // transcription gates: A(0) = 0 and R(0) = 1 (= Adot(0)^2 - A(0) Addot(0))
  if (std::abs(resp.A(0.0)) > 1e-10)
    throw GateError("haake_reibold", "A(0)=0",
                    "response does not vanish at t = 0");
  if (std::abs(resp.R2(0.0) - 1.0) > 1e-8)
    throw GateError("haake_reibold", "R(0)=1",
                    "Adot(0)^2 - A(0) Addot(0) != 1");

  std::vector<HrCoefficientsAt> table;
  table.reserve(grid.values.size());
  for (double t : grid.values) {
    HrCoefficientsAt c;
    c.t = t;
    c.A = resp.deriv(t, 0);
    c.Adot = resp.deriv(t, 1);
    c.Addot = resp.deriv(t, 2);
    c.Atdot = resp.deriv(t, 3);
    const double R2 = c.Adot * c.Adot - c.A * c.Addot;
    if (!(R2 > 0.0 && R2 <= 1.0 + 1e-10))
      throw GateError("haake_reibold", "0 < R^2 <= 1",
                      "R^2 out of range at t = " + std::to_string(t));
    c.R = std::sqrt(R2);

    const XyValues xy = xy_integrals(p, s, resp, t, quad_rtol);
    c.X = xy.X;
    c.Y = xy.Y;
    c.Xdot = xy.Xdot;
    c.Ydot = xy.Ydot;
    c.Xddot = xy.Xddot;

    c.f_pq = -(c.Addot * c.Addot - c.Adot * c.Atdot) / R2;
    c.f_pp = -(c.A * c.Atdot - c.Adot * c.Addot) / R2;
    c.d_pp = 0.5 * c.Ydot - 0.5 * c.f_pq * c.Xdot - c.f_pp * c.Y;
    c.d_pq = -c.Y + 0.5 * c.Xddot - 0.5 * c.f_pp * c.Xdot - c.f_pq * c.X;
    table.push_back(c);
  }
  return table;
}

wn::MasterEqCoefficients to_master_eq(const HrModelParams& p,
                                      const std::vector<HrCoefficientsAt>& table,
                                      const TimeGrid& grid) {
  if (table.size() != grid.values.size())
    throw std::invalid_argument("to_master_eq: table/grid size mismatch");
  const size_t n = table.size();
  const double dt = (grid.values.back() - grid.values.front()) /
                    static_cast<double>(n - 1);
  const double h2 = p.hbar * p.hbar;

  // f_pq and f_pp are analytic in the response function; only the diffusion
  // coefficients carry quadrature tables
  const auto solved = solve_gamma_omega(p);
  const auto resp = std::make_shared<ResponseFunction>(p, solved);
  auto f_pq_fn = [resp](double t) {
    const double ad = resp->deriv(t, 1), add = resp->deriv(t, 2);
    return -(add * add - ad * resp->deriv(t, 3)) / resp->R2(t);
  };
  auto f_pp_fn = [resp](double t) {
    const double ad = resp->deriv(t, 1), add = resp->deriv(t, 2);
    return -(resp->deriv(t, 0) * resp->deriv(t, 3) - ad * add) / resp->R2(t);
  };

  std::vector<double> d_pp(n), d_pq(n);
  for (size_t i = 0; i < n; ++i) {
    d_pp[i] = table[i].d_pp;
    d_pq[i] = table[i].d_pq;
  }
  auto d_pp_tab = std::make_shared<CubicTable>(grid.values.front(), dt, std::move(d_pp));
  auto d_pq_tab = std::make_shared<CubicTable>(grid.values.front(), dt, std::move(d_pq));

  // The diffusion coefficients behave like t log t near t = 0 (the frequency
  // integral is cut at 1/t), which a spline on the coarse grid cannot track.
  // A much finer auxiliary table covers the start-up window.
  const double t_fine_end = std::min(0.45 * (grid.values.back() - grid.values.front()),
                                     12.0 * dt);
  const int n_fine = 192;
  const double dt_fine = t_fine_end / n_fine;
  std::vector<double> d_pp_f(static_cast<size_t>(n_fine) + 1);
  std::vector<double> d_pq_f(static_cast<size_t>(n_fine) + 1);
  for (int i = 0; i <= n_fine; ++i) {
    const double t = dt_fine * i;
    const XyValues xy = xy_integrals(p, solved, *resp, t, 1e-10);
    const double fpq = f_pq_fn(t);
    const double fpp = f_pp_fn(t);
    d_pp_f[static_cast<size_t>(i)] = 0.5 * xy.Ydot - 0.5 * fpq * xy.Xdot - fpp * xy.Y;
    d_pq_f[static_cast<size_t>(i)] =
        -xy.Y + 0.5 * xy.Xddot - 0.5 * fpp * xy.Xdot - fpq * xy.X;
  }
  auto d_pp_fine = std::make_shared<CubicTable>(0.0, dt_fine, std::move(d_pp_f));
  auto d_pq_fine = std::make_shared<CubicTable>(0.0, dt_fine, std::move(d_pq_f));
  const double t_switch = t_fine_end - 2.0 * dt_fine;

  wn::MasterEqCoefficients c;
  const double m = p.m, hbar = p.hbar;
  c.b11 = [f_pq_fn, m](double t) { return -0.5 * m * f_pq_fn(t); };
  c.b12 = [f_pp_fn](double t) { return -0.25 * f_pp_fn(t); };
  c.b22 = [m](double) { return 0.5 / m; };
  c.k1 = [d_pp_tab, d_pp_fine, t_switch, m, h2](double t) {
    const double v = (t < t_switch) ? (*d_pp_fine)(t) : (*d_pp_tab)(t);
    return m * v / h2;
  };
  c.k2 = [](double) { return 0.0; };
  c.k3 = [d_pq_tab, d_pq_fine, t_switch, f_pp_fn, hbar, h2](double t) {
    const double v = (t < t_switch) ? (*d_pq_fine)(t) : (*d_pq_tab)(t);
    return Complex(v, 0.5 * hbar * f_pp_fn(t)) / (2.0 * h2);
  };
  return c;
}

wn::WeiNormanState closed_form_w(const HrModelParams& p,
                                 const HrCoefficientsAt& c) {
  const double R2 = c.R * c.R;
  const double h2 = p.hbar * p.hbar;
  wn::WeiNormanState w;
  w.w1 = p.m * c.Y / (2.0 * h2 * R2);
  w.w2 = c.X / (p.m * 2.0 * h2 * R2);
  w.w3 = c.Xdot / (4.0 * h2 * R2);
  w.w4 = -std::log(R2);  // equals -int_0^t f_pp since (R^2)' = f_pp R^2
  return w;
}

Factorization positive_factorization(const ExponentQuadraticForm& form,
                                     double hbar) {
  const double a = form.a, b = form.b;
  const double rec = form.c.real(), imc = form.c.imag();
  if (!(a >= 0.0) || !(b >= 0.0))
    throw std::invalid_argument("positive_factorization: a >= 0 and b >= 0 required");
  const double gap = a * b - rec * rec;
  if (!(gap > 0.0))
    throw std::invalid_argument("positive_factorization: ab - Re^2 c > 0 required");

  Factorization f;
  const double ksum = 2.0 * hbar * std::sqrt(gap);
  const double kdiff = 2.0 * hbar * imc;  // k2 - k1
  f.k1 = 0.5 * (ksum - kdiff);
  f.k2 = 0.5 * (ksum + kdiff);
  if (f.k1 < 0.0 || f.k2 < 0.0) {
    f.ok = false;
    f.reason = "k1 or k2 negative: form is not of the two-generator type";
    return f;
  }

  const double Rp = std::sqrt(a / ksum);
  const double Sp = std::sqrt(b / ksum);
  // phases: cos(phi-theta) = -Re c / (R' S' (k1+k2)), sin(phi-theta) =
  // 1/(2 hbar R' S'), with phi + theta fixed to 0
  const double cosd = -rec / (Rp * Sp * ksum);
  const double sind = 1.0 / (2.0 * hbar * Rp * Sp);
  const double d = std::atan2(sind, cosd);  // in [0, pi] since sind > 0
  const double theta = -0.5 * d;
  const double phi = 0.5 * d;
  f.r = Rp * std::exp(Complex(0.0, theta));
  f.s = Sp * std::exp(Complex(0.0, phi));
  f.ok = true;
  return f;
}

std::pair<double, double> separated_factors(double k1, double k2) {
  const double x = k2 - k1;
  // k2 (e^{2x} - 1)/x with the x -> 0 limit 2 k2
  double ratio;
  if (std::abs(x) < 1e-8)
    ratio = 2.0 + 2.0 * x + (4.0 / 3.0) * x * x;
  else
    ratio = std::expm1(2.0 * x) / x;
  const double L = 0.5 * std::log1p(k2 * ratio);
  return {x - L, -L};  // coefficients of {B,.,B} and {B^dag,.,B^dag}
}

std::pair<double, double> eq46_factors(const HrCoefficientsAt& c, double hbar) {
  const double R2 = c.R * c.R;
  double disc = c.X * c.Y - 0.25 * c.Xdot * c.Xdot;
  // Cauchy-Schwarz guarantees disc >= 0; clip roundoff
  if (disc < 0.0) disc = 0.0;
  const double arg = 1.0 + (std::sqrt(disc) / hbar + 0.5 * (1.0 - R2)) / R2;
  const double cBd = -0.5 * std::log(arg);
  const double cB = -0.5 * std::log(R2) + cBd;
  return {cB, cBd};
}

Eigen::Matrix2d n_map(const HrModelParams& p, const HrSolved& s,
                      const HrCoefficientsAt& c) {
  const double hbar = p.hbar, w = s.omega, m = p.m;
  const double g1 = c.Xdot / hbar;
  const double base = c.Y / (hbar * w) - w * c.X / hbar;
  const double g2 = base + std::hypot(g1, base);
  const double n = std::hypot(g1, g2);
  if (n < 1e-300) return Eigen::Matrix2d::Identity();  // t -> 0 limit
  const double C = g1 / n, D = g2 / n, E = g2 / n, F = -g1 / n;
  Eigen::Matrix2d M;
  M << E, -F / (m * w),
       -m * w * C, D;
  return M;
}

Eigen::Matrix2d m_map(const HrModelParams& p, const HrSolved& s,
                      const HrCoefficientsAt& c) {
  const double hbar = p.hbar, w = s.omega, m = p.m;
  const double g1 = c.Xdot / hbar;
  const double base = c.Y / (hbar * w) - w * c.X / hbar;
  const double g2 = base + std::hypot(g1, base);
  const double n = std::hypot(g1, g2);
  double C, D, E, F;
  if (n < 1e-300) {
    C = 0.0; D = 1.0; E = 1.0; F = 0.0;
  } else {
    C = g1 / n; D = g2 / n; E = g2 / n; F = -g1 / n;
  }
  Eigen::Matrix2d M;
  M << (c.Adot * D + c.Addot * F / w) / c.R,
       (c.A * D + c.Adot * F / w) / (m * c.R),
       m * (w * c.Adot * C + c.Addot * E) / c.R,
       (w * c.A * C + c.Adot * E) / c.R;
  return M;
}

Eigen::Matrix2d nm_combined_map(const HrModelParams& p,
                                const HrCoefficientsAt& c) {
  Eigen::Matrix2d M;
  M << c.Adot / c.R, c.A / (p.m * c.R),
       p.m * c.Addot / c.R, c.Adot / c.R;
  return M;
}

}  // namespace qbrown::hr
