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

#include "qbrown/positivity.hpp"

#include <cmath>

namespace qbrown::pos {

SymplecticMap2 SymplecticMap2::random(Rng& rng) {
  SymplecticMap2 s;
  // a bounded away from zero so D = (1 + BC)/A stays moderate
  s.A = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 2.0);
  s.B = rng.uniform(-1.5, 1.5);
  s.C = rng.uniform(-1.5, 1.5);
  s.D = (1.0 + s.B * s.C) / s.A;
  return s;
}

UVector w_to_u(const wn::WeiNormanState& w, double eta, double hbar) {
  if (!(eta > 0.0)) throw std::invalid_argument("w_to_u: eta must be positive");
  UVector u;
  u.eta_scale = eta;
  u.u1 = 0.5 * hbar * (w.w1 / eta + eta * w.w2);
  u.u2 = 0.5 * hbar * (w.w1 / eta - eta * w.w2);
  u.u3 = hbar * w.w3;
  u.u4 = 0.25 * std::expm1(w.w4);
  return u;
}

double minkowski_norm(const UVector& u) {
  return u.u1 * u.u1 - u.u2 * u.u2 - u.u3 * u.u3 - u.u4 * u.u4;
}

double u_dot_h(const UVector& u, const HVector& h) {
  return u.u1 * h.h1 - u.u2 * h.h2 - u.u3 * h.h3 - u.u4 * h.h4;
}

bool condition_47(const wn::WeiNormanState& w, double hbar, double tol) {
  const double edge = std::expm1(w.w4) / (4.0 * hbar);
  return w.w1 >= -tol && w.w2 >= -tol &&
         w.w1 * w.w2 - w.w3 * w.w3 - edge * edge >= -tol;
}

namespace {

HVector h_at(const wn::MasterEqCoefficients& c, double t, double eta,
             double hbar) {
  const Complex k3 = c.k3(t);
  HVector h;
  h.h1 = (c.k1(t) / eta + eta * c.k2(t)) / hbar;
  h.h2 = (c.k1(t) / eta - eta * c.k2(t)) / hbar;
  h.h3 = 2.0 * k3.real() / hbar;
  h.h4 = -2.0 * k3.imag() / hbar;  // i (k3 - k4)
  return h;
}

}  // namespace

UTrajectory integrate_u(const wn::MasterEqCoefficients& coeffs, double eta,
                        const TimeGrid& grid, double hbar, double rtol) {
  if (!(eta > 0.0)) throw std::invalid_argument("integrate_u: eta must be positive");
  if (std::abs(grid.values.front()) > 0.0)
    throw std::invalid_argument("integrate_u: grid must start at t0 = 0");

  auto rhs = [&coeffs, eta, hbar](double t, const Vector& y) {
    const double b11 = coeffs.b11(t), b12 = coeffs.b12(t), b22 = coeffs.b22(t);
    const Complex k3 = coeffs.k3(t);
    const double a = -b11 / eta + eta * b22;
    const double b = -b11 / eta - eta * b22;
    Eigen::Matrix3d A;
    A << 0.0, -2.0 * b12, a,
         -2.0 * b12, 0.0, b,
         a, -b, 0.0;
    A *= 2.0;
    const double ew4 = std::exp(y[3]);
    const Eigen::Vector3d inhom(coeffs.k1(t) / eta + eta * coeffs.k2(t),
                                coeffs.k1(t) / eta - eta * coeffs.k2(t),
                                2.0 * k3.real());
    const Eigen::Vector3d d =
        A * Eigen::Vector3d(y[0], y[1], y[2]) + 0.5 * hbar * ew4 * inhom;
    Vector dy(4);
    dy << d[0], d[1], d[2], -4.0 * hbar * k3.imag();
    return dy;
  };

  const std::vector<Vector> ys =
      rk_integrate(rhs, Vector::Zero(4), grid, rtol);

  UTrajectory traj;
  traj.eta_scale = eta;
  traj.t = grid.values;
  traj.u.reserve(ys.size());
  traj.h.reserve(ys.size());
  traj.w4.reserve(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) {
    const Vector& y = ys[i];
    UVector u;
    u.eta_scale = eta;
    u.u1 = y[0];
    u.u2 = y[1];
    u.u3 = y[2];
    u.u4 = 0.25 * std::expm1(y[3]);
    traj.u.push_back(u);
    traj.h.push_back(h_at(coeffs, traj.t[i], eta, hbar));
    traj.w4.push_back(y[3]);
  }
  return traj;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::marginal: return "marginal";
    default: return "fail";
  }
}

namespace {

Verdict verdict_of(double value, double band) {
  if (std::abs(value) < band) return Verdict::marginal;
  return value > 0.0 ? Verdict::pass : Verdict::fail;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::marginal || b == Verdict::marginal) return Verdict::marginal;
  return Verdict::pass;
}

bool holds(Verdict v) { return v != Verdict::fail; }

}  // namespace

SufficientReport sufficient_checks(const UTrajectory& traj, double hbar,
                                   double band) {
  const size_t n = traj.t.size();
  SufficientReport rep;
  rep.t = traj.t;
  rep.norm.resize(n);
  rep.integral.resize(n);
  rep.pointwise.resize(n);
  rep.cond54.resize(n);
  rep.cond49_54.resize(n);
  rep.cond56_54.resize(n);
  rep.cond57_54.resize(n);

  // weight exp(2 hbar^2 int h4) accumulated by trapezoid; checked against
  // e^{w4} (they agree identically when h4 = i(k3 - k4)/hbar)
  double int_h4 = 0.0;
  double integral = 0.0;
  double prev_g = 0.0;
  bool pointwise_prefix = true;  // (57) held at every sampled time so far
  for (size_t i = 0; i < n; ++i) {
    const UVector& u = traj.u[i];
    const double udh = u_dot_h(u, traj.h[i]);
    const double weight = std::exp(traj.w4[i]);
    const double g = weight * udh;
    if (i > 0) {
      const double dt = traj.t[i] - traj.t[i - 1];
      integral += 0.5 * dt * (prev_g + g);
      int_h4 += 0.5 * dt * (traj.h[i - 1].h4 + traj.h[i].h4);
    }
    prev_g = g;
    rep.weight_consistency = std::max(
        rep.weight_consistency,
        std::abs(2.0 * hbar * hbar * int_h4 - traj.w4[i]));

    rep.norm[i] = minkowski_norm(u);
    rep.integral[i] = integral;
    rep.pointwise[i] = udh;

    const Verdict c54 = verdict_of(u.u1 - std::abs(u.u2), band);
    rep.cond54[i] = c54;
    rep.cond49_54[i] = combine(c54, verdict_of(rep.norm[i], band));
    rep.cond56_54[i] = combine(c54, verdict_of(integral, band));
    rep.cond57_54[i] = combine(c54, verdict_of(udh, band));

    // Implication audit.  The norm equals hbar^2 * integral identically, so
    // B at t forces A at t; pointwise (57) holding on the whole prefix
    // forces B.  Numerical slack covers the trapezoid error of `integral`.
    const double slack =
        std::abs(rep.norm[i] - hbar * hbar * integral) + 10.0 * band;
    if (!holds(rep.cond57_54[i])) pointwise_prefix = false;
    if (pointwise_prefix && holds(rep.cond54[i]) && integral < -slack)
      rep.implication_audit_ok = false;
    if (holds(rep.cond56_54[i]) && rep.norm[i] < -slack)
      rep.implication_audit_ok = false;
  }
  return rep;
}

wn::WeiNormanState metaplectic_transform_w(const wn::WeiNormanState& w,
                                           const SymplecticMap2& S) {
  S.validate();
  wn::WeiNormanState out;
  out.w1 = S.A * S.A * w.w1 + S.C * S.C * w.w2 - 2.0 * S.A * S.C * w.w3;
  out.w2 = S.B * S.B * w.w1 + S.D * S.D * w.w2 - 2.0 * S.B * S.D * w.w3;
  out.w3 = -S.A * S.B * w.w1 - S.C * S.D * w.w2 + (S.A * S.D + S.B * S.C) * w.w3;
  out.w4 = w.w4;
  return out;
}

}  // namespace qbrown::pos
