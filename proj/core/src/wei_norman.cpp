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

#include "qbrown/wei_norman.hpp"

#include <cmath>
#include <memory>

namespace qbrown::wn {

MasterEqCoefficients MasterEqCoefficients::constants(double b11, double b12,
                                                     double b22, double k1,
                                                     double k2, Complex k3) {
  MasterEqCoefficients c;
  c.b11 = [b11](double) { return b11; };
  c.b12 = [b12](double) { return b12; };
  c.b22 = [b22](double) { return b22; };
  c.k1 = [k1](double) { return k1; };
  c.k2 = [k2](double) { return k2; };
  c.k3 = [k3](double) { return k3; };
  return c;
}

MasterEqCoefficients MasterEqCoefficients::from_tables(
    double t0, double dt, std::vector<double> b11, std::vector<double> b12,
    std::vector<double> b22, std::vector<double> k1, std::vector<double> k2,
    std::vector<Complex> k3) {
  MasterEqCoefficients c;
  auto wrap = [t0, dt](std::vector<double> v) {
    auto tab = std::make_shared<CubicTable>(t0, dt, std::move(v));
    return [tab](double t) { return (*tab)(t); };
  };
  c.b11 = wrap(std::move(b11));
  c.b12 = wrap(std::move(b12));
  c.b22 = wrap(std::move(b22));
  c.k1 = wrap(std::move(k1));
  c.k2 = wrap(std::move(k2));
  std::vector<double> k3re(k3.size()), k3im(k3.size());
  for (size_t i = 0; i < k3.size(); ++i) {
    k3re[i] = k3[i].real();
    k3im[i] = k3[i].imag();
  }
  auto re = std::make_shared<CubicTable>(t0, dt, std::move(k3re));
  auto im = std::make_shared<CubicTable>(t0, dt, std::move(k3im));
  c.k3 = [re, im](double t) { return Complex((*re)(t), (*im)(t)); };
  return c;
}

namespace {

// Homogeneous system matrix of the (w1, w2, w3) equations.
Eigen::Matrix3d w_system_matrix(const MasterEqCoefficients& c, double t) {
  const double b11 = c.b11(t), b12 = c.b12(t), b22 = c.b22(t);
  Eigen::Matrix3d A;
  A << -2.0 * b12, 0.0, -2.0 * b11,
       0.0, 2.0 * b12, 2.0 * b22,
       b22, -b11, 0.0;
  return 2.0 * A;
}

}  // namespace

WnTrajectory integrate_w(const MasterEqCoefficients& coeffs,
                         const TimeGrid& grid, double hbar, double rtol) {
  if (std::abs(grid.values.front()) > 0.0)
    throw std::invalid_argument("integrate_w: grid must start at t0 = 0 (w(0) = 0)");

  auto rhs = [&coeffs, hbar](double t, const Vector& y) {
    const Eigen::Matrix3d A = w_system_matrix(coeffs, t);
    const Complex k3 = coeffs.k3(t);
    const double ew4 = std::exp(y[3]);
    Vector dy(4);
    const Eigen::Vector3d w123(y[0], y[1], y[2]);
    const Eigen::Vector3d inhom(coeffs.k1(t), coeffs.k2(t), k3.real());
    const Eigen::Vector3d d = A * w123 + ew4 * inhom;
    dy[0] = d[0];
    dy[1] = d[1];
    dy[2] = d[2];
    dy[3] = -4.0 * hbar * k3.imag();  // = 2 i hbar (k3 - k4)
    return dy;
  };

  const Vector y0 = Vector::Zero(4);
  const std::vector<Vector> ys = rk_integrate(rhs, y0, grid, rtol);

  WnTrajectory traj;
  traj.t = grid.values;
  traj.w.reserve(ys.size());
  for (const Vector& y : ys)
    traj.w.push_back({y[0], y[1], y[2], y[3]});
  return traj;
}

double check_identity_24(const MasterEqCoefficients& coeffs,
                         const WnTrajectory& traj, double hbar) {
  (void)hbar;
  const size_t n = traj.t.size();
  if (n < 3) throw std::invalid_argument("check_identity_24: trajectory too short");

  // integrand g(t) = e^{w4} [k1 w2 + k2 w1 - (k3+k4) w3] on the samples
  std::vector<double> g(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = traj.t[i];
    const WeiNormanState& w = traj.w[i];
    const Complex k3 = coeffs.k3(t);
    g[i] = std::exp(w.w4) *
           (coeffs.k1(t) * w.w2 + coeffs.k2(t) * w.w1 - 2.0 * k3.real() * w.w3);
  }

  // integral of the quadratic through (x0,f0), (x1,f1), (x2,f2) over [x1, x2]
  auto quad_tail = [](double x0, double x1, double x2, double f0, double f1,
                      double f2) {
    auto basis = [x1, x2](double a, double b) {
      // int_{x1}^{x2} (x - a)(x - b) dx
      const double i2 = (x2 * x2 * x2 - x1 * x1 * x1) / 3.0;
      const double i1 = 0.5 * (x2 * x2 - x1 * x1);
      const double i0 = x2 - x1;
      return i2 - (a + b) * i1 + a * b * i0;
    };
    return f0 * basis(x1, x2) / ((x0 - x1) * (x0 - x2)) +
           f1 * basis(x0, x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * basis(x0, x1) / ((x2 - x0) * (x2 - x1));
  };

  // cumulative composite Simpson on even indices; odd indices close the last
  // interval with the quadratic-fit rule so every grid point is fourth order
  std::vector<double> integral(n, 0.0);
  integral[1] = quad_tail(traj.t[2], traj.t[0], traj.t[1], g[2], g[0], g[1]);
  for (size_t i = 2; i < n; ++i) {
    if (i % 2 == 0) {
      const double h1 = traj.t[i - 1] - traj.t[i - 2];
      const double h2 = traj.t[i] - traj.t[i - 1];
      const double h = h1 + h2;
      const double a = (2.0 - h2 / h1) * h / 6.0;
      const double b = h * h * h / (6.0 * h1 * h2);
      const double c = (2.0 - h1 / h2) * h / 6.0;
      integral[i] = integral[i - 2] + a * g[i - 2] + b * g[i - 1] + c * g[i];
    } else {
      integral[i] = integral[i - 1] + quad_tail(traj.t[i - 2], traj.t[i - 1],
                                                traj.t[i], g[i - 2], g[i - 1],
                                                g[i]);
    }
  }

  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const WeiNormanState& w = traj.w[i];
    const double lhs = w.w1 * w.w2 - w.w3 * w.w3;
    const double resid = std::abs(lhs - integral[i]) / std::max(1.0, std::abs(lhs));
    worst = std::max(worst, resid);
  }
  return worst;
}

Matrix principal_matrix(const MasterEqCoefficients& coeffs, double t, double s,
                        double rtol) {
  if (s > t) throw std::invalid_argument("principal_matrix: requires s <= t");
  if (t == s) return Matrix::Identity(3, 3);

  // integrate the three columns together as a 9-dim system
  auto rhs = [&coeffs](double tau, const Vector& y) {
    const Eigen::Matrix3d A = w_system_matrix(coeffs, tau);
    Eigen::Matrix3d M;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) M(r, c) = y[3 * c + r];
    const Eigen::Matrix3d D = A * M;
    Vector dy(9);
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) dy[3 * c + r] = D(r, c);
    return dy;
  };
  Vector y0(9);
  y0.setZero();
  y0[0] = y0[4] = y0[8] = 1.0;
  const int n = std::max(16, static_cast<int>(std::ceil((t - s) * 32)));
  const std::vector<Vector> ys = rk_integrate(rhs, y0, TimeGrid::uniform(s, t, n), rtol);
  Matrix P(3, 3);
  const Vector& y = ys.back();
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) P(r, c) = y[3 * c + r];
  return P;
}

RiccatiResult riccati_reduce(const MasterEqCoefficients& coeffs,
                             const TimeGrid& grid, int branch,
                             const Eigen::Vector3d& w0, double rtol) {
  if (branch != 1 && branch != 2)
    throw std::invalid_argument("riccati_reduce: branch must be 1 or 2");
  if (std::abs(w0[0] * w0[1] - w0[2] * w0[2]) >
      1e-12 * std::max(1.0, w0.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("riccati_reduce: w0 must satisfy w1 w2 = w3^2");

  const auto& bdiag = (branch == 1) ? coeffs.b11 : coeffs.b22;
  for (double t : grid.values)
    if (std::abs(bdiag(t)) < 1e-12)
      throw GateError("riccati_reduce", "b_diag != 0",
                      "singular friction term at t = " + std::to_string(t));

  // derivatives of the b coefficients by central differences
  const double dt_fd = 1e-6 * std::max(1.0, grid.values.back() - grid.values.front());
  auto deriv = [dt_fd](const std::function<double(double)>& f, double t) {
    return (f(t + dt_fd) - f(t - dt_fd)) / (2.0 * dt_fd);
  };

  // potential term of the oscillator equation for y
  auto potential = [&](double t) {
    const double b11 = coeffs.b11(t), b12 = coeffs.b12(t), b22 = coeffs.b22(t);
    const double db12 = deriv(coeffs.b12, t);
    if (branch == 1) {
      const double db11 = deriv(coeffs.b11, t);
      return 2.0 * (2.0 * b12 * b12 + b12 * db11 / b11 - db12 - 2.0 * b11 * b22);
    }
    const double db22 = deriv(coeffs.b22, t);
    return 2.0 * (2.0 * b12 * b12 - b12 * db22 / b22 + db12 - 2.0 * b11 * b22);
  };
  auto friction = [&](double t) {
    if (branch == 1) return deriv(coeffs.b11, t) / coeffs.b11(t);
    return deriv(coeffs.b22, t) / coeffs.b22(t);
  };

  // direct integration of the homogeneous system to locate the matching
  // point and read off the logarithmic derivative there
  auto hom_rhs = [&coeffs](double t, const Vector& y) {
    const Eigen::Matrix3d A = w_system_matrix(coeffs, t);
    const Eigen::Vector3d d = A * Eigen::Vector3d(y[0], y[1], y[2]);
    Vector dy(3);
    dy << d[0], d[1], d[2];
    return dy;
  };
  Vector h0(3);
  h0 << w0[0], w0[1], w0[2];
  const std::vector<Vector> hom = rk_integrate(hom_rhs, h0, grid, rtol);

  const int comp = (branch == 1) ? 0 : 1;
  size_t i_match = 0;
  while (i_match < hom.size() && hom[i_match][comp] <= 1e-10) ++i_match;
  if (i_match >= hom.size())
    throw GateError("riccati_reduce", "w_h > 0",
                    "component never positive on the grid");
  const double t_match = grid.values[i_match];
  const double w_match = hom[i_match][comp];
  const Eigen::Vector3d d_match =
      w_system_matrix(coeffs, t_match) *
      Eigen::Vector3d(hom[i_match][0], hom[i_match][1], hom[i_match][2]);
  const double dlogw = d_match[comp] / w_match;

  // y'' = friction * y' + potential * y with 2 (ln y)' = (ln w_h)' at t_match
  auto y_rhs = [&](double t, const Vector& y) {
    Vector dy(2);
    dy[0] = y[1];
    dy[1] = friction(t) * y[1] + potential(t) * y[0];
    return dy;
  };
  Vector y0(2);
  y0[0] = std::sqrt(w_match);
  y0[1] = 0.5 * dlogw * y0[0];

  RiccatiResult out;
  out.t_match = t_match;
  const size_t m = grid.values.size() - i_match;
  if (m < 2) {
    out.t = {t_match};
    out.w_component = {w_match};
    return out;
  }
  TimeGrid sub;
  sub.t0 = t_match;
  sub.t1 = grid.values.back();
  sub.n_steps = static_cast<int>(m - 1);
  sub.values.assign(grid.values.begin() + static_cast<long>(i_match), grid.values.end());
  const std::vector<Vector> ys = rk_integrate(y_rhs, y0, sub, rtol);
  out.t = sub.values;
  out.w_component.reserve(ys.size());
  for (const Vector& y : ys) {
    if (y[0] <= 0.0)
      throw GateError("riccati_reduce", "sign change of w_h",
                      "reconstructed component left the positive branch");
    out.w_component.push_back(y[0] * y[0]);
  }
  return out;
}

ExponentQuadraticForm combined_exponent(const WeiNormanState& w, double hbar) {
  const double phi = phi_w4(w.w4);
  ExponentQuadraticForm f;
  f.a = phi * w.w1;
  f.b = phi * w.w2;
  // phi * (e^{w4} - 1) = w4 identically, which keeps Im c finite at w4 = 0
  f.c = Complex(phi * w.w3, w.w4 / (4.0 * hbar));
  return f;
}

WeiNormanState exponent_to_w(const ExponentQuadraticForm& form, double hbar) {
  WeiNormanState w;
  w.w4 = 4.0 * hbar * form.c.imag();
  const double phi = phi_w4(w.w4);
  w.w1 = form.a / phi;
  w.w2 = form.b / phi;
  w.w3 = form.c.real() / phi;
  return w;
}

// ---------------------------------------------------------------------------
// Moment flow

Eigen::Matrix2d first_moment_matrix(const MasterEqCoefficients& coeffs,
                                    double t, double hbar) {
  const double b11 = coeffs.b11(t), b12 = coeffs.b12(t), b22 = coeffs.b22(t);
  const double g = 2.0 * hbar * coeffs.k3(t).imag();
  Eigen::Matrix2d A;
  A << 2.0 * b12 + g, 2.0 * b22,
       -2.0 * b11, -2.0 * b12 + g;
  return A;
}

Eigen::Matrix3d second_moment_matrix(const MasterEqCoefficients& coeffs,
                                     double t, double hbar) {
  const double b11 = coeffs.b11(t), b12 = coeffs.b12(t), b22 = coeffs.b22(t);
  const double g = 4.0 * hbar * coeffs.k3(t).imag();
  Eigen::Matrix3d A;
  // ordering (<q^2>, <p^2>, <qp+pq>)
  A << 4.0 * b12 + g, 0.0, 2.0 * b22,
       0.0, -4.0 * b12 + g, -2.0 * b11,
       -4.0 * b11, 4.0 * b22, g;
  return A;
}

Eigen::Vector3d second_moment_drift(const MasterEqCoefficients& coeffs,
                                    double t, double hbar) {
  const double h2 = hbar * hbar;
  const Complex k3 = coeffs.k3(t);
  return {2.0 * h2 * coeffs.k2(t), 2.0 * h2 * coeffs.k1(t),
          4.0 * h2 * k3.real()};
}

}  // namespace qbrown::wn
