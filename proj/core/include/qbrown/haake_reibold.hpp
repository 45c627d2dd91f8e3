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

#pragma once

#include <array>

#include "qbrown/types.hpp"
#include "qbrown/wei_norman.hpp"

namespace qbrown::hr {

// Model parameters of an oscillator bilinearly coupled to a continuum bath
// with spectral strength f(w) = (2/pi) kappa alpha^2 w^2 / (alpha^2 + w^2).
struct HrModelParams {
  double alpha = 10.0;   // high-frequency cutoff
  double kappa = 0.05;   // coupling strength
  double omega0 = 1.0;   // bare oscillator frequency
  double kT = 5.0;
  double m = 1.0;
  double hbar = 1.0;

  // renormalized frequency squared, omega^2 = omega0^2 - alpha kappa
  double omega2() const { return omega0 * omega0 - alpha * kappa; }

  void validate() const {
    if (!(alpha > 0.0 && kappa > 0.0 && omega0 > 0.0 && kT > 0.0 && m > 0.0 &&
          hbar > 0.0))
      throw std::invalid_argument("HrModelParams: all parameters must be positive");
    if (omega2() < 0.0)
      throw std::invalid_argument(
          "HrModelParams: omega0^2 - alpha*kappa >= 0 required (total "
          "Hamiltonian must be bounded below)");
  }
};

// Solution of the coupled implicit equations
//   Gamma = (kappa/2) alpha^2 / ((alpha - Gamma)^2 + Omega^2),
//   Omega^2 = alpha omega^2 / (alpha - 2 Gamma) - Gamma^2.
struct HrSolved {
  double Gamma = 0.0;
  double Omega = 0.0;
  double omega = 0.0;  // sqrt(omega0^2 - alpha kappa)
  // residuals of the two defining equations at the returned root
  double residual1 = 0.0;
  double residual2 = 0.0;
};

// Damped Newton on the 2-residual system, seeded from the equivalent cubic
// z^3 + alpha z^2 + omega0^2 z + alpha omega^2 (whose complex pair is
// -Gamma +- i Omega).  Throws GateError when no underdamped branch exists or
// the root violates alpha >= 3 Gamma.
HrSolved solve_gamma_omega(const HrModelParams& p);

// The response A(t) as a sum of three complex exponentials; derivatives up
// to third order are evaluated term by term.
class ResponseFunction {
 public:
  ResponseFunction(const HrModelParams& p, const HrSolved& s);

  // k-th derivative of A at t, k in 0..3
  double deriv(double t, int k) const;
  double A(double t) const { return deriv(t, 0); }
  // R^2 = Adot^2 - A * Addot
  double R2(double t) const;

  // exponents and amplitudes, exposed for the closed-form time integrals
  const std::array<Complex, 3>& exponents() const { return z_; }
  const std::array<Complex, 3>& amplitudes() const { return a_; }

 private:
  std::array<Complex, 3> z_;
  std::array<Complex, 3> a_;
};

// The exact master-equation data at one time.
struct HrCoefficientsAt {
  double t = 0.0;
  double A = 0.0, Adot = 0.0, Addot = 0.0, Atdot = 0.0;
  double R = 0.0;
  double X = 0.0, Y = 0.0, Xdot = 0.0, Ydot = 0.0, Xddot = 0.0;
  double f_pq = 0.0, f_pp = 0.0, d_pp = 0.0, d_pq = 0.0;
};

// X, Y and the time derivatives needed by the diffusion coefficients.  The
// inner time integral is closed-form (A is a sum of exponentials); the outer
// frequency integral uses adaptive quadrature with a tan tail map.
struct XyValues {
  double X = 0.0, Y = 0.0, Xdot = 0.0, Ydot = 0.0, Xddot = 0.0;
};
XyValues xy_integrals(const HrModelParams& p, const HrSolved& s,
                      const ResponseFunction& resp, double t,
                      double quad_rtol = 1e-9);

// Full coefficient table on a grid.  R(0) = 1, A(0) = 0 and 0 < R^2 <= 1 are
// enforced as gates; a failure indicates a transcription problem and throws
// rather than proceeding.
std::vector<HrCoefficientsAt> hr_coeffs(const HrModelParams& p,
                                        const TimeGrid& grid,
                                        double quad_rtol = 1e-9);

// Mapping into the general master-equation slots:
//   b22 = 1/(2m), b12 = -f_pp/4, b11 = -m f_pq/2,
//   k1 = m d_pp/hbar^2, k2 = 0, k3 = (d_pq + i hbar f_pp/2)/(2 hbar^2).
wn::MasterEqCoefficients to_master_eq(const HrModelParams& p,
                                      const std::vector<HrCoefficientsAt>& table,
                                      const TimeGrid& grid);

// Closed-form exponent coordinates,
//   (w1, w2, w3) = (m Y, X/m, Xdot/2) / (2 hbar^2 R^2),  w4 = -ln R^2.
wn::WeiNormanState closed_form_w(const HrModelParams& p,
                                 const HrCoefficientsAt& c);

// Two-generator factorization of -a{q,.,q} - b{p,.,p} + c{q,.,p} + c*{p,.,q}
// as -k1{B,.,B} - k2{B^dag,.,B^dag} with B = r q + s p, [B, B^dag] = 1.
// k1 < 0 or k2 < 0 is a legitimate outcome (the form is not of the
// two-generator type) reported through `ok`, not thrown.
struct Factorization {
  bool ok = false;
  double k1 = 0.0;
  double k2 = 0.0;
  Complex r{0.0, 0.0};
  Complex s{0.0, 0.0};
  std::string reason;
};
Factorization positive_factorization(const ExponentQuadraticForm& form,
                                     double hbar);

// Coefficients of the split exp[c_B {B,.,B}] exp[c_Bd {B^dag,.,B^dag}]
// equivalent to exp[-k1{B,.,B} - k2{B^dag,.,B^dag}].
std::pair<double, double> separated_factors(double k1, double k2);

// The same two exponent factors computed directly from the trajectory data
// (manifestly non-positive when 0 < R^2 <= 1):
//   c_Bd = -(1/2) ln(1 + R^-2 (sqrt(XY - Xdot^2/4)/hbar + (1-R^2)/2)),
//   c_B  = -(1/2) ln R^2 + c_Bd.
std::pair<double, double> eq46_factors(const HrCoefficientsAt& c, double hbar);

// Heisenberg actions of the two unitary factors of the reversible part,
// realized as 2x2 symplectic maps on (q, p); both have unit determinant and
// compose to (1/R) [[Adot, A/m], [m Addot, Adot]].
Eigen::Matrix2d n_map(const HrModelParams& p, const HrSolved& s,
                      const HrCoefficientsAt& c);
Eigen::Matrix2d m_map(const HrModelParams& p, const HrSolved& s,
                      const HrCoefficientsAt& c);
Eigen::Matrix2d nm_combined_map(const HrModelParams& p,
                                const HrCoefficientsAt& c);

}  // namespace qbrown::hr
