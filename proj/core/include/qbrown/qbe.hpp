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

#include "qbrown/types.hpp"
#include "qbrown/wei_norman.hpp"
#include "qbrown/witness.hpp"

namespace qbrown::qbe {

// Closed-form data of the interaction-picture propagator
//   rho^I(t) = exp[delta {p,.,p}] exp[-Gamma t {B^dag,.,B^dag}] rho(0)
// at a single time.
struct QbeSolutionAt {
  double t = 0.0;
  double u = 0.0;      // Gamma * t
  double delta = 0.0;  // coefficient of the {p,.,p} exponent
  double l1 = 0.0;
  double l3 = 0.0;
  Complex b_q{0.0, 0.0};  // B = b_q q + b_p p, [B, B^dag] = 1
  Complex b_p{0.0, 0.0};
  double s = 0.0;  // sin^2(eta~ u) - r^2 sinh^2 u
};

enum class PositivityClass {
  excess_fluctuations,  // s < 0: two-generator Lindblad-form exponent exists
  marginal,             // s = 0: single-generator form
  non_positive          // s > 0: non-positive for some initial state
};

double criterion(const OscillatorParams& params, double u);
PositivityClass classify(double s, double tol = 1e-10);

QbeSolutionAt solve_at(const OscillatorParams& params, double t);

// Coefficients of the equation in the general non-autonomous form.
wn::MasterEqCoefficients master_eq_coefficients(const OscillatorParams& params);

// Lowering-operator exponent of the first factor at time t:
// -Gamma t {B^dag,.,B^dag} written as a quadratic form.
witness::LemmaForm damping_factor_form(const QbeSolutionAt& sol,
                                       const OscillatorParams& params);

// The two factors of the propagator combined into one quadratic form
// (R1, R2, R3), recovered from the composed affine moment map.
witness::LemmaForm combined_form(const OscillatorParams& params, double t);

// Interaction-picture Gaussian propagation: second moments through the
// lemma maps, first moments through the e^{-2 hbar Im zeta} scaling.
GaussianState propagate_gaussian(const OscillatorParams& params, double t,
                                 const GaussianState& rho0);

// Eigenstate of B(t) with eigenvalue beta: pure Gaussian with covariance
// hbar^2 (|b_p|^2, |b_q|^2, -Re(b_q* b_p)).
GaussianState two_photon_coherent(const OscillatorParams& params, double t,
                                  Complex beta);

// Zeros of s(u) on (0, u_max], bracketed on a fine scan and polished by
// bisection.
std::vector<double> marginal_times(const OscillatorParams& params,
                                   double u_max, int scan_points = 4096);

// Largest u <= u_max with s(u) > 0 (0 if none).
double last_violation_time(const OscillatorParams& params, double u_max,
                           int scan_points = 8192);

// Reversible (Hamiltonian-only) flows of Eq-of-motion moments, used to move
// between Schroedinger and interaction pictures.
Eigen::Matrix2d reversible_flow_first(const OscillatorParams& params, double t);
Eigen::Matrix3d reversible_flow_second(const OscillatorParams& params, double t);

// Parameter set exhibiting s(u_star) > 0 while kT/(hbar Gamma) >= chi_min
// and u_star * kT/(hbar Gamma) >> 1, found by pushing hbar omega / 2kT
// toward 1 (r -> 0+) at large eta~.
struct ViolationScanResult {
  OscillatorParams params;
  double u_star = 0.0;
  double s_at_u_star = 0.0;
  double chi = 0.0;        // kT / (hbar Gamma)
  double cond4 = 0.0;      // u_star * chi  (t / (hbar/kT))
};
ViolationScanResult long_time_violation_scan(double chi_min, double u_star);

}  // namespace qbrown::qbe
