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

#include <functional>

#include "qbrown/numerics.hpp"
#include "qbrown/types.hpp"

namespace qbrown::wn {

// Coefficients of the non-autonomous master equation
//   d rho/dt = (1/i hbar)[H_s, rho] - k1{q,.,q} - k2{p,.,p}
//              + k3{p,.,q} + k4{q,.,p},
// with H_s = b11 q^2 + b12 (qp+pq) + b22 p^2 and k4 = conj(k3) enforced
// structurally (only k3 is stored).
struct MasterEqCoefficients {
  std::function<double(double)> b11, b12, b22;
  std::function<double(double)> k1, k2;
  std::function<Complex(double)> k3;

  static MasterEqCoefficients constants(double b11, double b12, double b22,
                                        double k1, double k2, Complex k3);
  // Sampled tables on a uniform grid, interpolated with cubic Hermite.
  static MasterEqCoefficients from_tables(
      double t0, double dt, std::vector<double> b11, std::vector<double> b12,
      std::vector<double> b22, std::vector<double> k1, std::vector<double> k2,
      std::vector<Complex> k3);
};

// Exponent coordinates of the factored propagator, w(0) = 0.
struct WeiNormanState {
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 0.0;
  double w4 = 0.0;
};

struct WnTrajectory {
  std::vector<double> t;
  std::vector<WeiNormanState> w;

  const WeiNormanState& back() const { return w.back(); }
};

// Integrates the (w1, w2, w3) system with the e^{w4} inhomogeneity; w4 is
// carried along as d w4/dt = -4 hbar Im k3.  grid.t0 must be 0.
WnTrajectory integrate_w(const MasterEqCoefficients& coeffs,
                         const TimeGrid& grid, double hbar,
                         double rtol = 1e-8);

// Max over the grid of |w1 w2 - w3^2 - integral| / max(1, |w1 w2 - w3^2|),
// the integral evaluated by composite Simpson on the stored samples
// (independent of the ODE route that produced w).
double check_identity_24(const MasterEqCoefficients& coeffs,
                         const WnTrajectory& traj, double hbar);

// Principal matrix solution Pi_w(t, s) of the homogeneous system,
// Pi_w(s, s) = I.  Requires s <= t.
Matrix principal_matrix(const MasterEqCoefficients& coeffs, double t, double s,
                        double rtol = 1e-10);

// Reconstruction of one homogeneous component through the oscillator
// substitution 2 d(ln y)/dt = d(ln w_h)/dt.
//
// branch 1 integrates the y-equation driven by b11 (requires b11 != 0 on the
// grid), branch 2 the one driven by b22.  w0 must lie on the cone
// w1 w2 = w3^2 (the reduction is derived on that invariant set).  Logarithmic
// derivatives are matched at the first grid time where the component is
// positive; the returned trajectory starts there.
struct RiccatiResult {
  std::vector<double> t;
  std::vector<double> w_component;  // reconstructed w_{1,h} or w_{2,h}
  double t_match = 0.0;
};
RiccatiResult riccati_reduce(const MasterEqCoefficients& coeffs,
                             const TimeGrid& grid, int branch,
                             const Eigen::Vector3d& w0, double rtol = 1e-10);

// Single-exponent coefficients of the combined propagator:
//   a = phi w1, b = phi w2, c = phi (w3 + i (e^{w4}-1)/(4 hbar)),
// with phi = w4/(e^{w4}-1) evaluated through an expm1 kernel.
ExponentQuadraticForm combined_exponent(const WeiNormanState& w, double hbar);

// Inverse of combined_exponent (w4 = 4 hbar Im c, then divide by phi).
WeiNormanState exponent_to_w(const ExponentQuadraticForm& form, double hbar);

// ---------------------------------------------------------------------------
// Gaussian shadow of the master equation: closed linear ODEs for the first
// and second moments.  Used by cross-validation oracles and the CLI compare
// scenarios.

// d/dt (<q>, <p>) = first_moment_matrix * (<q>, <p>)
Eigen::Matrix2d first_moment_matrix(const MasterEqCoefficients& coeffs,
                                    double t, double hbar);

// d/dt (<q^2>, <p^2>, <qp+pq>) = second_moment_matrix * m + second_moment_drift
Eigen::Matrix3d second_moment_matrix(const MasterEqCoefficients& coeffs,
                                     double t, double hbar);
Eigen::Vector3d second_moment_drift(const MasterEqCoefficients& coeffs,
                                    double t, double hbar);

}  // namespace qbrown::wn
