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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbrown {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr const char* kArtifactVersion = "qbrown 1.0.0";

// Thrown when a numeric consistency gate fails.  `where` names the module,
// `gate` the specific check (e.g. "R(0)=1"), so callers can report which
// stage of a pipeline broke instead of a bare message.
class GateError : public std::runtime_error {
 public:
  GateError(std::string where, std::string gate, const std::string& detail)
      : std::runtime_error(where + ": gate '" + gate + "' failed: " + detail),
        where_(std::move(where)),
        gate_(std::move(gate)) {}
  const std::string& where() const noexcept { return where_; }
  const std::string& gate() const noexcept { return gate_; }

 private:
  std::string where_;
  std::string gate_;
};

// Physical constants of the damped oscillator.  Default convention is
// hbar = m = 1, but every formula downstream carries hbar and m explicitly.
struct OscillatorParams {
  double m = 1.0;      // mass
  double omega = 1.0;  // angular frequency
  double gamma = 0.1;  // coupling rate
  double kT = 1.0;     // thermal energy
  double hbar = 1.0;

  // sqrt(omega^2/gamma^2 - 1); real because omega > gamma is required.
  double eta_tilde() const {
    const double x = omega / gamma;
    return std::sqrt(x * x - 1.0);
  }

  // r = eta_tilde * sqrt(1 - (hbar*omega/2kT)^2), in [0, eta_tilde].
  double r() const {
    const double y = hbar * omega / (2.0 * kT);
    return eta_tilde() * std::sqrt(1.0 - y * y);
  }

  void validate() const {
    if (!(m > 0.0 && omega > 0.0 && gamma > 0.0 && kT > 0.0 && hbar > 0.0))
      throw std::invalid_argument("OscillatorParams: all of m, omega, gamma, kT, hbar must be positive");
    if (!(omega > gamma))
      throw std::invalid_argument("OscillatorParams: omega > gamma required (eta_tilde must be real)");
    if (!(hbar * omega <= 2.0 * kT))
      throw std::invalid_argument("OscillatorParams: hbar*omega <= 2*kT required (r must be real)");
  }
};

// First moments and symmetrized covariance of (q, p).
// cov_qp is (1/2)<qp+pq> - <q><p>.
struct GaussianState {
  double mean_q = 0.0;
  double mean_p = 0.0;
  double cov_qq = 0.0;
  double cov_pp = 0.0;
  double cov_qp = 0.0;

  double det_cov() const { return cov_qq * cov_pp - cov_qp * cov_qp; }

  // Uncertainty relation det(cov) >= hbar^2/4, with equality for pure states.
  bool allowable(double hbar, double tol = 0.0) const {
    return cov_qq >= -tol && cov_pp >= -tol &&
           det_cov() >= 0.25 * hbar * hbar - tol;
  }
  bool pure(double hbar, double tol = 1e-10) const {
    return std::abs(det_cov() - 0.25 * hbar * hbar) <= tol;
  }

  // Raw second moments <q^2>, <p^2>, <qp+pq>.
  double raw_q2() const { return cov_qq + mean_q * mean_q; }
  double raw_p2() const { return cov_pp + mean_p * mean_p; }
  double raw_qp_sym() const { return 2.0 * cov_qp + 2.0 * mean_q * mean_p; }
};

// Coefficients of a generator -a{q,.,q} - b{p,.,p} + c{q,.,p} + c*{p,.,q}.
// Representable as a sum of two Lindblad generators iff a >= 0, b >= 0 and
// ab >= |c|^2.
struct ExponentQuadraticForm {
  double a = 0.0;
  double b = 0.0;
  Complex c{0.0, 0.0};

  bool lindblad_representable(double tol = 0.0) const {
    return a >= -tol && b >= -tol && a * b >= std::norm(c) - tol;
  }
};

// N x N Hermitian truncation of a density operator in the number basis.
// 1 - trace is the truncation-leakage diagnostic.
struct FockDensityMatrix {
  int dim = 0;
  ComplexMatrix rho;

  double trace() const { return rho.trace().real(); }
  double leakage() const { return 1.0 - trace(); }
  double hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  }

  void validate(double herm_tol = 1e-12) const {
    if (dim <= 0 || rho.rows() != dim || rho.cols() != dim)
      throw std::invalid_argument("FockDensityMatrix: inconsistent dimension");
    if (hermiticity_error() > herm_tol)
      throw std::invalid_argument("FockDensityMatrix: not Hermitian to tolerance");
    const double tr = trace();
    if (!(tr > 0.0 && tr <= 1.0 + herm_tol))
      throw std::invalid_argument("FockDensityMatrix: trace must lie in (0, 1]");
  }
};

// Strictly increasing sample times.  Trajectories with paper initial
// conditions (w(0) = 0) start at t0 = 0.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 100;
  std::vector<double> values;

  static TimeGrid uniform(double t0, double t1, int n_steps) {
    if (n_steps <= 0) throw std::invalid_argument("TimeGrid: n_steps must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: t1 > t0 required");
    TimeGrid g;
    g.t0 = t0;
    g.t1 = t1;
    g.n_steps = n_steps;
    g.values.resize(static_cast<size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i)
      g.values[static_cast<size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / n_steps;
    g.values.back() = t1;
    return g;
  }

  void validate() const {
    if (values.size() < 2) throw std::invalid_argument("TimeGrid: need at least two sample times");
    for (size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1]))
        throw std::invalid_argument("TimeGrid: values must be strictly increasing");
  }
};

}  // namespace qbrown
