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

#include <Eigen/SparseCore>

#include "qbrown/numerics.hpp"
#include "qbrown/types.hpp"
#include "qbrown/wei_norman.hpp"
#include "qbrown/witness.hpp"

namespace qbrown::fock {

using SparseSuperop = Eigen::SparseMatrix<Complex>;

// q and p in the number basis of a reference oscillator (m, omega_ref).
// [q, p] = i hbar holds on the interior block; the top corner deviates by
// construction of the truncation.
struct TruncatedOperators {
  int N = 0;
  double m = 1.0, omega_ref = 1.0, hbar = 1.0;
  ComplexMatrix a;     // lowering operator
  ComplexMatrix q, p;
  ComplexMatrix q2, p2, qp, pq;  // cached products

  static TruncatedOperators make(int N, double m, double omega_ref,
                                 double hbar);
};

// Master-equation coefficients frozen at one time.
struct GeneratorCoeffs {
  double b11 = 0.0, b12 = 0.0, b22 = 0.0;
  double k1 = 0.0, k2 = 0.0;
  Complex k3{0.0, 0.0};  // k4 = conj(k3)

  static GeneratorCoeffs at(const wn::MasterEqCoefficients& c, double t) {
    return {c.b11(t), c.b12(t), c.b22(t), c.k1(t), c.k2(t), c.k3(t)};
  }
  // quadratic form -eta{q,.,q} - xi{p,.,p} + zeta{q,.,p} + zeta*{p,.,q}
  static GeneratorCoeffs from_form(const witness::LemmaForm& f) {
    return {0.0, 0.0, 0.0, f.eta, f.xi, std::conj(f.zeta)};
  }
};

// {X, rho, Y} = Y X^dag rho + rho Y X^dag - 2 X^dag rho Y
ComplexMatrix bracket(const ComplexMatrix& X, const ComplexMatrix& Y,
                      const ComplexMatrix& rho);

// One application of the generator, via matrix products.
ComplexMatrix apply_generator(const GeneratorCoeffs& g,
                              const TruncatedOperators& ops,
                              const ComplexMatrix& rho);

// Column-stacked sparse realization of the same generator.
SparseSuperop build_generator(const GeneratorCoeffs& g,
                              const TruncatedOperators& ops);

// exp(S) rho for a generic superoperator given by its action; substepped
// Taylor series with the substep count adapted to the measured action norm.
ComplexMatrix apply_exp(
    const std::function<ComplexMatrix(const ComplexMatrix&)>& S,
    const ComplexMatrix& rho, double tol = 1e-13);

// Power-iteration estimate of the spectral radius of a sparse superoperator.
double spectral_radius_estimate(const SparseSuperop& G, Rng& rng,
                                int iters = 40);

struct PropagateOptions {
  double leak_tol = 1e-6;
  double conv_tol = 1e-7;   // halving-convergence tolerance (Frobenius)
  double step_safety = 1.8; // h0 = step_safety / spectral radius
  int max_halvings = 8;
};

// Fixed-step RK4 on the vectorized density matrices (a block of initial
// states integrated together), with per-step Hermitization and leakage
// tracking.  The step is halved until two successive refinements agree at
// the final sample.
struct PropagateResult {
  std::vector<double> t;
  // states[sample][initial]
  std::vector<std::vector<ComplexMatrix>> states;
  std::vector<std::vector<double>> leakage;
  double step = 0.0;
  int halvings = 0;
};

PropagateResult propagate(const SparseSuperop& gen,
                          const std::vector<ComplexMatrix>& rho0,
                          const std::vector<double>& t_samples,
                          const PropagateOptions& opts = {});

// Time-dependent variant driven by coefficient callables.
PropagateResult propagate(const wn::MasterEqCoefficients& coeffs,
                          const TruncatedOperators& ops,
                          const std::vector<ComplexMatrix>& rho0,
                          const std::vector<double>& t_samples,
                          double step_hint,
                          const PropagateOptions& opts = {});

// Smallest eigenvalue per state.
std::vector<double> min_eig_scan(const std::vector<ComplexMatrix>& states);

double purity(const ComplexMatrix& rho);

// Gaussian state synthesis: thermal occupation from the symplectic
// eigenvalue, one metaplectic unitary from the matrix logarithm of the
// shape factor, then a displacement.  Moments of the result are verified
// against the request; leakage above leak_tol throws.
FockDensityMatrix gaussian_to_fock(const GaussianState& g,
                                   const TruncatedOperators& ops,
                                   double leak_tol = 1e-8);

// Means and covariances read back from a Fock-basis state (normalized by
// the trace so truncation leakage does not bias them).
GaussianState fock_moments(const ComplexMatrix& rho,
                           const TruncatedOperators& ops);

// ---------------------------------------------------------------------------
// Identity checks.  Each returns Frobenius residuals between independently
// evaluated routes.

struct ThreeWayResiduals {
  double d12 = 0.0, d13 = 0.0, d23 = 0.0;
  double max() const { return std::max({d12, d13, d23}); }
};

// exp[-r {A^dag,.,A^dag}] rho compared three ways: direct exponential,
// sandwiched-exponential form, and the completely positive Kraus sum.
// A must satisfy [A, A^dag] = 1 (checked on the interior block).
ThreeWayResiduals check_identity_16(const ComplexMatrix& A, double r,
                                    const ComplexMatrix& rho, double tol = 1e-12);
// Same for exp[-r {A,.,A}].
ThreeWayResiduals check_identity_17(const ComplexMatrix& A, double r,
                                    const ComplexMatrix& rho, double tol = 1e-12);

// Gaussian average of e^{-iuA} rho e^{iuA} vs the direct exponential of
// -tau {A,.,A} for self-adjoint A.
double check_identity_79(const ComplexMatrix& A, double tau,
                         const ComplexMatrix& rho);

// e^{r1 S_A} e^{r2 S_B} rho vs exp(r1 S_A + r1 r2/(1-e^{-r1}) S_B) rho for
// S_A = ({q,.,p} - {p,.,q})/(4 hbar i) and S_B = {q,.,q}, which satisfy
// [S_A, S_B] = S_B.
double check_identity_20(const TruncatedOperators& ops, double r1, double r2,
                         const ComplexMatrix& rho);

// Realized commutators of the five superoperators against the closed
// algebra, on states supported away from the truncation edge.
double table1_max_residual(const TruncatedOperators& ops, double b11,
                           double b12, double b22, int pad, Rng& rng,
                           int n_probes = 3);

}  // namespace qbrown::fock
