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

#include "qbrown/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qbrown::fock {

TruncatedOperators TruncatedOperators::make(int N, double m, double omega_ref,
                                            double hbar) {
  if (N < 2) throw std::invalid_argument("TruncatedOperators: N >= 2 required");
  TruncatedOperators ops;
  ops.N = N;
  ops.m = m;
  ops.omega_ref = omega_ref;
  ops.hbar = hbar;
  ops.a = ComplexMatrix::Zero(N, N);
  for (int n = 1; n < N; ++n) ops.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const ComplexMatrix ad = ops.a.adjoint();
  const double cq = std::sqrt(hbar / (2.0 * m * omega_ref));
  const double cp = std::sqrt(m * omega_ref * hbar / 2.0);
  ops.q = cq * (ops.a + ad);
  ops.p = Complex(0.0, 1.0) * cp * (ad - ops.a);
  ops.q2 = ops.q * ops.q;
  ops.p2 = ops.p * ops.p;
  ops.qp = ops.q * ops.p;
  ops.pq = ops.p * ops.q;
  return ops;
}

ComplexMatrix bracket(const ComplexMatrix& X, const ComplexMatrix& Y,
                      const ComplexMatrix& rho) {
  const ComplexMatrix YXd = Y * X.adjoint();
  return YXd * rho + rho * YXd - 2.0 * X.adjoint() * rho * Y;
}

ComplexMatrix apply_generator(const GeneratorCoeffs& g,
                              const TruncatedOperators& ops,
                              const ComplexMatrix& rho) {
  const Complex k4 = std::conj(g.k3);
  const ComplexMatrix qr = ops.q * rho;
  const ComplexMatrix pr = ops.p * rho;

  ComplexMatrix out = ComplexMatrix::Zero(ops.N, ops.N);
  // Hamiltonian part (1/i hbar)[H, rho]
  if (g.b11 != 0.0 || g.b12 != 0.0 || g.b22 != 0.0) {
    const ComplexMatrix H =
        g.b11 * ops.q2 + g.b12 * (ops.qp + ops.pq) + g.b22 * ops.p2;
    out += (H * rho - rho * H) / Complex(0.0, ops.hbar);
  }
  if (g.k1 != 0.0)
    out -= g.k1 * (ops.q2 * rho + rho * ops.q2 - 2.0 * qr * ops.q);
  if (g.k2 != 0.0)
    out -= g.k2 * (ops.p2 * rho + rho * ops.p2 - 2.0 * pr * ops.p);
  if (g.k3 != Complex(0.0, 0.0)) {
    // {p,rho,q} = qp rho + rho qp - 2 p rho q
    out += g.k3 * (ops.qp * rho + rho * ops.qp - 2.0 * pr * ops.q);
    // {q,rho,p} = pq rho + rho pq - 2 q rho p
    out += k4 * (ops.pq * rho + rho * ops.pq - 2.0 * qr * ops.p);
  }
  return out;
}

namespace {

// coeff * (B^T kron A), i.e. the superoperator of rho -> A rho B
void add_sandwich(std::vector<Eigen::Triplet<Complex>>& trips,
                  const ComplexMatrix& A, const ComplexMatrix& B,
                  Complex coeff) {
  const int N = static_cast<int>(A.rows());
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j) {
      const Complex bv = B(l, j);
      if (bv == Complex(0.0, 0.0)) continue;
      for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i) {
          const Complex av = A(i, k);
          if (av == Complex(0.0, 0.0)) continue;
          trips.emplace_back(i + N * j, k + N * l, coeff * av * bv);
        }
    }
}

void add_left(std::vector<Eigen::Triplet<Complex>>& trips,
              const ComplexMatrix& A, Complex coeff) {
  const int N = static_cast<int>(A.rows());
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i) {
      const Complex av = A(i, k);
      if (av == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < N; ++j)
        trips.emplace_back(i + N * j, k + N * j, coeff * av);
    }
}

void add_right(std::vector<Eigen::Triplet<Complex>>& trips,
               const ComplexMatrix& B, Complex coeff) {
  const int N = static_cast<int>(B.rows());
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j) {
      const Complex bv = B(l, j);
      if (bv == Complex(0.0, 0.0)) continue;
      for (int i = 0; i < N; ++i)
        trips.emplace_back(i + N * j, i + N * l, coeff * bv);
    }
}

}  // namespace

SparseSuperop build_generator(const GeneratorCoeffs& g,
                              const TruncatedOperators& ops) {
  const int N = ops.N;
  const Complex k4 = std::conj(g.k3);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(N) * N * 40);

  const ComplexMatrix H =
      g.b11 * ops.q2 + g.b12 * (ops.qp + ops.pq) + g.b22 * ops.p2;
  const Complex inv_ih(0.0, -1.0 / ops.hbar);  // 1/(i hbar)
  add_left(trips, H, inv_ih);                  // (1/i hbar) H rho
  add_right(trips, H, -inv_ih);                // -(1/i hbar) rho H

  // -k1 {q,rho,q}
  add_left(trips, ops.q2, -g.k1);
  add_right(trips, ops.q2, -g.k1);
  add_sandwich(trips, ops.q, ops.q, 2.0 * g.k1);
  // -k2 {p,rho,p}
  add_left(trips, ops.p2, -g.k2);
  add_right(trips, ops.p2, -g.k2);
  add_sandwich(trips, ops.p, ops.p, 2.0 * g.k2);
  // +k3 {p,rho,q}
  add_left(trips, ops.qp, g.k3);
  add_right(trips, ops.qp, g.k3);
  add_sandwich(trips, ops.p, ops.q, -2.0 * g.k3);
  // +k4 {q,rho,p}
  add_left(trips, ops.pq, k4);
  add_right(trips, ops.pq, k4);
  add_sandwich(trips, ops.q, ops.p, -2.0 * k4);

  SparseSuperop G(N * N, N * N);
  G.setFromTriplets(trips.begin(), trips.end());
  G.makeCompressed();
  return G;
}

ComplexMatrix apply_exp(
    const std::function<ComplexMatrix(const ComplexMatrix&)>& S,
    const ComplexMatrix& rho, double tol) {
  const double rho_norm = rho.norm();
  if (rho_norm == 0.0) return rho;

  // Substep count from the action norm on the reachable space (a few power
  // iterations), not just on rho itself: bounding the largest Taylor term
  // keeps the summation free of catastrophic cancellation.
  double radius = 0.0;
  {
    ComplexMatrix v = rho / rho_norm;
    for (int it = 0; it < 8; ++it) {
      const ComplexMatrix w = S(v);
      const double n = w.norm();
      radius = std::max(radius, n);
      if (n == 0.0) break;
      v = w / n;
    }
  }
  int substeps = std::max(1, static_cast<int>(std::ceil(radius / 6.0)));

  for (int attempt = 0; attempt < 12; ++attempt) {
    ComplexMatrix acc = rho;
    bool ok = true;
    for (int s = 0; s < substeps && ok; ++s) {
      ComplexMatrix term = acc;
      ComplexMatrix sum = acc;
      double peak = acc.norm();
      ok = false;
      for (int k = 1; k <= 90; ++k) {
        term = S(term) / (static_cast<double>(k) * substeps);
        peak = std::max(peak, term.norm());
        sum += term;
        if (k >= 2 && term.norm() <= tol * sum.norm()) {
          ok = true;
          break;
        }
      }
      // reject the pass when roundoff from the largest term visible at the
      // requested tolerance
      if (ok && peak * 5e-16 > 10.0 * tol * sum.norm()) ok = false;
      acc = sum;
    }
    if (ok) return acc;
    substeps *= 2;
  }
  throw GateError("fock_oracle", "apply_exp convergence",
                  "Taylor series did not converge");
}

double spectral_radius_estimate(const SparseSuperop& G, Rng& rng, int iters) {
  ComplexVector v(G.rows());
  for (int i = 0; i < v.size(); ++i)
    v[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    ComplexVector w = G * v;
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

namespace {

void hermitize_block(ComplexMatrix& block, int N) {
  const int S = static_cast<int>(block.cols());
  for (int s = 0; s < S; ++s) {
    Eigen::Map<ComplexMatrix> rho(block.col(s).data(), N, N);
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    rho = herm;
  }
}

}  // namespace

PropagateResult propagate(const SparseSuperop& gen,
                          const std::vector<ComplexMatrix>& rho0,
                          const std::vector<double>& t_samples,
                          const PropagateOptions& opts) {
  if (rho0.empty()) throw std::invalid_argument("propagate: no initial states");
  if (t_samples.empty() || t_samples.front() != 0.0)
    throw std::invalid_argument("propagate: samples must start at t = 0");
  const int N = static_cast<int>(rho0.front().rows());
  const int S = static_cast<int>(rho0.size());
  const int D = N * N;
  if (gen.rows() != D)
    throw std::invalid_argument("propagate: generator/state size mismatch");

  ComplexMatrix V0(D, S);
  for (int s = 0; s < S; ++s)
    V0.col(s) = Eigen::Map<const ComplexVector>(rho0[static_cast<size_t>(s)].data(), D);

  Rng rng(777);
  const double radius = spectral_radius_estimate(gen, rng);
  double dt_min = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < t_samples.size(); ++i)
    dt_min = std::min(dt_min, t_samples[i] - t_samples[i - 1]);
  double h = std::min(dt_min, opts.step_safety / std::max(radius, 1e-12));

  auto run = [&](double step, PropagateResult* out) {
    out->t = t_samples;
    out->states.assign(t_samples.size(), {});
    out->leakage.assign(t_samples.size(), {});
    ComplexMatrix V = V0;
    auto record = [&](size_t idx) {
      out->states[idx].reserve(static_cast<size_t>(S));
      out->leakage[idx].reserve(static_cast<size_t>(S));
      for (int s = 0; s < S; ++s) {
        ComplexMatrix rho =
            Eigen::Map<const ComplexMatrix>(V.col(s).data(), N, N);
        rho = 0.5 * (rho + rho.adjoint().eval());
        const double leak = 1.0 - rho.trace().real();
        if (leak > opts.leak_tol)
          throw GateError("fock_oracle", "truncation leakage",
                          "state " + std::to_string(s) + " leaked " +
                              std::to_string(leak) + " at t = " +
                              std::to_string(t_samples[idx]));
        out->states[idx].push_back(std::move(rho));
        out->leakage[idx].push_back(leak);
      }
    };
    record(0);
    for (size_t seg = 1; seg < t_samples.size(); ++seg) {
      const double span = t_samples[seg] - t_samples[seg - 1];
      const int nsub = std::max(1, static_cast<int>(std::ceil(span / step)));
      const double hh = span / nsub;
      for (int k = 0; k < nsub; ++k) {
        const ComplexMatrix K1 = gen * V;
        const ComplexMatrix K2 = gen * (V + 0.5 * hh * K1);
        const ComplexMatrix K3 = gen * (V + 0.5 * hh * K2);
        const ComplexMatrix K4 = gen * (V + hh * K3);
        V += (hh / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        hermitize_block(V, N);
      }
      if (!V.allFinite())
        throw GateError("fock_oracle", "divergence at t",
                        "non-finite state at t = " + std::to_string(t_samples[seg]));
      record(seg);
    }
  };

  PropagateResult coarse;
  run(h, &coarse);
  coarse.step = h;
  for (int halving = 1; halving <= opts.max_halvings; ++halving) {
    PropagateResult fine;
    run(0.5 * h, &fine);
    fine.step = 0.5 * h;
    fine.halvings = halving;
    double delta = 0.0;
    for (int s = 0; s < S; ++s)
      delta = std::max(delta, (coarse.states.back()[static_cast<size_t>(s)] -
                               fine.states.back()[static_cast<size_t>(s)])
                                  .norm());
    if (delta < opts.conv_tol) return fine;
    h *= 0.5;
    coarse = std::move(fine);
  }
  throw GateError("fock_oracle", "step convergence",
                  "halving did not converge to conv_tol");
}

PropagateResult propagate(const wn::MasterEqCoefficients& coeffs,
                          const TruncatedOperators& ops,
                          const std::vector<ComplexMatrix>& rho0,
                          const std::vector<double>& t_samples,
                          double step_hint, const PropagateOptions& opts) {
  if (rho0.empty()) throw std::invalid_argument("propagate: no initial states");
  if (t_samples.empty() || t_samples.front() != 0.0)
    throw std::invalid_argument("propagate: samples must start at t = 0");

  auto rhs = [&](double t, const std::vector<ComplexMatrix>& states) {
    const GeneratorCoeffs g = GeneratorCoeffs::at(coeffs, t);
    std::vector<ComplexMatrix> out;
    out.reserve(states.size());
    for (const ComplexMatrix& rho : states) out.push_back(apply_generator(g, ops, rho));
    return out;
  };

  auto run = [&](double step, PropagateResult* out) {
    out->t = t_samples;
    out->states.assign(t_samples.size(), {});
    out->leakage.assign(t_samples.size(), {});
    std::vector<ComplexMatrix> V = rho0;
    auto axpy = [](std::vector<ComplexMatrix>& y, double c,
                   const std::vector<ComplexMatrix>& x) {
      for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
    };
    auto record = [&](size_t idx) {
      for (size_t s = 0; s < V.size(); ++s) {
        ComplexMatrix rho = 0.5 * (V[s] + V[s].adjoint().eval());
        const double leak = 1.0 - rho.trace().real();
        if (leak > opts.leak_tol)
          throw GateError("fock_oracle", "truncation leakage",
                          "state " + std::to_string(s) + " leaked at t = " +
                              std::to_string(t_samples[idx]));
        out->states[idx].push_back(std::move(rho));
        out->leakage[idx].push_back(leak);
      }
    };
    record(0);
    for (size_t seg = 1; seg < t_samples.size(); ++seg) {
      const double span = t_samples[seg] - t_samples[seg - 1];
      const int nsub = std::max(1, static_cast<int>(std::ceil(span / step)));
      const double hh = span / nsub;
      double t = t_samples[seg - 1];
      for (int k = 0; k < nsub; ++k) {
        const auto K1 = rhs(t, V);
        auto V2 = V;
        axpy(V2, 0.5 * hh, K1);
        const auto K2 = rhs(t + 0.5 * hh, V2);
        auto V3 = V;
        axpy(V3, 0.5 * hh, K2);
        const auto K3 = rhs(t + 0.5 * hh, V3);
        auto V4 = V;
        axpy(V4, hh, K3);
        const auto K4 = rhs(t + hh, V4);
        for (size_t s = 0; s < V.size(); ++s) {
          V[s] += (hh / 6.0) * (K1[s] + 2.0 * K2[s] + 2.0 * K3[s] + K4[s]);
          V[s] = 0.5 * (V[s] + V[s].adjoint().eval());
          if (!V[s].allFinite())
            throw GateError("fock_oracle", "divergence at t",
                            "non-finite state at t = " + std::to_string(t));
        }
        t += hh;
      }
      record(seg);
    }
  };

  double h = step_hint;
  PropagateResult coarse;
  run(h, &coarse);
  coarse.step = h;
  for (int halving = 1; halving <= opts.max_halvings; ++halving) {
    PropagateResult fine;
    run(0.5 * h, &fine);
    fine.step = 0.5 * h;
    fine.halvings = halving;
    double delta = 0.0;
    for (size_t s = 0; s < rho0.size(); ++s)
      delta = std::max(delta,
                       (coarse.states.back()[s] - fine.states.back()[s]).norm());
    if (delta < opts.conv_tol) return fine;
    h *= 0.5;
    coarse = std::move(fine);
  }
  throw GateError("fock_oracle", "step convergence",
                  "halving did not converge to conv_tol");
}

std::vector<double> min_eig_scan(const std::vector<ComplexMatrix>& states) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const ComplexMatrix& rho : states) out.push_back(hermitian_min_eig(rho));
  return out;
}

double purity(const ComplexMatrix& rho) { return rho.squaredNorm(); }

// ---------------------------------------------------------------------------
// Gaussian synthesis

FockDensityMatrix gaussian_to_fock(const GaussianState& g,
                                   const TruncatedOperators& ops,
                                   double leak_tol) {
  const double hbar = ops.hbar;
  if (!g.allowable(hbar, 1e-10))
    throw std::invalid_argument("gaussian_to_fock: state not allowable");
  const int N = ops.N;

  // natural quadratures x = q sqrt(m w / hbar), y = p / sqrt(m w hbar)
  const double sx = std::sqrt(ops.m * ops.omega_ref / hbar);
  const double sy = 1.0 / std::sqrt(ops.m * ops.omega_ref * hbar);
  Eigen::Matrix2d cov;
  cov << g.cov_qq * sx * sx, g.cov_qp * sx * sy,
         g.cov_qp * sx * sy, g.cov_pp * sy * sy;

  double nu = std::sqrt(std::max(cov.determinant(), 0.25));
  const double nbar = std::max(0.0, nu - 0.5);

  // shape factor T = sqrt(cov/nu), symmetric with det 1
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov / nu);
  const Eigen::Vector2d d = es.eigenvalues();
  if (!(d.minCoeff() > 0.0))
    throw std::invalid_argument("gaussian_to_fock: covariance not positive");
  const Eigen::Matrix2d K = es.eigenvectors() *
                            Eigen::Vector2d(0.5 * std::log(d[0]), 0.5 * std::log(d[1])).asDiagonal() *
                            es.eigenvectors().transpose();

  // metaplectic unitary for (x,y) -> e^K (x,y):
  // H = (alpha x^2 + beta y^2 + gamma (xy+yx))/2 with
  // alpha = -K(1,0), beta = K(0,1), gamma = K(0,0); U = exp(-i H)
  const ComplexMatrix x = sx * ops.q;
  const ComplexMatrix y = sy * ops.p;
  const double alpha = -K(1, 0);
  const double beta = K(0, 1);
  const double gamma = K(0, 0);
  const ComplexMatrix Hgen =
      0.5 * (alpha * (x * x) + beta * (y * y) + gamma * (x * y + y * x));
  const ComplexMatrix U = expm(ComplexMatrix(Complex(0.0, -1.0) * Hgen));

  ComplexMatrix rho = ComplexMatrix::Zero(N, N);
  if (nbar < 1e-14) {
    rho(0, 0) = 1.0;
  } else {
    const double ratio = nbar / (1.0 + nbar);
    double pn = 1.0 / (1.0 + nbar);
    for (int n = 0; n < N; ++n) {
      rho(n, n) = pn;
      pn *= ratio;
    }
  }
  rho = U * rho * U.adjoint();

  // displacement
  const double xb = g.mean_q * sx;
  const double yb = g.mean_p * sy;
  if (std::abs(xb) > 0.0 || std::abs(yb) > 0.0) {
    const Complex amp = Complex(xb, yb) / std::sqrt(2.0);
    const ComplexMatrix D =
        expm(ComplexMatrix(amp * ops.a.adjoint() - std::conj(amp) * ops.a));
    rho = D * rho * D.adjoint();
  }

  FockDensityMatrix out;
  out.dim = N;
  out.rho = 0.5 * (rho + rho.adjoint().eval());
  if (out.leakage() > leak_tol)
    throw GateError("fock_oracle", "synthesis leakage",
                    "N too small for the requested Gaussian state");

  // moments must reproduce the request
  const GaussianState check = fock_moments(out.rho, ops);
  const double scale = std::max({1.0, std::abs(g.cov_qq), std::abs(g.cov_pp)});
  const double worst = std::max(
      {std::abs(check.mean_q - g.mean_q), std::abs(check.mean_p - g.mean_p),
       std::abs(check.cov_qq - g.cov_qq), std::abs(check.cov_pp - g.cov_pp),
       std::abs(check.cov_qp - g.cov_qp)});
  if (worst > 1e-6 * scale)
    throw GateError("fock_oracle", "synthesis moments",
                    "synthesized moments off by " + std::to_string(worst) +
                        " (N too small for the tails)");
  return out;
}

GaussianState fock_moments(const ComplexMatrix& rho,
                           const TruncatedOperators& ops) {
  const double tr = rho.trace().real();
  GaussianState g;
  g.mean_q = (ops.q * rho).trace().real() / tr;
  g.mean_p = (ops.p * rho).trace().real() / tr;
  const double q2 = (ops.q2 * rho).trace().real() / tr;
  const double p2 = (ops.p2 * rho).trace().real() / tr;
  const double qp_sym = ((ops.qp + ops.pq) * rho).trace().real() / tr;
  g.cov_qq = q2 - g.mean_q * g.mean_q;
  g.cov_pp = p2 - g.mean_p * g.mean_p;
  g.cov_qp = 0.5 * qp_sym - g.mean_q * g.mean_p;
  return g;
}

// ---------------------------------------------------------------------------
// Identity checks

namespace {

void require_unit_commutator(const ComplexMatrix& A, double tol) {
  const int N = static_cast<int>(A.rows());
  const ComplexMatrix comm = A * A.adjoint() - A.adjoint() * A;
  const int interior = N - 1;
  const ComplexMatrix diff =
      comm.topLeftCorner(interior, interior) -
      ComplexMatrix::Identity(interior, interior);
  if (diff.cwiseAbs().maxCoeff() > std::max(tol, 1e-9))
    throw std::invalid_argument("identity check: [A, A^dag] != 1 on the interior block");
}

}  // namespace

ThreeWayResiduals check_identity_16(const ComplexMatrix& A, double r,
                                    const ComplexMatrix& rho, double tol) {
  if (r < 0.0) throw std::invalid_argument("check_identity_16: r >= 0 required");
  require_unit_commutator(A, tol);
  const ComplexMatrix AdA = A.adjoint() * A;

  // (i) direct superoperator exponential of -r {A^dag,.,A^dag}
  auto L = [&](const ComplexMatrix& m) {
    return ComplexMatrix(-r * (AdA * m + m * AdA - 2.0 * A * m * A.adjoint()));
  };
  const ComplexMatrix direct = apply_exp(L, rho);

  // (ii) sandwiched exponentials; each series term is sandwiched right away
  // so intermediate growth stays bounded
  const ComplexMatrix S1 = expm(ComplexMatrix(-r * AdA));
  const double c = -std::expm1(-2.0 * r);  // 1 - e^{-2r}
  ComplexMatrix term = rho;
  ComplexMatrix sandwich = S1 * rho * S1;
  for (int n = 1; n <= 4 * static_cast<int>(A.rows()); ++n) {
    term = (c / n) * (A * term * A.adjoint());
    const ComplexMatrix piece = S1 * term * S1;
    sandwich += piece;
    if (piece.norm() < 1e-16 * sandwich.norm()) break;
  }

  // (iii) Kraus sum.  W_n rho W_n^dag is accumulated through the recursion
  // K_n = (c e^{2r}/n) A K_{n-1} A^dag with K_0 = S1 rho S1, which follows
  // from S1 A = e^{r} A S1 (exact for the truncated ladder matrices) and
  // keeps every intermediate bounded.
  ComplexMatrix kraus = ComplexMatrix::Zero(rho.rows(), rho.cols());
  ComplexMatrix Kn = S1 * rho * S1;
  const double gain = c * std::exp(2.0 * r);
  for (int n = 0; n <= 4 * static_cast<int>(A.rows()); ++n) {
    if (n > 0) Kn = (gain / n) * (A * Kn * A.adjoint());
    kraus += Kn;
    if (n > 0 && Kn.norm() < 1e-14) break;
  }

  ThreeWayResiduals res;
  res.d12 = (direct - sandwich).norm();
  res.d13 = (direct - kraus).norm();
  res.d23 = (sandwich - kraus).norm();
  return res;
}

ThreeWayResiduals check_identity_17(const ComplexMatrix& A, double r,
                                    const ComplexMatrix& rho, double tol) {
  if (r < 0.0) throw std::invalid_argument("check_identity_17: r >= 0 required");
  require_unit_commutator(A, tol);
  const ComplexMatrix AAd = A * A.adjoint();

  auto L = [&](const ComplexMatrix& m) {
    return ComplexMatrix(-r * (AAd * m + m * AAd - 2.0 * A.adjoint() * m * A));
  };
  const ComplexMatrix direct = apply_exp(L, rho);

  // Inner kernel e^{2r} - 1, not 1 - e^{-2r}: the amplifying direction needs
  // the reciprocal weight or the Kraus set fails sum W^dag W = 1 (checked in
  // the tests by trace preservation).  The exponent factors use
  // AA^dag = A^dag A + 1, which is free of the truncated product's corner
  // defect (the raw corner of a a^dag is 0 instead of N and would leave the
  // top level unsuppressed).
  const int n = static_cast<int>(A.rows());
  const ComplexMatrix S1 = expm(ComplexMatrix(
      -r * (A.adjoint() * A + ComplexMatrix::Identity(n, n))));
  const double c = std::expm1(2.0 * r);
  // the inner series alone diverges for e^{2r} - 1 > 1; sandwiching each
  // term keeps the partial sums bounded
  ComplexMatrix term = rho;
  ComplexMatrix sandwich = S1 * rho * S1;
  for (int n = 1; n <= 4 * static_cast<int>(A.rows()); ++n) {
    term = (c / n) * (A.adjoint() * term * A);
    const ComplexMatrix piece = S1 * term * S1;
    sandwich += piece;
    if (piece.norm() < 1e-16 * sandwich.norm()) break;
  }

  // Kraus recursion K_n = (c e^{-2r}/n) A^dag K_{n-1} A with
  // c e^{-2r} = 1 - e^{-2r} < 1: bounded for any r.
  ComplexMatrix kraus = ComplexMatrix::Zero(rho.rows(), rho.cols());
  ComplexMatrix Kn = S1 * rho * S1;
  const double gain = c * std::exp(-2.0 * r);
  for (int n = 0; n <= 4 * static_cast<int>(A.rows()); ++n) {
    if (n > 0) Kn = (gain / n) * (A.adjoint() * Kn * A);
    kraus += Kn;
    if (n > 0 && Kn.norm() < 1e-14) break;
  }

  ThreeWayResiduals res;
  res.d12 = (direct - sandwich).norm();
  res.d13 = (direct - kraus).norm();
  res.d23 = (sandwich - kraus).norm();
  return res;
}

double check_identity_79(const ComplexMatrix& A, double tau,
                         const ComplexMatrix& rho) {
  if (!(tau > 0.0)) throw std::invalid_argument("check_identity_79: tau > 0 required");
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("check_identity_79: A must be self-adjoint");

  auto L = [&](const ComplexMatrix& m) {
    return ComplexMatrix(-tau * (A * A * m + m * A * A - 2.0 * A * m * A));
  };
  const ComplexMatrix direct = apply_exp(L, rho);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A);
  const ComplexMatrix V = es.eigenvectors();
  const Vector lam = es.eigenvalues();

  // Gaussian average over u = 2 sqrt(tau) v, weight e^{-v^2}/sqrt(pi);
  // composite Gauss-Legendre panels on |v| <= 6.5, refined until stable.
  auto average = [&](int panels) {
    static const double gl_x[8] = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499};
    static const double gl_w[8] = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541};
    const double vmax = 6.5;
    ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double a = -vmax + 2.0 * vmax * pnl / panels;
      const double b = a + 2.0 * vmax / panels;
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      for (int j = 0; j < 16; ++j) {
        const double node = (j < 8) ? mid - half * gl_x[j] : mid + half * gl_x[j - 8];
        const double weight = half * gl_w[j % 8];
        const double u = 2.0 * std::sqrt(tau) * node;
        ComplexVector phase(lam.size());
        for (int i = 0; i < lam.size(); ++i)
          phase[i] = std::exp(Complex(0.0, -u * lam[i]));
        const ComplexMatrix Uu = V * phase.asDiagonal() * V.adjoint();
        acc += (weight * std::exp(-node * node)) * (Uu * rho * Uu.adjoint());
      }
    }
    return ComplexMatrix(acc / std::sqrt(M_PI));
  };

  ComplexMatrix avg = average(12);
  for (int panels = 24; panels <= 96; panels *= 2) {
    const ComplexMatrix next = average(panels);
    const double delta = (next - avg).norm();
    avg = next;
    if (delta < 1e-10) break;
  }
  return (direct - avg).norm();
}

double check_identity_20(const TruncatedOperators& ops, double r1, double r2,
                         const ComplexMatrix& rho) {
  const double hbar = ops.hbar;
  auto SB = [&](const ComplexMatrix& m) {
    return ComplexMatrix(ops.q2 * m + m * ops.q2 - 2.0 * ops.q * m * ops.q);
  };
  auto SA = [&](const ComplexMatrix& m) {
    // ({q,.,p} - {p,.,q})/(4 hbar i)
    const ComplexMatrix qp_term = ops.pq * m + m * ops.pq - 2.0 * ops.q * m * ops.p;
    const ComplexMatrix pq_term = ops.qp * m + m * ops.qp - 2.0 * ops.p * m * ops.q;
    return ComplexMatrix((qp_term - pq_term) / Complex(0.0, 4.0 * hbar));
  };

  // left side: e^{r1 A} e^{r2 B} rho
  const ComplexMatrix inner = apply_exp(
      [&](const ComplexMatrix& m) { return ComplexMatrix(r2 * SB(m)); }, rho);
  const ComplexMatrix lhs = apply_exp(
      [&](const ComplexMatrix& m) { return ComplexMatrix(r1 * SA(m)); }, inner);

  // right side: exp(r1 A + r1 r2/(1 - e^{-r1}) B) rho
  const double coeff = (r1 == 0.0) ? r2 : r2 / expm1_ratio(r1);
  const ComplexMatrix rhs = apply_exp(
      [&](const ComplexMatrix& m) {
        return ComplexMatrix(r1 * SA(m) + coeff * SB(m));
      },
      rho);
  return (lhs - rhs).norm();
}

double table1_max_residual(const TruncatedOperators& ops, double b11,
                           double b12, double b22, int pad, Rng& rng,
                           int n_probes) {
  const int N = ops.N;
  const int interior = N - pad;
  if (interior < 2) throw std::invalid_argument("table1_max_residual: pad too large");
  const double hbar = ops.hbar;

  using Superop = std::function<ComplexMatrix(const ComplexMatrix&)>;
  const Superop Ls = [&](const ComplexMatrix& m) {
    const ComplexMatrix H = b11 * ops.q2 + b12 * (ops.qp + ops.pq) + b22 * ops.p2;
    return ComplexMatrix((H * m - m * H) / Complex(0.0, hbar));
  };
  const Superop Sqq = [&](const ComplexMatrix& m) {
    return ComplexMatrix(ops.q2 * m + m * ops.q2 - 2.0 * ops.q * m * ops.q);
  };
  const Superop Spp = [&](const ComplexMatrix& m) {
    return ComplexMatrix(ops.p2 * m + m * ops.p2 - 2.0 * ops.p * m * ops.p);
  };
  const Superop Spq = [&](const ComplexMatrix& m) {
    return ComplexMatrix(ops.qp * m + m * ops.qp - 2.0 * ops.p * m * ops.q);
  };
  const Superop Sqp = [&](const ComplexMatrix& m) {
    return ComplexMatrix(ops.pq * m + m * ops.pq - 2.0 * ops.q * m * ops.p);
  };

  const Complex I2h(0.0, 2.0 * hbar);
  struct Entry {
    const Superop* x;
    const Superop* y;
    std::function<ComplexMatrix(const ComplexMatrix&)> expect;
  };
  std::vector<Entry> entries;
  entries.push_back({&Ls, &Sqq, [&](const ComplexMatrix& m) {
    return ComplexMatrix(-4.0 * b12 * Sqq(m) - 2.0 * b22 * (Spq(m) + Sqp(m)));
  }});
  entries.push_back({&Ls, &Spp, [&](const ComplexMatrix& m) {
    return ComplexMatrix(4.0 * b12 * Spp(m) + 2.0 * b11 * (Spq(m) + Sqp(m)));
  }});
  entries.push_back({&Ls, &Spq, [&](const ComplexMatrix& m) {
    return ComplexMatrix(2.0 * b11 * Sqq(m) - 2.0 * b22 * Spp(m));
  }});
  entries.push_back({&Ls, &Sqp, [&](const ComplexMatrix& m) {
    return ComplexMatrix(2.0 * b11 * Sqq(m) - 2.0 * b22 * Spp(m));
  }});
  entries.push_back({&Sqq, &Spp, [&](const ComplexMatrix& m) {
    return ComplexMatrix(ComplexMatrix::Zero(m.rows(), m.cols()));
  }});
  entries.push_back({&Sqq, &Spq, [&](const ComplexMatrix& m) {
    return ComplexMatrix(I2h * Sqq(m));
  }});
  entries.push_back({&Sqq, &Sqp, [&](const ComplexMatrix& m) {
    return ComplexMatrix(-I2h * Sqq(m));
  }});
  entries.push_back({&Spp, &Spq, [&](const ComplexMatrix& m) {
    return ComplexMatrix(I2h * Spp(m));
  }});
  entries.push_back({&Spp, &Sqp, [&](const ComplexMatrix& m) {
    return ComplexMatrix(-I2h * Spp(m));
  }});
  entries.push_back({&Spq, &Sqp, [&](const ComplexMatrix& m) {
    return ComplexMatrix(-I2h * (Spq(m) + Sqp(m)));
  }});

  double worst = 0.0;
  for (int probe = 0; probe < n_probes; ++probe) {
    ComplexMatrix rho = ComplexMatrix::Zero(N, N);
    for (int i = 0; i < interior; ++i)
      for (int j = 0; j <= i; ++j) {
        const Complex v(rng.uniform(-1.0, 1.0), (i == j) ? 0.0 : rng.uniform(-1.0, 1.0));
        rho(i, j) = v;
        rho(j, i) = std::conj(v);
      }
    rho /= rho.norm();

    for (const Entry& e : entries) {
      const ComplexMatrix lhs = (*e.x)((*e.y)(rho)) - (*e.y)((*e.x)(rho));
      const ComplexMatrix rhs = e.expect(rho);
      const ComplexMatrix diff = lhs - rhs;
      // the brackets move support by at most two quanta per application, so
      // the interior block of the commutator is exact up to roundoff
      const int keep = interior;
      worst = std::max(worst,
                       diff.topLeftCorner(keep, keep).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace qbrown::fock
