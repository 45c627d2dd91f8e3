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

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#pragma once

#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

#include "qbrown/types.hpp"

namespace oracles {

using qbrown::Complex;
using qbrown::ComplexMatrix;
using qbrown::Matrix;
using qbrown::Vector;

// Dense matrix exponential by plain scaled Taylor summation (no Pade), for
// cross-checking the library expm and constant-coefficient ODE solutions.
inline Matrix expm_taylor(const Matrix& A) {
  const double norm = A.cwiseAbs().maxCoeff() * static_cast<double>(A.rows());
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.25) ++s;
  const Matrix As = A / std::pow(2.0, s);
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * As / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// Roots of a monic polynomial via the companion matrix (general, dense).
inline std::vector<Complex> companion_roots(const std::vector<double>& monic_coeffs) {
  // coefficients c0 + c1 x + ... + c_{n-1} x^{n-1} + x^n
  const int n = static_cast<int>(monic_coeffs.size());
  Matrix C = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -monic_coeffs[static_cast<size_t>(i)];
  Eigen::EigenSolver<Matrix> es(C);
  std::vector<Complex> roots;
  roots.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
  return roots;
}

// Characteristic polynomial of a Hermitian matrix by the Faddeev-LeVerrier
// recurrence, returned monic (constant term first).
inline std::vector<double> char_poly(const ComplexMatrix& M) {
  const int n = static_cast<int>(M.rows());
  ComplexMatrix Mk = ComplexMatrix::Identity(n, n);
  std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
  c[static_cast<size_t>(n)] = 1.0;
  for (int k = 1; k <= n; ++k) {
    Mk = M * Mk;
    const double ck = -Mk.trace().real() / k;
    c[static_cast<size_t>(n - k)] = ck;
    Mk += ck * ComplexMatrix::Identity(n, n);
  }
  return c;
}

// Plain dense trapezoid rule.
template <typename F>
double trapezoid(F&& f, double lo, double hi, long n) {
  double acc = 0.5 * (f(lo) + f(hi));
  const double h = (hi - lo) / static_cast<double>(n);
  for (long i = 1; i < n; ++i) acc += f(lo + h * static_cast<double>(i));
  return acc * h;
}

}  // namespace oracles
