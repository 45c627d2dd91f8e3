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

#include <cstdint>
#include <functional>
#include <limits>

#include "qbrown/types.hpp"

namespace qbrown {

// ---------------------------------------------------------------------------
// ODE integration

using VectorField = std::function<Vector(double t, const Vector& y)>;

// Classical RK4 sampled at every grid point.  Each grid interval is cut into
// substeps, doubling the substep count until two successive refinements agree
// to rtol at all grid points.  Throws GateError("rk_integrate", "divergence
// at t", ...) on non-finite state.
std::vector<Vector> rk_integrate(const VectorField& f, const Vector& y0,
                                 const TimeGrid& grid, double rtol = 1e-8);

// ---------------------------------------------------------------------------
// Quadrature

// Adaptive Gauss-Kronrod 15(7).  An infinite upper limit (hi = +inf) is
// mapped with x = lo + tan(theta).  Throws on non-convergence.
double adaptive_quad(const std::function<double(double)>& g, double lo,
                     double hi, double rtol = 1e-8,
                     int max_subdivisions = 4000);

// ---------------------------------------------------------------------------
// Linear algebra

// Smallest eigenvalue of a Hermitian matrix.  Input must be Hermitian to
// 1e-10 relative; throws std::invalid_argument otherwise.
double hermitian_min_eig(const ComplexMatrix& M);

// Dense matrix exponential, scaling-and-squaring with Pade(13).
ComplexMatrix expm(const ComplexMatrix& A);
Matrix expm(const Matrix& A);

// ---------------------------------------------------------------------------
// Stable kernels

// phi(x) = x / (e^x - 1), continuous through x = 0 (phi(0) = 1).
double phi_w4(double x);
// Truncated series for the same kernel, used to cross-check the direct
// evaluation near x = 0.
double phi_w4_series(double x);

// (1 - e^{-x}) / x with the removable singularity at x = 0 filled in.
double expm1_ratio(double x);

// ---------------------------------------------------------------------------
// Interpolation

// Cubic Hermite (Catmull-Rom) interpolant on a uniform grid.  Used to turn
// sampled coefficient tables into continuous functions of time.
class CubicTable {
 public:
  CubicTable() = default;
  CubicTable(double t0, double dt, std::vector<double> samples);
  double operator()(double t) const;
  double t_min() const { return t0_; }
  double t_max() const { return t0_ + dt_ * static_cast<double>(y_.size() - 1); }

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> y_;
  std::vector<double> m2_;  // spline second derivatives
};

// ---------------------------------------------------------------------------
// Deterministic random numbers

// mt19937_64-backed generator with hand-rolled uniform/normal conversion so
// streams are identical across standard libraries.  Default seed matches the
// CLI default.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 20120423ull) : s_(seed ? seed : 1ull) {
    // warm up splitmix so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) next();
  }

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; cache the second deviate
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    cache_ = rad * std::sin(ang);
    have_cache_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::uint64_t s_;
  bool have_cache_ = false;
  double cache_ = 0.0;
};

}  // namespace qbrown
