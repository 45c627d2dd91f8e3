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

namespace qbrown::pos {

// Dimensionless combination of the exponent coordinates,
//   (u1, u2, u3, u4) = (hbar/2)(w1/eta + eta w2, w1/eta - eta w2, 2 w3,
//                       (e^{w4}-1)/(2 hbar)),
// where eta_scale > 0 is a free constant.
struct UVector {
  double u1 = 0.0, u2 = 0.0, u3 = 0.0, u4 = 0.0;
  double eta_scale = 1.0;
};

// Scaled master-equation coefficients,
//   (h1, h2, h3, h4) = (1/hbar)(k1/eta + eta k2, k1/eta - eta k2,
//                       k3 + k4, i(k3 - k4)).
struct HVector {
  double h1 = 0.0, h2 = 0.0, h3 = 0.0, h4 = 0.0;
};

// Linear symplectic action on (q, p); AD - BC = 1.
struct SymplecticMap2 {
  double A = 1.0, B = 0.0, C = 0.0, D = 1.0;

  double det() const { return A * D - B * C; }
  void validate(double tol = 1e-10) const {
    if (std::abs(det() - 1.0) > tol)
      throw std::invalid_argument("SymplecticMap2: AD - BC must equal 1");
  }
  static SymplecticMap2 identity() { return {}; }
  static SymplecticMap2 fourier() { return {0.0, 1.0, -1.0, 0.0}; }
  // Deterministic random map with entries of moderate size.
  static SymplecticMap2 random(Rng& rng);
};

UVector w_to_u(const wn::WeiNormanState& w, double eta, double hbar);

// u1^2 - u2^2 - u3^2 - u4^2; equals
// hbar^2 [w1 w2 - w3^2 - ((e^{w4}-1)/(4 hbar))^2].
double minkowski_norm(const UVector& u);

double u_dot_h(const UVector& u, const HVector& h);

// w1 >= 0, w2 >= 0 and w1 w2 - w3^2 - ((e^{w4}-1)/(4 hbar))^2 >= 0, with a
// small boundary band.
bool condition_47(const wn::WeiNormanState& w, double hbar, double tol = 1e-12);

struct UTrajectory {
  double eta_scale = 1.0;
  std::vector<double> t;
  std::vector<UVector> u;
  std::vector<HVector> h;
  std::vector<double> w4;
};

// Integrates the u-system directly (with the e^{w4} weight carried along)
// and samples the h-vector.  Consistent with mapping integrate_w output
// through w_to_u.
UTrajectory integrate_u(const wn::MasterEqCoefficients& coeffs, double eta,
                        const TimeGrid& grid, double hbar, double rtol = 1e-8);

enum class Verdict { pass, marginal, fail };
const char* to_string(Verdict v);

// Three sufficient-condition streams over the grid:
//   A: norm condition u_mu u^mu >= 0 together with u1 >= |u2|,
//   B: weighted-integral condition with weight e^{w4},
//   C: pointwise condition u_mu h^mu >= 0,
// plus the logical audit that C => B => A at each time (marginal counts as
// a pass).  The sufficient conditions are not necessary; see the pure-w4
// counterexample in the tests.
struct SufficientReport {
  std::vector<double> t;
  std::vector<double> norm;        // u_mu u^mu
  std::vector<double> integral;    // cumulative integral of e^{w4} u.h
  std::vector<double> pointwise;   // u_mu h^mu
  std::vector<Verdict> cond54;     // u1 >= |u2|
  std::vector<Verdict> cond49_54;  // A
  std::vector<Verdict> cond56_54;  // B
  std::vector<Verdict> cond57_54;  // C
  bool implication_audit_ok = true;
  double weight_consistency = 0.0;  // max |2 hbar^2 int h4 - w4|
};
SufficientReport sufficient_checks(const UTrajectory& traj, double hbar,
                                   double marginal_band = 1e-10);

// Conjugation of the combined exponent by a metaplectic operator; w4 is
// unchanged and the Minkowski norm of u is invariant.
wn::WeiNormanState metaplectic_transform_w(const wn::WeiNormanState& w,
                                           const SymplecticMap2& S);

}  // namespace qbrown::pos
