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

namespace qbrown::witness {

// Generator exponent -eta{q,.,q} - xi{p,.,p} + zeta{q,.,p} + zeta*{p,.,q}.
// The {q,.,q} coefficient is called eta_form in error messages to avoid the
// collision with the dimensionless scale eta used by the positivity module.
struct LemmaForm {
  double eta = 0.0;   // coefficient of {q,.,q}, >= 0 for the lemma
  double xi = 0.0;    // coefficient of {p,.,p}, >= 0 for the lemma
  Complex zeta{0.0, 0.0};

  // Applicability of the moment formulas: Re^2 zeta <= eta * xi.
  bool applicable(double tol = 1e-12) const {
    const double re = zeta.real();
    return re * re <= eta * xi + tol;
  }
  void validate() const {
    if (!applicable())
      throw std::invalid_argument("LemmaForm: Re^2 zeta <= eta_form * xi required");
  }
};

// Raw second moments <q^2>, <p^2>, <qp+pq>.
struct SecondMoments {
  double q2 = 0.0;
  double p2 = 0.0;
  double qp_sym = 0.0;
};

// Second moments after applying exp of the form to a state with moments
// `sigma`:
//   <q^2> -> e^{-x} <q^2> + K xi,   <p^2> -> e^{-x} <p^2> + K eta,
//   <qp+pq> -> e^{-x} <qp+pq> + 2 K Re zeta,
// with x = 4 hbar Im zeta and K = hbar (1 - e^{-x}) / (2 Im zeta); the
// Im zeta -> 0 limit (K -> 2 hbar^2) is evaluated through an expm1 kernel.
SecondMoments lemma_moments(const LemmaForm& form, const SecondMoments& sigma,
                            double hbar);

// First moments scale isotropically by e^{-2 hbar Im zeta} under the same
// map (derived from the dual-scaling action on Weyl-ordered monomials and
// the mean invariance of the Hermitian-sandwich factors).
double lemma_mean_scale(const LemmaForm& form, double hbar);

// The affine map on second moments as (scale, offset) data; composition of
// two exponentials composes these maps.
struct MomentMap {
  double scale = 1.0;            // e^{-4 hbar Im zeta}
  Eigen::Vector3d offset{0, 0, 0};  // ordering (q2, p2, qp_sym)
  SecondMoments apply(const SecondMoments& m) const {
    return {scale * m.q2 + offset[0], scale * m.p2 + offset[1],
            scale * m.qp_sym + offset[2]};
  }
  MomentMap then(const MomentMap& second) const {
    MomentMap out;
    out.scale = scale * second.scale;
    out.offset = second.scale * offset + second.offset;
    return out;
  }
};
MomentMap lemma_moment_map(const LemmaForm& form, double hbar);
// Recover the unique form with the given affine moment action (scale != 1).
LemmaForm form_from_moment_map(const MomentMap& map, double hbar);

// Theorem hypotheses at the probed time:
//   Im zeta > 0, eta_form > 0, 0 <= eta xi - Re^2 zeta < Im^2 zeta.
bool theorem_hypotheses_hold(const LemmaForm& form, std::string* why = nullptr);

// lambda_2 with d_p > 0 and hbar Im zeta + lambda_2 Re zeta > 0, following
// the proof's case split on Re zeta.
double choose_lambda2(const LemmaForm& form, double hbar);

struct WitnessConstruction {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double d_p = 0.0;
  double s_minus = 0.0;
  double s_plus = 0.0;
  double lambda = 0.0;
  double beta_bar = 0.0;
  double I_value = 0.0;   // < 0 on success
  GaussianState sigma;    // pure initial state with the lambda moments
};

// Constructive recipe for an initial state driven to non-positivity by the
// form.  Every intermediate inequality is re-checked numerically; a failed
// gate throws GateError naming the equation.
WitnessConstruction build_witness(const LemmaForm& form, double hbar);

// I(beta, lambda) = Tr[(q + (beta + i lambda) p) rho (q + (beta - i lambda) p)]
// assembled from the evolved moments; negative values certify that the
// evolved state is non-positive.
double witness_value(const LemmaForm& form, const SecondMoments& sigma,
                     double beta, double lambda, double hbar);

}  // namespace qbrown::witness
