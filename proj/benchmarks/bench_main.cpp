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

#include <benchmark/benchmark.h>

#include "qbrown/fock.hpp"
#include "qbrown/haake_reibold.hpp"
#include "qbrown/qbe.hpp"
#include "qbrown/wei_norman.hpp"

using namespace qbrown;

namespace {

hr::HrModelParams hr_params() {
  hr::HrModelParams p;
  p.alpha = 10.0;
  p.kappa = 0.05;
  p.omega0 = 1.0;
  p.kT = 5.0;
  return p;
}

void BM_integrate_w(benchmark::State& state) {
  OscillatorParams p;
  p.omega = 2.0;
  p.gamma = 1.0;
  p.kT = 1.2;
  const auto coeffs = qbe::master_eq_coefficients(p);
  const TimeGrid grid = TimeGrid::uniform(0.0, 2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto traj = integrate_w(coeffs, grid, 1.0);
    benchmark::DoNotOptimize(traj);
  }
}
BENCHMARK(BM_integrate_w)->Arg(200)->Arg(800);

void BM_xy_integrals(benchmark::State& state) {
  const auto p = hr_params();
  const auto s = hr::solve_gamma_omega(p);
  const hr::ResponseFunction resp(p, s);
  const double t = 0.5 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto v = hr::xy_integrals(p, s, resp, t);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_xy_integrals)->Arg(1)->Arg(8)->Arg(24);

void BM_generator_apply(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto ops = fock::TruncatedOperators::make(N, 1.0, 2.0, 1.0);
  fock::GeneratorCoeffs g;
  g.b11 = 2.0;
  g.b12 = 0.5;
  g.b22 = 0.5;
  g.k1 = 2.4;
  g.k3 = Complex(0.0, -0.5);
  GaussianState init;
  init.cov_qq = 0.25;
  init.cov_pp = 1.0;
  const ComplexMatrix rho = fock::gaussian_to_fock(init, ops).rho;
  for (auto _ : state) {
    auto out = fock::apply_generator(g, ops, rho);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_generator_apply)->Arg(40)->Arg(60)->Arg(80);

void BM_sparse_generator_matvec(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto ops = fock::TruncatedOperators::make(N, 1.0, 2.0, 1.0);
  fock::GeneratorCoeffs g;
  g.b11 = 2.0;
  g.b12 = 0.5;
  g.b22 = 0.5;
  g.k1 = 2.4;
  g.k3 = Complex(0.0, -0.5);
  const auto G = fock::build_generator(g, ops);
  ComplexMatrix block = ComplexMatrix::Random(N * N, 20);
  for (auto _ : state) {
    ComplexMatrix out = G * block;
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_sparse_generator_matvec)->Arg(40)->Arg(60);

void BM_lemma_moments(benchmark::State& state) {
  witness::LemmaForm f;
  f.eta = 0.3;
  f.xi = 0.4;
  f.zeta = Complex(0.2, 0.15);
  const witness::SecondMoments m0{0.7, 0.6, 0.1};
  for (auto _ : state) {
    auto m = witness::lemma_moments(f, m0, 1.0);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_lemma_moments);

}  // namespace

BENCHMARK_MAIN();
