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

// Command-line front end: parameter scans, trajectory dumps, positivity
// reports, witness construction, oracle comparisons.  All outputs are
// deterministic: rerunning with the same configuration reproduces the files
// byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "io.hpp"
#include "qbrown/fock.hpp"
#include "qbrown/haake_reibold.hpp"
#include "qbrown/positivity.hpp"
#include "qbrown/qbe.hpp"
#include "qbrown/wei_norman.hpp"
#include "qbrown/witness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qbrown;

namespace {

struct CommonOpts {
  std::string out = ".";
  std::string formats = "csv,svg";
  std::uint64_t seed = 20120423ull;

  bool want(const std::string& f) const {
    return ("," + formats + ",").find("," + f + ",") != std::string::npos;
  }
  fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

int max_threads() {
  if (const char* env = std::getenv("QBROWN_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// index-ordered parallel map; results are deterministic regardless of the
// thread cap
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const int workers = std::min(max_threads(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void stamp(io::CsvWriter& csv, const std::string& command,
           const std::string& params, const CommonOpts& common) {
  csv.comment(std::string("artifact: ") + kArtifactVersion);
  csv.comment("command: " + command);
  csv.comment("params: " + params);
  csv.comment("seed: " + std::to_string(common.seed));
}

OscillatorParams qbe_params(double eta_tilde, double r_over_eta, double gamma,
                            double m, double hbar) {
  OscillatorParams p;
  p.m = m;
  p.hbar = hbar;
  p.gamma = gamma;
  p.omega = gamma * std::sqrt(1.0 + eta_tilde * eta_tilde);
  const double ratio = std::sqrt(1.0 - r_over_eta * r_over_eta);
  p.kT = p.hbar * p.omega / (2.0 * ratio);
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// criterion-scan

int run_criterion_scan(double eta_tilde, double r, double gamma, double u_max,
                       int points, const CommonOpts& common) {
  if (eta_tilde <= 0.0 || r < 0.0 || r > eta_tilde)
    throw std::invalid_argument(
        "criterion-scan: need 0 <= r <= eta_tilde and eta_tilde > 0");
  const auto p = qbe_params(eta_tilde, r / eta_tilde, gamma, 1.0, 1.0);

  std::vector<double> us(static_cast<size_t>(points)),
      ss(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    us[static_cast<size_t>(i)] = u_max * i / (points - 1);
    ss[static_cast<size_t>(i)] = qbe::criterion(p, us[static_cast<size_t>(i)]);
  }

  io::CsvWriter csv;
  stamp(csv, "criterion-scan",
        "eta_tilde=" + io::fmt17(eta_tilde) + " r=" + io::fmt17(r) +
            " gamma=" + io::fmt17(gamma) + " u_max=" + io::fmt17(u_max) +
            " points=" + std::to_string(points),
        common);
  csv.header({"u", "s"});
  for (int i = 0; i < points; ++i)
    csv.row({io::fmt17(us[static_cast<size_t>(i)]),
             io::fmt17(ss[static_cast<size_t>(i)])});
  std::string crossings = "sign changes at u ~";
  int found = 0;
  for (int i = 1; i < points; ++i)
    if ((ss[static_cast<size_t>(i - 1)] > 0.0) !=
        (ss[static_cast<size_t>(i)] > 0.0)) {
      crossings += " " + io::fmt17(0.5 * (us[static_cast<size_t>(i - 1)] +
                                          us[static_cast<size_t>(i)]));
      ++found;
    }
  csv.footer(found ? crossings : "no sign changes in range");
  if (common.want("csv")) csv.write(common.path("criterion_scan.csv").string());
  if (common.want("svg"))
    io::write_svg_lines(common.path("criterion_scan.svg").string(),
                        "positivity criterion s(u)", "u = Gamma t", "s", us,
                        {{"s(u)", ss}});
  std::cout << "criterion-scan: " << found << " sign changes, wrote "
            << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// qbe-solve

int run_qbe_solve(double eta_tilde, double r, double gamma, double t_max,
                  int points, const CommonOpts& common) {
  const auto p = qbe_params(eta_tilde, r / eta_tilde, gamma, 1.0, 1.0);
  io::CsvWriter csv;
  stamp(csv, "qbe-solve",
        "eta_tilde=" + io::fmt17(eta_tilde) + " r=" + io::fmt17(r) +
            " gamma=" + io::fmt17(gamma) + " t_max=" + io::fmt17(t_max),
        common);
  csv.header({"t", "u", "delta", "l1", "l3", "bq_re", "bq_im", "bp_re", "bp_im",
              "s", "class"});
  std::vector<double> ts(static_cast<size_t>(points)),
      deltas(static_cast<size_t>(points)), ss(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = t_max * i / (points - 1);
    const auto sol = qbe::solve_at(p, t);
    ts[static_cast<size_t>(i)] = t;
    deltas[static_cast<size_t>(i)] = sol.delta;
    ss[static_cast<size_t>(i)] = sol.s;
    const char* cls = "marginal";
    if (qbe::classify(sol.s) == qbe::PositivityClass::excess_fluctuations)
      cls = "excess-fluctuations";
    else if (qbe::classify(sol.s) == qbe::PositivityClass::non_positive)
      cls = "non-positive";
    csv.row({io::fmt17(t), io::fmt17(sol.u), io::fmt17(sol.delta),
             io::fmt17(sol.l1), io::fmt17(sol.l3), io::fmt17(sol.b_q.real()),
             io::fmt17(sol.b_q.imag()), io::fmt17(sol.b_p.real()),
             io::fmt17(sol.b_p.imag()), io::fmt17(sol.s), cls});
  }
  if (common.want("csv")) csv.write(common.path("qbe_solve.csv").string());
  if (common.want("svg"))
    io::write_svg_lines(common.path("qbe_solve.svg").string(),
                        "standard QBE closed-form data", "t", "value", ts,
                        {{"delta", deltas}, {"s", ss}});
  std::cout << "qbe-solve: wrote " << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// hr-coeffs

int run_hr_coeffs(double alpha, double kappa, double omega0, double kT,
                  double t_max, int points, const CommonOpts& common) {
  hr::HrModelParams p;
  p.alpha = alpha;
  p.kappa = kappa;
  p.omega0 = omega0;
  p.kT = kT;
  p.validate();
  const auto solved = hr::solve_gamma_omega(p);
  const TimeGrid grid = TimeGrid::uniform(0.0, t_max, points - 1);
  const auto table = hr::hr_coeffs(p, grid);
  std::cout << "hr-coeffs: Gamma = " << solved.Gamma
            << ", Omega = " << solved.Omega << ", omega = " << solved.omega
            << "; R(0) = 1 gate passed\n";

  io::CsvWriter csv;
  stamp(csv, "hr-coeffs",
        "alpha=" + io::fmt17(alpha) + " kappa=" + io::fmt17(kappa) +
            " omega0=" + io::fmt17(omega0) + " kT=" + io::fmt17(kT) +
            " t_max=" + io::fmt17(t_max) + " points=" + std::to_string(points),
        common);
  csv.comment("solved: Gamma=" + io::fmt17(solved.Gamma) +
              " Omega=" + io::fmt17(solved.Omega) +
              " omega=" + io::fmt17(solved.omega));
  csv.header({"t", "A", "Adot", "Addot", "R", "X", "Y", "Xdot", "f_pq", "f_pp",
              "d_pp", "d_pq", "w1", "w2", "w3", "w4"});
  std::vector<double> ts, dpp, dpq, fpp;
  for (const auto& c : table) {
    const auto w = hr::closed_form_w(p, c);
    csv.row({io::fmt17(c.t), io::fmt17(c.A), io::fmt17(c.Adot),
             io::fmt17(c.Addot), io::fmt17(c.R), io::fmt17(c.X), io::fmt17(c.Y),
             io::fmt17(c.Xdot), io::fmt17(c.f_pq), io::fmt17(c.f_pp),
             io::fmt17(c.d_pp), io::fmt17(c.d_pq), io::fmt17(w.w1),
             io::fmt17(w.w2), io::fmt17(w.w3), io::fmt17(w.w4)});
    ts.push_back(c.t);
    dpp.push_back(c.d_pp);
    dpq.push_back(c.d_pq);
    fpp.push_back(c.f_pp);
  }
  if (common.want("csv")) csv.write(common.path("hr_coeffs.csv").string());
  if (common.want("svg"))
    io::write_svg_lines(common.path("hr_coeffs.svg").string(),
                        "exact master-equation coefficients", "t", "value", ts,
                        {{"d_pp", dpp}, {"d_pq", dpq}, {"f_pp", fpp}});
  std::cout << "hr-coeffs: wrote " << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// coefficient presets shared by wn-integrate / positivity-report

struct PresetResult {
  wn::MasterEqCoefficients coeffs;
  std::string description;
};

PresetResult make_preset(const std::string& preset, double eta_tilde, double r,
                         double gamma, double alpha, double kappa,
                         double omega0, double kT, double t_max, int points) {
  if (preset == "qbe") {
    const auto p = qbe_params(eta_tilde, r / eta_tilde, gamma, 1.0, 1.0);
    return {qbe::master_eq_coefficients(p),
            "qbe eta_tilde=" + io::fmt17(eta_tilde) + " r=" + io::fmt17(r)};
  }
  if (preset == "hr") {
    hr::HrModelParams p;
    p.alpha = alpha;
    p.kappa = kappa;
    p.omega0 = omega0;
    p.kT = kT;
    p.validate();
    const TimeGrid grid = TimeGrid::uniform(0.0, t_max, points - 1);
    const auto table = hr::hr_coeffs(p, grid);
    return {hr::to_master_eq(p, table, grid),
            "hr alpha=" + io::fmt17(alpha) + " kappa=" + io::fmt17(kappa) +
                " omega0=" + io::fmt17(omega0) + " kT=" + io::fmt17(kT)};
  }
  if (preset == "constant") {
    return {wn::MasterEqCoefficients::constants(0.4, 0.05, 0.5, 0.3, 0.1,
                                                {0.02, -0.06}),
            "constant b=(0.4,0.05,0.5) k=(0.3,0.1,0.02-0.06i)"};
  }
  if (preset == "decay-osc") {
    wn::MasterEqCoefficients c;
    c.b11 = [](double t) { return 0.4 + 0.1 * std::sin(t); };
    c.b12 = [](double t) { return 0.05 * std::cos(2.0 * t); };
    c.b22 = [](double) { return 0.5; };
    c.k1 = [](double t) { return 0.3 * std::exp(-0.2 * t); };
    c.k2 = [](double t) { return 0.1 + 0.05 * std::sin(t); };
    c.k3 = [](double t) { return Complex(0.02 * std::cos(t), -0.06); };
    return {c, "decay-osc synthetic set"};
  }
  throw std::invalid_argument("unknown preset '" + preset +
                              "' (use qbe, hr, constant, decay-osc)");
}

// ---------------------------------------------------------------------------
// wn-integrate

int run_wn_integrate(const PresetResult& preset, double t_max, int points,
                     const CommonOpts& common) {
  const TimeGrid grid = TimeGrid::uniform(0.0, t_max, points - 1);
  const auto traj = integrate_w(preset.coeffs, grid, 1.0);
  const double resid24 = wn::check_identity_24(preset.coeffs, traj, 1.0);

  io::CsvWriter csv;
  stamp(csv, "wn-integrate", preset.description + " t_max=" + io::fmt17(t_max),
        common);
  csv.header({"t", "w1", "w2", "w3", "w4"});
  std::vector<double> ts, w1, w2, w3;
  for (size_t i = 0; i < traj.t.size(); ++i) {
    csv.row({io::fmt17(traj.t[i]), io::fmt17(traj.w[i].w1),
             io::fmt17(traj.w[i].w2), io::fmt17(traj.w[i].w3),
             io::fmt17(traj.w[i].w4)});
    ts.push_back(traj.t[i]);
    w1.push_back(traj.w[i].w1);
    w2.push_back(traj.w[i].w2);
    w3.push_back(traj.w[i].w3);
  }
  csv.footer("identity (24) max relative residual: " + io::fmt17(resid24));
  if (common.want("csv")) csv.write(common.path("wn_trajectory.csv").string());
  if (common.want("svg"))
    io::write_svg_lines(common.path("wn_trajectory.svg").string(),
                        "exponent coordinates", "t", "w", ts,
                        {{"w1", w1}, {"w2", w2}, {"w3", w3}});
  std::cout << "wn-integrate: identity(24) residual " << resid24 << ", wrote "
            << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// positivity-report

int run_positivity_report(const PresetResult& preset, double eta, double t_max,
                          int points, const CommonOpts& common) {
  const TimeGrid grid = TimeGrid::uniform(0.0, t_max, points - 1);
  const auto traj = pos::integrate_u(preset.coeffs, eta, grid, 1.0);
  const auto rep = pos::sufficient_checks(traj, 1.0);
  const auto wtraj = integrate_w(preset.coeffs, grid, 1.0);

  io::CsvWriter csv;
  stamp(csv, "positivity-report",
        preset.description + " eta=" + io::fmt17(eta) +
            " t_max=" + io::fmt17(t_max),
        common);
  csv.header({"t", "u1", "u2", "u3", "u4", "norm", "cond47", "cond49_54",
              "cond56_54", "cond57_54"});
  std::vector<double> ts, norms;
  for (size_t i = 0; i < rep.t.size(); ++i) {
    const bool c47 = pos::condition_47(wtraj.w[i], 1.0);
    csv.row({io::fmt17(rep.t[i]), io::fmt17(traj.u[i].u1),
             io::fmt17(traj.u[i].u2), io::fmt17(traj.u[i].u3),
             io::fmt17(traj.u[i].u4), io::fmt17(rep.norm[i]),
             c47 ? "true" : "false", to_string(rep.cond49_54[i]),
             to_string(rep.cond56_54[i]), to_string(rep.cond57_54[i])});
    ts.push_back(rep.t[i]);
    norms.push_back(rep.norm[i]);
  }
  csv.footer(std::string("implication audit: ") +
             (rep.implication_audit_ok ? "ok" : "VIOLATED"));
  csv.footer("weight consistency |2 hbar^2 int h4 - w4|: " +
             io::fmt17(rep.weight_consistency));
  if (common.want("csv"))
    csv.write(common.path("positivity_report.csv").string());
  if (common.want("svg"))
    io::write_svg_lines(common.path("positivity_report.svg").string(),
                        "Minkowski norm along the trajectory", "t", "u.u", ts,
                        {{"u_mu u^mu", norms}});
  std::cout << "positivity-report: audit "
            << (rep.implication_audit_ok ? "ok" : "VIOLATED") << ", wrote "
            << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// witness

int run_witness(double eta_form, double xi, double zeta_re, double zeta_im,
                double hbar, const std::string& oracle_ns,
                const CommonOpts& common) {
  witness::LemmaForm form;
  form.eta = eta_form;
  form.xi = xi;
  form.zeta = Complex(zeta_re, zeta_im);
  const auto wc = witness::build_witness(form, hbar);

  std::vector<int> ns;
  {
    std::stringstream ss(oracle_ns);
    std::string tok;
    while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
  }
  std::vector<double> eigs(ns.size());
  parallel_for(static_cast<int>(ns.size()), [&](int i) {
    const auto ops =
        fock::TruncatedOperators::make(ns[static_cast<size_t>(i)], 1.0, 1.0, hbar);
    const auto rho0 = fock::gaussian_to_fock(wc.sigma, ops);
    const auto gen = fock::GeneratorCoeffs::from_form(form);
    const ComplexMatrix evolved = fock::apply_exp(
        [&](const ComplexMatrix& m) { return fock::apply_generator(gen, ops, m); },
        rho0.rho);
    eigs[static_cast<size_t>(i)] = hermitian_min_eig(evolved);
  });

  json rep;
  rep["artifact"] = kArtifactVersion;
  rep["inputs"] = {{"eta_form", eta_form},
                   {"xi", xi},
                   {"zeta_re", zeta_re},
                   {"zeta_im", zeta_im},
                   {"hbar", hbar}};
  rep["lambda1"] = wc.lambda1;
  rep["lambda2"] = wc.lambda2;
  rep["lambda3"] = wc.lambda3;
  rep["d_p"] = wc.d_p;
  rep["s_minus"] = wc.s_minus;
  rep["s_plus"] = wc.s_plus;
  rep["lambda"] = wc.lambda;
  rep["beta_bar"] = wc.beta_bar;
  rep["I_value"] = wc.I_value;
  json oracle = json::array();
  for (size_t i = 0; i < ns.size(); ++i)
    oracle.push_back({{"N", ns[i]}, {"min_eig", eigs[i]}});
  rep["oracle_min_eigenvalues"] = oracle;

  std::ofstream out(common.path("witness_report.json"), std::ios::binary);
  out << rep.dump(2) << "\n";
  std::cout << "witness: I = " << wc.I_value << ", oracle min eig at N=" << ns[0]
            << ": " << eigs[0] << ", wrote " << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// identity-check

int run_identity_check(int N, const CommonOpts& common) {
  const auto ops = fock::TruncatedOperators::make(N, 1.0, 1.0, 1.0);
  GaussianState g;
  g.cov_qq = 0.6;
  g.cov_pp = 0.55;
  g.cov_qp = -0.1;
  g.mean_q = 0.5;
  const auto rho = fock::gaussian_to_fock(g, ops);
  ComplexMatrix vac = ComplexMatrix::Zero(N, N);
  vac(0, 0) = 1.0;

  json rep;
  rep["artifact"] = kArtifactVersion;
  rep["N"] = N;
  json id16 = json::array(), id17 = json::array();
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const auto res16 = fock::check_identity_16(ops.a, r, rho.rho);
    id16.push_back(
        {{"r", r}, {"d12", res16.d12}, {"d13", res16.d13}, {"d23", res16.d23}});
  }
  for (double r : {0.1, 0.3}) {
    const auto res17 = fock::check_identity_17(ops.a, r, vac);
    id17.push_back(
        {{"r", r}, {"d12", res17.d12}, {"d13", res17.d13}, {"d23", res17.d23}});
  }
  rep["identity_16"] = id16;
  rep["identity_17"] = id17;
  rep["identity_79_q_dephasing"] = fock::check_identity_79(ops.q, 0.3, vac);
  {
    const ComplexMatrix n_op = ops.a.adjoint() * ops.a;
    rep["identity_79_phase_diffusion"] =
        fock::check_identity_79(n_op, 0.2, rho.rho);
  }
  ComplexMatrix sparse = ComplexMatrix::Zero(N, N);
  sparse(0, 0) = 0.5;
  sparse(1, 1) = 0.2;
  sparse(2, 2) = 0.3;
  sparse(0, 2) = sparse(2, 0) = 0.25;
  rep["identity_20"] = fock::check_identity_20(ops, 0.3, 0.05, sparse);
  Rng rng(common.seed);
  rep["table_1_max_residual"] =
      fock::table1_max_residual(ops, 0.3, 0.2, 0.7, 8, rng);

  std::ofstream out(common.path("identity_check.json"), std::ios::binary);
  out << rep.dump(2) << "\n";
  std::cout << "identity-check: wrote " << common.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

int run_compare(const std::string& scenario, double eta_tilde, double r,
                double gamma, double alpha, double kappa, double omega0,
                double kT, double t_max, int points, int N,
                const CommonOpts& common) {
  io::CsvWriter csv;
  double worst = 0.0;
  double tolerance = 0.0;
  std::vector<double> ts, resids;

  if (scenario == "wn-vs-closed-form") {
    tolerance = 1e-4;
    hr::HrModelParams p;
    p.alpha = alpha;
    p.kappa = kappa;
    p.omega0 = omega0;
    p.kT = kT;
    p.validate();
    const TimeGrid grid = TimeGrid::uniform(0.0, t_max, points - 1);
    const auto table = hr::hr_coeffs(p, grid);
    const auto coeffs = hr::to_master_eq(p, table, grid);
    const auto traj = integrate_w(coeffs, grid, p.hbar, 1e-9);
    csv.header({"t", "rel_residual"});
    for (size_t i = 0; i < grid.values.size(); ++i) {
      const auto ref = hr::closed_form_w(p, table[i]);
      const double scale = std::max({1e-6, std::abs(ref.w1), std::abs(ref.w2)});
      const double resid =
          std::max({std::abs(traj.w[i].w1 - ref.w1),
                    std::abs(traj.w[i].w2 - ref.w2),
                    std::abs(traj.w[i].w3 - ref.w3)}) /
          scale;
      csv.row({io::fmt17(grid.values[i]), io::fmt17(resid)});
      ts.push_back(grid.values[i]);
      resids.push_back(resid);
      worst = std::max(worst, resid);
    }
  } else if (scenario == "analytic-vs-oracle") {
    tolerance = 1e-4;
    const auto p = qbe_params(eta_tilde, r / eta_tilde, gamma, 1.0, 1.0);
    const auto ops = fock::TruncatedOperators::make(N, p.m, p.omega, p.hbar);
    const auto G = fock::build_generator(
        fock::GeneratorCoeffs::at(qbe::master_eq_coefficients(p), 0.0), ops);
    GaussianState init;
    init.cov_qq = 0.4 * p.hbar / (p.m * p.omega);
    init.cov_pp = 0.8 * p.hbar * p.m * p.omega;
    init.cov_qp = 0.1 * p.hbar;
    init.mean_q = 0.5 * std::sqrt(p.hbar / (p.m * p.omega));
    init.mean_p = -0.3 * std::sqrt(p.hbar * p.m * p.omega);
    if (!init.allowable(p.hbar, 0.0))
      throw std::invalid_argument("compare: initial state not allowable");
    const auto rho0 = fock::gaussian_to_fock(init, ops);
    std::vector<double> samples(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
      samples[static_cast<size_t>(i)] = t_max * i / (points - 1);
    const auto res = fock::propagate(G, {rho0.rho}, samples);
    const ComplexMatrix H = 0.5 * p.m * p.omega * p.omega * ops.q2 +
                            0.5 * p.gamma * (ops.qp + ops.pq) +
                            (0.5 / p.m) * ops.p2;
    csv.header({"t", "max_moment_residual"});
    for (size_t k = 0; k < samples.size(); ++k) {
      const ComplexMatrix U =
          expm(ComplexMatrix(Complex(0.0, samples[k] / p.hbar) * H));
      const ComplexMatrix rhoI = U * res.states[k][0] * U.adjoint();
      const GaussianState got = fock::fock_moments(rhoI, ops);
      const GaussianState want = qbe::propagate_gaussian(p, samples[k], init);
      const double resid =
          std::max({std::abs(got.mean_q - want.mean_q),
                    std::abs(got.mean_p - want.mean_p),
                    std::abs(got.cov_qq - want.cov_qq),
                    std::abs(got.cov_pp - want.cov_pp),
                    std::abs(got.cov_qp - want.cov_qp)});
      csv.row({io::fmt17(samples[k]), io::fmt17(resid)});
      ts.push_back(samples[k]);
      resids.push_back(resid);
      worst = std::max(worst, resid);
    }
  } else if (scenario == "riccati-vs-direct") {
    tolerance = 1e-6;
    auto coeffs =
        wn::MasterEqCoefficients::constants(0.5, 0.0, 0.5, 0.0, 0.0, {0.0, 0.0});
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.2, points - 1);
    const Eigen::Vector3d w0(2.0, 0.0, 0.0);  // on the cone
    const auto rec = wn::riccati_reduce(coeffs, grid, 1, w0);
    csv.header({"t", "rel_residual"});
    for (size_t i = 0; i < rec.t.size(); ++i) {
      const Eigen::Vector3d direct =
          wn::principal_matrix(coeffs, rec.t[i], 0.0) * w0;
      const double resid = std::abs(rec.w_component[i] - direct[0]) /
                           std::max(1.0, std::abs(direct[0]));
      csv.row({io::fmt17(rec.t[i]), io::fmt17(resid)});
      ts.push_back(rec.t[i]);
      resids.push_back(resid);
      worst = std::max(worst, resid);
    }
  } else {
    throw std::invalid_argument(
        "unknown scenario '" + scenario +
        "' (use wn-vs-closed-form, analytic-vs-oracle, riccati-vs-direct)");
  }

  const bool pass = worst < tolerance;
  io::CsvWriter out;
  stamp(out, "compare", "scenario=" + scenario, common);
  out.comment("max residual: " + io::fmt17(worst) +
              "  tolerance: " + io::fmt17(tolerance) +
              "  verdict: " + (pass ? "pass" : "fail"));
  if (common.want("csv")) {
    std::ofstream f(common.path("compare_" + scenario + ".csv"),
                    std::ios::binary);
    f << out.str() << csv.str();
  }
  if (common.want("svg") && ts.size() >= 2)
    io::write_svg_lines(common.path("compare_" + scenario + ".svg").string(),
                        "comparison residuals: " + scenario, "t", "residual",
                        ts, {{"residual", resids}});
  std::cout << "compare " << scenario << ": max residual " << worst << " vs "
            << tolerance << " -> " << (pass ? "pass" : "fail") << "\n";
  if (!pass)
    throw GateError("cli", "compare tolerance",
                    scenario + " residual " + io::fmt17(worst));
  return 0;
}

// JSON-config fallback: options not given on the command line take their
// values from the config file.
void merge_config(CLI::App* cmd, const json& cfg) {
  if (cfg.is_null()) return;
  for (CLI::Option* opt : cmd->get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames()[0];
    if (name.empty() || opt->count() > 0) continue;
    if (cfg.contains(name)) {
      const auto& v = cfg.at(name);
      opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
      opt->run_callback();  // flush into the bound variable post-parse
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-autonomous quantum Brownian master equations: exact "
               "propagators, positivity conditions, and a Fock-space oracle"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  CommonOpts common;
  app.add_option("--out", common.out, "output directory");
  app.add_option("--format", common.formats, "comma list of csv,svg,json");
  app.add_option("--seed", common.seed, "seed for randomized sweeps");

  double eta_tilde = 10.0, r = 0.1, gamma = 1.0;
  double u_max = 8.0, t_max = 4.0;
  int points = 801;
  double alpha = 10.0, kappa = 0.05, omega0 = 1.0, kT = 5.0;
  double eta_scale = 1.0;
  double eta_form = 1.0, xi = 0.0, zeta_re = 0.0, zeta_im = 1.0, hbar = 1.0;
  std::string preset = "constant";
  std::string scenario = "wn-vs-closed-form";
  std::string oracle_ns = "40,60,80";
  int N = 40;

  auto add_qbe_opts = [&](CLI::App* cmd) {
    cmd->add_option("--eta-tilde", eta_tilde, "eta~ = sqrt(omega^2/gamma^2 - 1)");
    cmd->add_option("--r", r, "r parameter (0 <= r <= eta~)");
    cmd->add_option("--gamma", gamma, "coupling rate");
  };
  auto add_hr_opts = [&](CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "cutoff frequency");
    cmd->add_option("--kappa", kappa, "coupling strength");
    cmd->add_option("--omega0", omega0, "bare frequency");
    cmd->add_option("--kT", kT, "thermal energy");
  };
  auto add_grid_opts = [&](CLI::App* cmd) {
    cmd->add_option("--t-max", t_max, "time range");
    cmd->add_option("--points", points, "number of samples");
  };

  auto* scan =
      app.add_subcommand("criterion-scan", "scan s(u) = sin^2 - r^2 sinh^2");
  add_qbe_opts(scan);
  scan->add_option("--u-max", u_max, "scan range in u = Gamma t");
  scan->add_option("--points", points, "number of samples");

  auto* solve =
      app.add_subcommand("qbe-solve", "closed-form propagator data over time");
  add_qbe_opts(solve);
  add_grid_opts(solve);

  auto* hrc =
      app.add_subcommand("hr-coeffs", "exact bath-model coefficient tables");
  add_hr_opts(hrc);
  add_grid_opts(hrc);

  auto* wni =
      app.add_subcommand("wn-integrate", "integrate the exponent coordinates");
  wni->add_option("--preset", preset, "qbe | hr | constant | decay-osc");
  add_qbe_opts(wni);
  add_hr_opts(wni);
  add_grid_opts(wni);

  auto* posr = app.add_subcommand("positivity-report",
                                  "u-variable sufficient conditions");
  posr->add_option("--preset", preset, "qbe | hr | constant | decay-osc");
  posr->add_option("--eta", eta_scale, "dimensionless scale eta");
  add_qbe_opts(posr);
  add_hr_opts(posr);
  add_grid_opts(posr);

  auto* wit =
      app.add_subcommand("witness", "construct a non-positivity witness");
  wit->add_option("--eta-form", eta_form, "coefficient of {q,.,q}");
  wit->add_option("--xi", xi, "coefficient of {p,.,p}");
  wit->add_option("--zeta-re", zeta_re, "Re coefficient of {q,.,p}");
  wit->add_option("--zeta-im", zeta_im, "Im coefficient of {q,.,p}");
  wit->add_option("--hbar", hbar, "action quantum");
  wit->add_option("--oracle-n", oracle_ns, "comma list of truncations");

  auto* idc =
      app.add_subcommand("identity-check", "operator identity residuals");
  idc->add_option("--n", N, "truncation");

  auto* cmp = app.add_subcommand("compare", "two-path comparison scenarios");
  cmp->add_option("--scenario", scenario,
                  "wn-vs-closed-form | analytic-vs-oracle | riccati-vs-direct");
  add_qbe_opts(cmp);
  add_hr_opts(cmp);
  add_grid_opts(cmp);
  cmp->add_option("--n", N, "oracle truncation");

  auto* orc = app.add_subcommand("oracle-compare",
                                 "analytic-vs-oracle comparison (alias)");
  add_qbe_opts(orc);
  add_grid_opts(orc);
  orc->add_option("--n", N, "oracle truncation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      json cfg;
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config " + config_path);
      in >> cfg;
      for (CLI::App* sub : {scan, solve, hrc, wni, posr, wit, idc, cmp, orc})
        if (sub->parsed()) merge_config(sub, cfg);
      if (cfg.contains("out") && common.out == ".")
        common.out = cfg["out"].get<std::string>();
      if (cfg.contains("format") && common.formats == "csv,svg")
        common.formats = cfg["format"].get<std::string>();
      if (cfg.contains("seed") && common.seed == 20120423ull)
        common.seed = cfg["seed"].get<std::uint64_t>();
    }
    fs::create_directories(common.out);

    if (scan->parsed())
      return run_criterion_scan(eta_tilde, r, gamma, u_max, points, common);
    if (solve->parsed())
      return run_qbe_solve(eta_tilde, r, gamma, t_max, points, common);
    if (hrc->parsed())
      return run_hr_coeffs(alpha, kappa, omega0, kT, t_max, points, common);
    if (wni->parsed())
      return run_wn_integrate(make_preset(preset, eta_tilde, r, gamma, alpha,
                                          kappa, omega0, kT, t_max, points),
                              t_max, points, common);
    if (posr->parsed())
      return run_positivity_report(
          make_preset(preset, eta_tilde, r, gamma, alpha, kappa, omega0, kT,
                      t_max, points),
          eta_scale, t_max, points, common);
    if (wit->parsed())
      return run_witness(eta_form, xi, zeta_re, zeta_im, hbar, oracle_ns,
                         common);
    if (idc->parsed()) return run_identity_check(N, common);
    if (cmp->parsed())
      return run_compare(scenario, eta_tilde, r, gamma, alpha, kappa, omega0,
                         kT, t_max, points, N, common);
    if (orc->parsed())
      return run_compare("analytic-vs-oracle", eta_tilde, r, gamma, alpha,
                         kappa, omega0, kT, t_max, points, N, common);
    return 2;
  } catch (const GateError& e) {
    std::cerr << "numerical failure in " << e.where() << " (gate: " << e.gate()
              << "): " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
