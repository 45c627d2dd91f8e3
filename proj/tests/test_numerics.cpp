#include <doctest.h>

#include <cmath>

#include "qbrown/numerics.hpp"
#include "support/oracles.hpp"

using namespace qbrown;

TEST_CASE("rk_integrate: zero field stays constant") {
  Vector y0(2);
  y0 << 1.0, 2.0;
  auto f = [](double, const Vector& y) { return Vector(Vector::Zero(y.size())); };
  const auto traj = rk_integrate(f, y0, TimeGrid::uniform(0.0, 1.0, 10));
  for (const Vector& y : traj) {
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("rk_integrate: exponential growth hits e at t=1") {
  Vector y0(1);
  y0 << 1.0;
  auto f = [](double, const Vector& y) { return y; };
  const auto traj = rk_integrate(f, y0, TimeGrid::uniform(0.0, 1.0, 16), 1e-10);
  CHECK(std::abs(traj.back()[0] - std::exp(1.0)) < 1e-8);
}

TEST_CASE("rk_integrate: constant 3x3 system matches matrix exponential") {
  // the homogeneous exponent system with b11 = b22 = 1/2, b12 = 0
  Matrix A(3, 3);
  A << 0.0, 0.0, -2.0,
       0.0, 0.0, 2.0,
       1.0, -1.0, 0.0;
  Vector y0(3);
  y0 << 0.3, -0.2, 0.7;
  auto f = [&A](double, const Vector& y) { return Vector(A * y); };
  const TimeGrid grid = TimeGrid::uniform(0.0, 2.0, 20);
  const auto traj = rk_integrate(f, y0, grid, 1e-10);
  for (size_t i = 0; i < grid.values.size(); ++i) {
    const Vector ref = oracles::expm_taylor(Matrix(A * grid.values[i])) * y0;
    CHECK((traj[i] - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rk_integrate: divergence is reported with a gate error") {
  Vector y0(1);
  y0 << 1.0;
  auto f = [](double, const Vector& y) { return Vector(y.array().square().matrix() * 1e3); };
  CHECK_THROWS_AS(rk_integrate(f, y0, TimeGrid::uniform(0.0, 10.0, 10)), GateError);
}

TEST_CASE("adaptive_quad: exponential tail") {
  const double v = adaptive_quad([](double x) { return std::exp(-x); }, 0.0,
                                 std::numeric_limits<double>::infinity(), 1e-12);
  CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("adaptive_quad: zero integrand") {
  const double v = adaptive_quad([](double) { return 0.0; }, 0.0, 5.0, 1e-10);
  CHECK(v == 0.0);
}

TEST_CASE("adaptive_quad: algebraic-times-exponential vs dense trapezoid") {
  auto g = [](double x) { return (2.0 / M_PI) * x / (1.0 + x * x) * std::exp(-x); };
  const double v = adaptive_quad(g, 0.0, std::numeric_limits<double>::infinity(), 1e-11);
  // trapezoid oracle on a long finite window (integrand < 1e-40 past x = 100)
  const double ref = oracles::trapezoid(g, 0.0, 100.0, 1000000);
  CHECK(std::abs(v - ref) < 1e-8);
}

TEST_CASE("hermitian_min_eig: identity and diagonal") {
  CHECK(hermitian_min_eig(ComplexMatrix::Identity(3, 3)) == doctest::Approx(1.0));
  ComplexMatrix D = ComplexMatrix::Zero(3, 3);
  D(0, 0) = 1.0;
  D(1, 1) = -0.5;
  D(2, 2) = 2.0;
  CHECK(hermitian_min_eig(D) == doctest::Approx(-0.5));
}

TEST_CASE("hermitian_min_eig: rejects non-Hermitian input") {
  ComplexMatrix M = ComplexMatrix::Zero(2, 2);
  M(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_min_eig(M), std::invalid_argument);
}

TEST_CASE("hermitian_min_eig: planted spectrum matches companion-root oracle") {
  Rng rng(123);
  const int n = 8;
  // random unitary from QR of a random complex matrix
  ComplexMatrix Z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Z(i, j) = Complex(rng.normal(), rng.normal());
  const Eigen::HouseholderQR<ComplexMatrix> qr(Z);
  const ComplexMatrix Q = qr.householderQ();
  Vector planted(n);
  planted << -2.5, -1.0, -0.25, 0.1, 0.4, 1.3, 2.2, 3.7;
  const ComplexMatrix M = Q * planted.asDiagonal() * Q.adjoint();

  CHECK(std::abs(hermitian_min_eig(M) - (-2.5)) < 1e-10);

  const auto poly = oracles::char_poly(M);
  std::vector<double> monic(poly.begin(), poly.end() - 1);
  double min_root = 1e300;
  for (const Complex& root : oracles::companion_roots(monic))
    min_root = std::min(min_root, root.real());
  CHECK(std::abs(hermitian_min_eig(M) - min_root) < 1e-8);
}

TEST_CASE("expm agrees with Taylor oracle") {
  Rng rng(7);
  Matrix A(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
  const Matrix E1 = expm(A);
  const Matrix E2 = oracles::expm_taylor(A);
  CHECK((E1 - E2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("phi kernel: series and direct evaluation agree near zero") {
  for (double mag = 1e-12; mag <= 1e-2; mag *= 10.0) {
    for (double sgn : {-1.0, 1.0}) {
      const double x = sgn * mag;
      CHECK(std::abs(phi_w4(x) - phi_w4_series(x)) < 1e-12);
    }
  }
  CHECK(phi_w4(0.0) == 1.0);
  CHECK(phi_w4(std::log(2.0)) == doctest::Approx(std::log(2.0)));  // e^x - 1 = 1
}

TEST_CASE("CubicTable reproduces smooth samples") {
  const int n = 1000;
  const double dt = 0.01;
  std::vector<double> ys(n + 1);
  for (int i = 0; i <= n; ++i) ys[static_cast<size_t>(i)] = std::sin(dt * i);
  CubicTable tab(0.0, dt, ys);
  for (double t = 0.0; t < 10.0; t += 0.0173)
    CHECK(std::abs(tab(t) - std::sin(t)) < 1e-6);
}

TEST_CASE("Rng streams are deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}
