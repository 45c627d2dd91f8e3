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

#include "qbrown/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <queue>

namespace qbrown {

namespace {

Vector rk4_step(const VectorField& f, double t, const Vector& y, double h) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const Vector k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<Vector> rk4_over_grid(const VectorField& f, const Vector& y0,
                                  const std::vector<double>& ts, int substeps) {
  std::vector<Vector> out;
  out.reserve(ts.size());
  Vector y = y0;
  out.push_back(y);
  for (size_t i = 1; i < ts.size(); ++i) {
    const double h = (ts[i] - ts[i - 1]) / substeps;
    double t = ts[i - 1];
    for (int k = 0; k < substeps; ++k) {
      y = rk4_step(f, t, y, h);
      t += h;
    }
    if (!y.allFinite())
      throw GateError("rk_integrate", "divergence at t",
                      "non-finite state at t = " + std::to_string(ts[i]));
    out.push_back(y);
  }
  return out;
}

double traj_delta(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(1.0, std::max(a[i].cwiseAbs().maxCoeff(),
                                                b[i].cwiseAbs().maxCoeff()));
    d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff() / scale);
  }
  return d;
}

}  // namespace

std::vector<Vector> rk_integrate(const VectorField& f, const Vector& y0,
                                 const TimeGrid& grid, double rtol) {
  grid.validate();
  int substeps = 1;
  std::vector<Vector> prev = rk4_over_grid(f, y0, grid.values, substeps);
  for (int iter = 0; iter < 22; ++iter) {
    substeps *= 2;
    std::vector<Vector> cur = rk4_over_grid(f, y0, grid.values, substeps);
    if (traj_delta(prev, cur) < rtol) return cur;
    prev = std::move(cur);
  }
  throw GateError("rk_integrate", "refinement",
                  "step halving did not reach rtol");
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15(7) adaptive quadrature

namespace {

// GK 15-point nodes/weights on [-1, 1]; odd-index nodes are the Gauss-7 set.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15(const std::function<double(double)>& g, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = g(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = g(c - x);
    const double f2 = g(c + x);
    res_k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
  }
  res_g *= h;
  res_k *= h;
  return {res_k, std::abs(res_k - res_g)};
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& g, double lo,
                     double hi, double rtol, int max_subdivisions) {
  if (!(hi > lo)) throw std::invalid_argument("adaptive_quad: hi > lo required");

  std::function<double(double)> f = g;
  double a = lo, b = hi;
  if (std::isinf(hi)) {
    // x = lo + tan(theta) maps [0, pi/2) onto [lo, inf)
    f = [&g, lo](double theta) {
      const double ct = std::cos(theta);
      const double x = lo + std::tan(theta);
      const double val = g(x);
      return val / (ct * ct);
    };
    a = 0.0;
    b = 0.5 * M_PI * (1.0 - 1e-14);
  }

  struct Interval {
    double a, b, integral, error;
    bool operator<(const Interval& o) const { return error < o.error; }
  };
  std::priority_queue<Interval> heap;
  PanelResult whole = gk15(f, a, b);
  heap.push({a, b, whole.integral, whole.error});
  double total = whole.integral;
  double total_err = whole.error;

  const double atol_floor = 1e-300;
  int n = 1;
  while (total_err > rtol * std::max(std::abs(total), atol_floor) &&
         total_err > 1e-15 * std::max(1.0, std::abs(total))) {
    if (n >= max_subdivisions)
      throw GateError("adaptive_quad", "convergence",
                      "max subdivisions reached, err = " + std::to_string(total_err));
    const Interval iv = heap.top();
    heap.pop();
    const double mid = 0.5 * (iv.a + iv.b);
    if (mid <= iv.a || mid >= iv.b) continue;  // interval at machine resolution
    const PanelResult left = gk15(f, iv.a, mid);
    const PanelResult right = gk15(f, mid, iv.b);
    total += left.integral + right.integral - iv.integral;
    total_err += left.error + right.error - iv.error;
    heap.push({iv.a, mid, left.integral, left.error});
    heap.push({mid, iv.b, right.integral, right.error});
    ++n;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Eigen / expm

double hermitian_min_eig(const ComplexMatrix& M) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("hermitian_min_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

template <typename Mat>
Mat expm_impl(const Mat& A) {
  // Higham's scaling-and-squaring with the degree-13 Pade approximant.
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  const double theta13 = 5.371920351148152;
  if (norm > theta13)
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const Mat As = A / std::pow(2.0, squarings);

  static const double b[14] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
  const auto n = As.rows();
  const Mat I = Mat::Identity(n, n);
  const Mat A2 = As * As;
  const Mat A4 = A2 * A2;
  const Mat A6 = A2 * A4;
  const Mat U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) +
                      b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Mat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                b[4] * A4 + b[2] * A2 + b[0] * I;
  Mat P = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) P = P * P;
  return P;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& A) { return expm_impl<ComplexMatrix>(A); }
Matrix expm(const Matrix& A) { return expm_impl<Matrix>(A); }

// ---------------------------------------------------------------------------
// Kernels

double phi_w4(double x) {
  if (x == 0.0) return 1.0;
  return x / std::expm1(x);
}

double phi_w4_series(double x) {
  // x/(e^x - 1) = 1 - x/2 + x^2/12 - x^4/720 + x^6/30240 - ...
  const double x2 = x * x;
  return 1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0 + x2 * x2 * x2 / 30240.0;
}

double expm1_ratio(double x) {
  if (x == 0.0) return 1.0;
  return -std::expm1(-x) / x;
}

// ---------------------------------------------------------------------------
// CubicTable

CubicTable::CubicTable(double t0, double dt, std::vector<double> samples)
    : t0_(t0), dt_(dt), y_(std::move(samples)) {
  const size_t n = y_.size();
  if (n < 5) throw std::invalid_argument("CubicTable: need >= 5 samples");
  if (!(dt_ > 0.0)) throw std::invalid_argument("CubicTable: dt must be positive");

  // clamped cubic spline; end slopes from one-sided five-point stencils so
  // boundary accuracy matches the interior
  const double s0 = (-25.0 * y_[0] + 48.0 * y_[1] - 36.0 * y_[2] +
                     16.0 * y_[3] - 3.0 * y_[4]) /
                    (12.0 * dt_);
  const double sn = (25.0 * y_[n - 1] - 48.0 * y_[n - 2] + 36.0 * y_[n - 3] -
                     16.0 * y_[n - 4] + 3.0 * y_[n - 5]) /
                    (12.0 * dt_);

  // tridiagonal system for the second derivatives (Thomas algorithm)
  m2_.assign(n, 0.0);
  std::vector<double> diag(n), rhs(n), upper(n, dt_ / 6.0);
  diag[0] = dt_ / 3.0;
  rhs[0] = (y_[1] - y_[0]) / dt_ - s0;
  for (size_t i = 1; i + 1 < n; ++i) {
    diag[i] = 2.0 * dt_ / 3.0;
    rhs[i] = (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / dt_;
  }
  diag[n - 1] = dt_ / 3.0;
  rhs[n - 1] = sn - (y_[n - 1] - y_[n - 2]) / dt_;

  for (size_t i = 1; i < n; ++i) {
    const double w = (dt_ / 6.0) / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m2_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (size_t i = n - 1; i-- > 0;)
    m2_[i] = (rhs[i] - upper[i] * m2_[i + 1]) / diag[i];
}

double CubicTable::operator()(double t) const {
  const auto n = static_cast<long>(y_.size());
  double s = (t - t0_) / dt_;
  if (s <= 0.0) s = 0.0;
  if (s >= static_cast<double>(n - 1)) s = static_cast<double>(n - 1) - 1e-12;
  long i = static_cast<long>(std::floor(s));
  if (i > n - 2) i = n - 2;
  const double a = static_cast<double>(i + 1) - s;  // weight of the left node
  const double b = s - static_cast<double>(i);
  const double h2 = dt_ * dt_ / 6.0;
  const double ya = y_[static_cast<size_t>(i)];
  const double yb = y_[static_cast<size_t>(i + 1)];
  const double Ma = m2_[static_cast<size_t>(i)];
  const double Mb = m2_[static_cast<size_t>(i + 1)];
  return a * ya + b * yb +
         ((a * a * a - a) * Ma + (b * b * b - b) * Mb) * h2;
}

}  // namespace qbrown
