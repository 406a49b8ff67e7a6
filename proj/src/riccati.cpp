#include "blq/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blq/csv.hpp"

namespace blq {

namespace {

const char* kModule = "riccati";

Mat symmetrize(const Mat& S) { return 0.5 * (S + S.transpose()); }

void check_blowup(const Mat& S, double t, const char* what) {
  if (!S.allFinite() || S.cwiseAbs().maxCoeff() > kBlowup) {
    std::ostringstream os;
    os << what << " exceeds " << kBlowup << " at t = " << t;
    fail(kModule, ErrorCode::Blowup, os.str());
  }
}

// (I + U N1)^{-1} U, with an invertibility check
Mat resolvent_times_u(const CoefValues& c, const Mat& U) {
  const Mat F = Mat::Identity(U.rows(), U.cols()) + U * c.N1;
  const double smin = min_singular_value(F);
  if (!(smin >= kMinSingular)) {
    std::ostringstream os;
    os << "I + Upsilon N1 is singular (smallest singular value " << smin << ")";
    fail(kModule, ErrorCode::SingularFactor, os.str());
  }
  return F.partialPivLu().solve(U);
}

Mat brb(const CoefValues& c) { return c.B * c.R.ldlt().solve(c.B.transpose()); }

}  // namespace

Mat MatrixPath::interpolate(double t) const {
  const double h = grid.dt();
  const double tc = std::clamp(t, 0.0, grid.T);
  int k = static_cast<int>(std::floor(tc / h));
  if (k >= grid.N) k = grid.N - 1;
  const double w = (tc - grid.t(k)) / h;
  if (w <= 0.0) return values[k];
  if (w >= 1.0) return values[k + 1];
  return (1.0 - w) * values[k] + w * values[k + 1];
}

Mat rk4_matrix_step(const MatrixOde& f, double t, const Mat& S, double dt) {
  const Mat k1 = f(t, S);
  const Mat k2 = f(t + 0.5 * dt, S + 0.5 * dt * k1);
  const Mat k3 = f(t + 0.5 * dt, S + 0.5 * dt * k2);
  const Mat k4 = f(t + dt, S + dt * k3);
  return symmetrize(S + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Mat upsilon_rhs(const CoefValues& c, const Mat& U) {
  return U * c.A.transpose() + c.A * U + U * c.H * U - brb(c) - c.C1 * resolvent_times_u(c, U) * c.C1.transpose();
}

Mat gamma1_rhs(const CoefValues& c, const Mat& G1) { return -G1 * c.A - c.A.transpose() * G1 + c.H; }

Mat gamma2_rhs(const CoefValues& c, const Mat& U, const Mat& G2) {
  const Mat q = brb(c) + c.C1 * resolvent_times_u(c, U) * c.C1.transpose();
  return -G2 * c.A - c.A.transpose() * G2 - G2 * q * G2 + c.H;
}

Mat sigma_rhs(const CoefValues& c, const Mat& U, const Mat& S) {
  const Mat a = c.A + U * c.H;
  return -S * a - a.transpose() * S + c.H;
}

MatrixPath solve_upsilon(const ProblemSpec& spec, int n_steps) {
  MatrixPath p{TimeGrid(spec.grid.T, n_steps), {}};
  const int n = spec.n;
  p.values.assign(n_steps + 1, Mat::Zero(n, n));
  const double h = p.grid.dt();
  MatrixOde f = [&spec](double t, const Mat& U) { return upsilon_rhs(eval_all(spec, t), U); };
  Mat U = Mat::Zero(n, n);
  // a node-wise check can step over a pole of (I + U N1)^{-1}; a determinant sign change cannot
  auto factor_det = [&](int k, const Mat& V) {
    return (Mat::Identity(n, n) + V * spec.N1.eval(p.grid.t(k), spec.grid.T)).determinant();
  };
  double det_prev = factor_det(n_steps, U);
  for (int k = n_steps; k > 0; --k) {
    U = rk4_matrix_step(f, p.grid.t(k), U, -h);
    check_blowup(U, p.grid.t(k - 1), "Upsilon");
    const double det = factor_det(k - 1, U);
    if (!(det * det_prev > 0.0)) {
      std::ostringstream os;
      os << "I + Upsilon N1 becomes singular between t = " << p.grid.t(k - 1) << " and t = " << p.grid.t(k);
      fail(kModule, ErrorCode::SingularFactor, os.str());
    }
    det_prev = det;
    p.values[k - 1] = U;
  }
  p.values[n_steps].setZero();
  return p;
}

MatrixPath solve_gamma1(const ProblemSpec& spec, int n_steps) {
  MatrixPath p{TimeGrid(spec.grid.T, n_steps), {}};
  p.values.resize(n_steps + 1);
  const double h = p.grid.dt();
  MatrixOde f = [&spec](double t, const Mat& G1) { return gamma1_rhs(eval_all(spec, t), G1); };
  p.values[0] = spec.G;
  Mat S = spec.G;
  for (int k = 0; k < n_steps; ++k) {
    S = rk4_matrix_step(f, p.grid.t(k), S, h);
    check_blowup(S, p.grid.t(k + 1), "Gamma1");
    p.values[k + 1] = S;
  }
  return p;
}

namespace {

// RK4 forward for an equation driven by Υ. Stage values of Υ at half steps
// come from cubic Hermite interpolation with Υ' = upsilon_rhs, which keeps
// the fourth-order accuracy of the stored nodes.
template <class Rhs>
MatrixPath integrate_driven(const ProblemSpec& spec, const MatrixPath& ups, const Mat& S0, Rhs rhs,
                            const char* what) {
  const TimeGrid& g = ups.grid;
  const double h = g.dt();
  MatrixPath p{g, {}};
  p.values.resize(g.N + 1);
  p.values[0] = S0;
  Mat S = S0;
  CoefValues c0 = eval_all(spec, g.t(0));
  Mat dU0 = upsilon_rhs(c0, ups.at(0));
  for (int k = 0; k < g.N; ++k) {
    const double t = g.t(k);
    const CoefValues cm = eval_all(spec, t + 0.5 * h);
    const CoefValues c1 = eval_all(spec, g.t(k + 1));
    const Mat& U0 = ups.at(k);
    const Mat& U1 = ups.at(k + 1);
    const Mat dU1 = upsilon_rhs(c1, U1);
    const Mat Um = symmetrize(0.5 * (U0 + U1) + (h / 8.0) * (dU0 - dU1));
    const Mat k1 = rhs(c0, U0, S);
    const Mat k2 = rhs(cm, Um, S + 0.5 * h * k1);
    const Mat k3 = rhs(cm, Um, S + 0.5 * h * k2);
    const Mat k4 = rhs(c1, U1, S + h * k3);
    S = symmetrize(S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    check_blowup(S, g.t(k + 1), what);
    p.values[k + 1] = S;
    c0 = c1;
    dU0 = dU1;
  }
  return p;
}

}  // namespace

MatrixPath solve_gamma2(const ProblemSpec& spec, const MatrixPath& upsilon) {
  MatrixPath p = integrate_driven(spec, upsilon, spec.G, gamma2_rhs, "Gamma2");
  const int n = spec.n;
  for (int k = 0; k <= p.grid.N; ++k) {
    const double smin = min_singular_value(Mat::Identity(n, n) + p.at(k) * upsilon.at(k));
    if (!(smin >= kMinSingular)) {
      std::ostringstream os;
      os << "I + Gamma2 Upsilon is singular at t = " << p.grid.t(k);
      fail(kModule, ErrorCode::SingularFactor, os.str());
    }
  }
  return p;
}

MatrixPath solve_sigma(const ProblemSpec& spec, const MatrixPath& upsilon) {
  const int n = spec.n;
  const Mat F = Mat::Identity(n, n) + upsilon.at(0) * spec.G;
  const double smin = min_singular_value(F);
  if (!(smin >= kMinSingular)) fail(kModule, ErrorCode::SingularFactor, "I + Upsilon(0) G is singular");
  // G (I + Υ0 G)^{-1} = ((I + G Υ0)^{-1} G)^T, symmetric in exact arithmetic
  const Mat S0 = symmetrize(F.transpose().partialPivLu().solve(spec.G.transpose()).transpose());
  return integrate_driven(spec, upsilon, S0, sigma_rhs, "Sigma");
}

RiccatiBundle solve_riccati(const ProblemSpec& spec, int n_steps) {
  RiccatiBundle b;
  b.upsilon = solve_upsilon(spec, n_steps);
  b.gamma1 = solve_gamma1(spec, n_steps);
  b.gamma2 = solve_gamma2(spec, b.upsilon);
  b.sigma = solve_sigma(spec, b.upsilon);
  const int n = spec.n;
  const TimeGrid& g = b.upsilon.grid;
  b.invertibility_log.reserve(g.N + 1);
  b.min_smin_upsilon_n1 = b.min_smin_gamma2_upsilon = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= g.N; ++k) {
    const double t = g.t(k);
    const Mat I = Mat::Identity(n, n);
    InvertibilityEntry e;
    e.t = t;
    e.smin_upsilon_n1 = min_singular_value(I + b.upsilon.at(k) * spec.N1.eval(t, g.T));
    e.smin_gamma2_upsilon = min_singular_value(I + b.gamma2.at(k) * b.upsilon.at(k));
    b.min_smin_upsilon_n1 = std::min(b.min_smin_upsilon_n1, e.smin_upsilon_n1);
    b.min_smin_gamma2_upsilon = std::min(b.min_smin_gamma2_upsilon, e.smin_gamma2_upsilon);
    b.invertibility_log.push_back(e);
  }
  return b;
}

void write_matrix_path_csv(const std::string& path, const MatrixPath& p, const std::string& prefix) {
  CsvWriter w(path);
  const int n = p.dim();
  std::vector<std::string> names{"t"};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) names.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(j));
  w.header(names);
  std::vector<double> row(1 + n * n);
  for (int k = 0; k <= p.grid.N; ++k) {
    row[0] = p.grid.t(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) row[1 + i * n + j] = p.at(k)(i, j);
    w.row(row);
  }
  w.close();
}

}  // namespace blq
