#include "blq/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blq/numerics.hpp"

namespace blq {

namespace {

const char* kModule = "core";

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) fail(kModule, ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

void require_shape(const Coefficient& c, int rows, int cols, const char* what) {
  if (c.rows() != rows || c.cols() != cols) {
    std::ostringstream os;
    os << what << " must be " << rows << "x" << cols << ", got " << c.rows() << "x" << c.cols();
    fail(kModule, ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

TimeGrid::TimeGrid(double horizon, int n_steps) : T(horizon), N(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    fail(kModule, ErrorCode::InvalidArgument, "time horizon must be positive and finite");
  if (n_steps < 2) fail(kModule, ErrorCode::InvalidArgument, "time grid needs at least 2 steps");
}

TimeGrid TimeGrid::with_step(double horizon, double dt) {
  if (!(dt > 0.0)) fail(kModule, ErrorCode::InvalidArgument, "time step must be positive");
  const double ratio = horizon / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    fail(kModule, ErrorCode::InvalidArgument, "time step must divide the horizon");
  return TimeGrid(horizon, static_cast<int>(n));
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(N + 1);
  for (int k = 0; k <= N; ++k) out[k] = t(k);
  return out;
}

// ---------------------------------------------------------------------------

Coefficient Coefficient::constant(Mat value) {
  if (value.size() == 0) fail(kModule, ErrorCode::InvalidArgument, "empty coefficient");
  return Coefficient(Kind::Constant, {std::move(value)}, 0.0);
}

Coefficient Coefficient::scalar(double value) { return constant(Mat::Constant(1, 1, value)); }

Coefficient Coefficient::polynomial(std::vector<Mat> terms) {
  if (terms.empty() || terms.front().size() == 0)
    fail(kModule, ErrorCode::InvalidArgument, "polynomial coefficient needs at least one term");
  for (const auto& m : terms)
    if (m.rows() != terms.front().rows() || m.cols() != terms.front().cols())
      fail(kModule, ErrorCode::InvalidArgument, "polynomial terms must share one shape");
  return Coefficient(Kind::Polynomial, std::move(terms), 0.0);
}

Coefficient Coefficient::exp_scalar(double kappa, Mat value) {
  if (value.size() == 0) fail(kModule, ErrorCode::InvalidArgument, "empty coefficient");
  if (!std::isfinite(kappa)) fail(kModule, ErrorCode::InvalidArgument, "non-finite exponential rate");
  return Coefficient(Kind::ExpScalar, {std::move(value)}, kappa);
}

bool Coefficient::is_zero() const {
  for (const auto& m : terms_)
    if (!m.isZero(0.0)) return false;
  return true;
}

Mat Coefficient::eval_unchecked(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return terms_.front();
    case Kind::ExpScalar:
      return std::exp(kappa_ * t) * terms_.front();
    case Kind::Polynomial: {
      // Horner
      Mat acc = terms_.back();
      for (int j = static_cast<int>(terms_.size()) - 2; j >= 0; --j) acc = (acc * t + terms_[j]).eval();
      return acc;
    }
  }
  return terms_.front();
}

Mat Coefficient::eval(double t, double T) const {
  const double slack = 1e-12 * std::max(1.0, T);
  if (!(t >= -slack && t <= T + slack)) {
    std::ostringstream os;
    os << "t = " << t << " outside [0, " << T << "]";
    fail(kModule, ErrorCode::OutOfRange, os.str());
  }
  return eval_unchecked(std::clamp(t, 0.0, T));
}

// ---------------------------------------------------------------------------

TerminalSpec TerminalSpec::zero() { return TerminalSpec{}; }

TerminalSpec TerminalSpec::lognormal(double a, double b, double c) {
  TerminalSpec s;
  s.kind = Kind::Lognormal;
  s.a = a;
  s.b = b;
  s.c = c;
  return s;
}

TerminalSpec TerminalSpec::smooth(double constant, std::vector<TerminalTerm> terms) {
  TerminalSpec s;
  s.kind = Kind::Smooth;
  s.constant = constant;
  s.terms = std::move(terms);
  for (const auto& term : s.terms)
    if (term.brownian != 1 && term.brownian != 2)
      fail(kModule, ErrorCode::InvalidArgument, "terminal term must reference W1 or W2");
  return s;
}

namespace {

double term_value(const TerminalTerm& term, double w) {
  const double x = term.freq * w;
  switch (term.func) {
    case TerminalTerm::Func::Linear: return term.coef * x;
    case TerminalTerm::Func::Sin: return term.coef * std::sin(x);
    case TerminalTerm::Func::Cos: return term.coef * std::cos(x);
  }
  return 0.0;
}

// E[f(freq * W)] for W ~ N(0, T)
double term_mean(const TerminalTerm& term, double T) {
  if (term.func == TerminalTerm::Func::Cos) return term.coef * std::exp(-0.5 * term.freq * term.freq * T);
  return 0.0;
}

}  // namespace

double TerminalSpec::scalar(double w1, double w2, double T) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Lognormal: return std::exp((a - 0.5 * b * b - 0.5 * c * c) * T + b * w1 + c * w2);
    case Kind::Smooth: {
      double s = constant;
      for (const auto& term : terms) s += term_value(term, term.brownian == 1 ? w1 : w2);
      return s;
    }
  }
  return 0.0;
}

double TerminalSpec::conditional_mean_w1(double w1, double T) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Lognormal: return std::exp((a - 0.5 * b * b) * T + b * w1);
    case Kind::Smooth: {
      double s = constant;
      for (const auto& term : terms) s += term.brownian == 1 ? term_value(term, w1) : term_mean(term, T);
      return s;
    }
  }
  return 0.0;
}

double TerminalSpec::mean(double T) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Lognormal: return std::exp(a * T);
    case Kind::Smooth: {
      double s = constant;
      for (const auto& term : terms) s += term_mean(term, T);
      return s;
    }
  }
  return 0.0;
}

double TerminalSpec::second_moment(double T) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Lognormal: return std::exp((2.0 * a + b * b + c * c) * T);
    case Kind::Smooth: {
      // tensor Gauss-Hermite over (W1_T, W2_T); exact to rounding for these
      // entire functions at 80 nodes per axis
      const auto& gh = gauss_hermite(80);
      const double sd = std::sqrt(T);
      double acc = 0.0;
      for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
          const double s = scalar(sd * gh.nodes[i], sd * gh.nodes[j], T);
          acc += gh.weights[i] * gh.weights[j] * s * s;
        }
      return acc;
    }
  }
  return 0.0;
}

Vec TerminalSpec::direction_for(int n) const {
  if (direction.size() == 0) return Vec::Ones(n);
  if (direction.size() != n) fail(kModule, ErrorCode::InvalidArgument, "terminal direction has wrong length");
  return direction;
}

// ---------------------------------------------------------------------------

CoefValues eval_all(const ProblemSpec& spec, double t) {
  const double T = spec.grid.T;
  return CoefValues{spec.A.eval(t, T),  spec.B.eval(t, T),  spec.C1.eval(t, T), spec.C2.eval(t, T),
                    spec.H.eval(t, T),  spec.R.eval(t, T),  spec.N1.eval(t, T), spec.N2.eval(t, T)};
}

double min_eigenvalue_sym(const Mat& m) {
  const Mat s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double symmetry_defect(const Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

double min_singular_value(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().minCoeff();
}

ValidationReport validate_spec(const ProblemSpec& spec) {
  const int n = spec.n, m = spec.m;
  if (n < 1 || m < 1 || n > kMaxDim || m > kMaxDim)
    fail(kModule, ErrorCode::InvalidArgument, "dimensions must satisfy 1 <= n, m <= 32");
  require_shape(spec.A, n, n, "A");
  require_shape(spec.B, n, m, "B");
  require_shape(spec.C1, n, n, "C1");
  require_shape(spec.C2, n, n, "C2");
  require_shape(spec.H, n, n, "H");
  require_shape(spec.R, m, m, "R");
  require_shape(spec.N1, n, n, "N1");
  require_shape(spec.N2, n, n, "N2");
  if (spec.G.rows() != n || spec.G.cols() != n) fail(kModule, ErrorCode::InvalidArgument, "G must be n x n");
  require_finite(spec.G, "G");
  spec.terminal.direction_for(n);

  ValidationReport rep;
  auto reject = [&rep](ErrorCode code, const std::string& msg) {
    if (rep.accepted) {
      rep.accepted = false;
      rep.failure = code;
      rep.message = msg;
    }
  };

  rep.min_eig_G = min_eigenvalue_sym(spec.G);
  rep.sym_defect_G = symmetry_defect(spec.G);
  if (rep.sym_defect_G > kSymTol) reject(ErrorCode::RejectAsymmetric, "G is not symmetric");
  if (rep.min_eig_G < -kEigTol) reject(ErrorCode::RejectIndefinite, "G is not positive semidefinite");

  const TimeGrid& g = spec.grid;
  rep.nodes.reserve(g.N + 1);
  for (int k = 0; k <= g.N; ++k) {
    const double t = g.t(k);
    const CoefValues c = eval_all(spec, t);
    for (const Mat* mm : {&c.A, &c.B, &c.C1, &c.C2, &c.H, &c.R, &c.N1, &c.N2}) require_finite(*mm, "coefficient");
    NodeCheck nc;
    nc.t = t;
    nc.min_eig_H = min_eigenvalue_sym(c.H);
    nc.min_eig_N1 = min_eigenvalue_sym(c.N1);
    nc.min_eig_N2 = min_eigenvalue_sym(c.N2);
    nc.min_eig_R = min_eigenvalue_sym(c.R);
    nc.sym_defect = std::max({symmetry_defect(c.H), symmetry_defect(c.N1), symmetry_defect(c.N2),
                              symmetry_defect(c.R)});
    std::ostringstream at;
    at << " at t = " << t;
    if (nc.sym_defect > kSymTol) reject(ErrorCode::RejectAsymmetric, "weight matrix not symmetric" + at.str());
    if (nc.min_eig_H < -kEigTol) reject(ErrorCode::RejectIndefinite, "H not positive semidefinite" + at.str());
    if (nc.min_eig_N1 < -kEigTol) reject(ErrorCode::RejectIndefinite, "N1 not positive semidefinite" + at.str());
    if (nc.min_eig_N2 < -kEigTol) reject(ErrorCode::RejectIndefinite, "N2 not positive semidefinite" + at.str());
    if (nc.min_eig_R < kEigTol) reject(ErrorCode::RejectIndefinite, "R not uniformly positive" + at.str());
    rep.nodes.push_back(nc);
  }
  return rep;
}

ValidationReport require_valid(const ProblemSpec& spec) {
  ValidationReport rep = validate_spec(spec);
  if (!rep.accepted) fail(kModule, *rep.failure, rep.message);
  return rep;
}

}  // namespace blq
