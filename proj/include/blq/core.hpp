#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "blq/error.hpp"

namespace blq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Numerical tolerances shared across modules.
inline constexpr double kEigTol = 1e-8;        // PSD / uniform positivity
inline constexpr double kSymTol = 1e-12;       // symmetry defect
inline constexpr double kBlowup = 1e12;        // any matrix/process entry
inline constexpr double kMinSingular = 1e-10;  // (I+ΥN1), (I+Γ2Υ), (I+Υ0 G)
inline constexpr double kMaxCondition = 1e12;  // regression normal equations
inline constexpr double kRefineTol = 1e-3;     // BSDE fixed-point refinement
inline constexpr int kMaxDim = 32;

// Uniform grid 0 = t_0 < ... < t_N = T.
struct TimeGrid {
  double T = 1.0;
  int N = 2;

  TimeGrid() = default;
  TimeGrid(double horizon, int n_steps);
  // N = T/dt, which must be an integer up to 1e-9 relative.
  static TimeGrid with_step(double horizon, double dt);

  double dt() const { return T / N; }
  double t(int k) const { return k == N ? T : k * (T / N); }
  std::vector<double> nodes() const;
};

// Deterministic, bounded matrix function of time from a closed registry.
class Coefficient {
 public:
  enum class Kind { Constant, Polynomial, ExpScalar };

  Coefficient() : Coefficient(constant(Mat::Zero(1, 1))) {}
  static Coefficient constant(Mat value);
  static Coefficient scalar(double value);
  // value(t) = sum_j terms[j] t^j (ascending degree)
  static Coefficient polynomial(std::vector<Mat> terms);
  // value(t) = exp(kappa t) * value
  static Coefficient exp_scalar(double kappa, Mat value);

  Kind kind() const { return kind_; }
  int rows() const { return static_cast<int>(terms_.front().rows()); }
  int cols() const { return static_cast<int>(terms_.front().cols()); }
  const std::vector<Mat>& terms() const { return terms_; }
  double kappa() const { return kappa_; }
  bool is_zero() const;

  // Evaluates on [0, T]; OUT_OF_RANGE outside (a 1e-12 relative slack is clamped).
  Mat eval(double t, double T) const;
  Mat eval_unchecked(double t) const;

 private:
  Coefficient(Kind kind, std::vector<Mat> terms, double kappa)
      : kind_(kind), terms_(std::move(terms)), kappa_(kappa) {}

  Kind kind_;
  std::vector<Mat> terms_;
  double kappa_ = 0.0;
};

// One summand coef * f(freq * W_i(T)) of a smooth terminal functional.
struct TerminalTerm {
  enum class Func { Linear, Sin, Cos };
  Func func = Func::Linear;
  int brownian = 1;  // 1 or 2
  double freq = 1.0;
  double coef = 1.0;
};

// ζ = s(W1_T, W2_T) * direction, with s from a small registry.
struct TerminalSpec {
  enum class Kind { Lognormal, Smooth, Zero };

  Kind kind = Kind::Zero;
  double a = 0.0, b = 0.0, c = 0.0;  // lognormal
  double constant = 0.0;             // smooth
  std::vector<TerminalTerm> terms;   // smooth
  Vec direction;                     // empty means all ones

  static TerminalSpec zero();
  static TerminalSpec lognormal(double a, double b, double c);
  static TerminalSpec smooth(double constant, std::vector<TerminalTerm> terms);

  double scalar(double w1, double w2, double T) const;
  // E[s | W1_T = w1]
  double conditional_mean_w1(double w1, double T) const;
  double mean(double T) const;
  double second_moment(double T) const;
  Vec direction_for(int n) const;
};

struct ProblemSpec {
  std::string name;
  int n = 1;
  int m = 1;
  TimeGrid grid;
  Coefficient A, B, C1, C2, H, R, N1, N2;
  Mat G = Mat::Zero(1, 1);
  TerminalSpec terminal;
};

// All coefficient values at one time.
struct CoefValues {
  Mat A, B, C1, C2, H, R, N1, N2;
};
CoefValues eval_all(const ProblemSpec& spec, double t);

struct NodeCheck {
  double t = 0.0;
  double min_eig_H = 0.0, min_eig_N1 = 0.0, min_eig_N2 = 0.0, min_eig_R = 0.0;
  double sym_defect = 0.0;  // max over H, N1, N2, R
};

struct ValidationReport {
  bool accepted = true;
  std::optional<ErrorCode> failure;
  std::string message;
  double min_eig_G = 0.0;
  double sym_defect_G = 0.0;
  std::vector<NodeCheck> nodes;
};

// Structural errors (dimensions, non-finite entries) throw INVALID_ARGUMENT;
// assumption violations are reported (accepted = false).
ValidationReport validate_spec(const ProblemSpec& spec);
// validate_spec, throwing REJECT_INDEFINITE / REJECT_ASYMMETRIC on rejection.
ValidationReport require_valid(const ProblemSpec& spec);

double min_eigenvalue_sym(const Mat& m);
double symmetry_defect(const Mat& m);
double min_singular_value(const Mat& m);

}  // namespace blq
