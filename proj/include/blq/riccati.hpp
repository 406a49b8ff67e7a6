#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blq/core.hpp"

namespace blq {

inline constexpr int kDefaultOdeSteps = 2000;

// Deterministic symmetric matrix function sampled on a grid.
struct MatrixPath {
  TimeGrid grid;
  std::vector<Mat> values;

  const Mat& at(int k) const { return values[k]; }
  int dim() const { return static_cast<int>(values.front().rows()); }
  // Piecewise-linear interpolation (t clamped to [0, T]).
  Mat interpolate(double t) const;
};

struct InvertibilityEntry {
  double t = 0.0;
  double smin_upsilon_n1 = 0.0;  // σ_min(I + Υ N1)
  double smin_gamma2_upsilon = 0.0;  // σ_min(I + Γ2 Υ)
};

struct RiccatiBundle {
  MatrixPath upsilon, gamma1, gamma2, sigma;
  std::vector<InvertibilityEntry> invertibility_log;
  double min_smin_upsilon_n1 = 0.0;
  double min_smin_gamma2_upsilon = 0.0;
};

using MatrixOde = std::function<Mat(double t, const Mat& S)>;

// Classic RK4 step followed by S <- (S + S^T)/2. dt may be negative.
Mat rk4_matrix_step(const MatrixOde& f, double t, const Mat& S, double dt);

// Right-hand sides (time derivatives) of the four equations.
Mat upsilon_rhs(const CoefValues& c, const Mat& U);
Mat gamma1_rhs(const CoefValues& c, const Mat& G1);
Mat gamma2_rhs(const CoefValues& c, const Mat& U, const Mat& G2);
Mat sigma_rhs(const CoefValues& c, const Mat& U, const Mat& S);

// Υ backward from Υ(T) = 0.
MatrixPath solve_upsilon(const ProblemSpec& spec, int n_steps = kDefaultOdeSteps);
// Γ1 forward from Γ1(0) = G.
MatrixPath solve_gamma1(const ProblemSpec& spec, int n_steps = kDefaultOdeSteps);
// Γ2 forward from Γ2(0) = G on upsilon's grid.
MatrixPath solve_gamma2(const ProblemSpec& spec, const MatrixPath& upsilon);
// Σ forward from Σ(0) = G (I + Υ(0) G)^{-1} on upsilon's grid.
MatrixPath solve_sigma(const ProblemSpec& spec, const MatrixPath& upsilon);

RiccatiBundle solve_riccati(const ProblemSpec& spec, int n_steps = kDefaultOdeSteps);

// Columns: t, then row-major entries m_i_j.
void write_matrix_path_csv(const std::string& path, const MatrixPath& p, const std::string& prefix = "m");

}  // namespace blq
