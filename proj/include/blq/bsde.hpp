#pragma once

#include <memory>
#include <string>

#include "blq/condexp.hpp"
#include "blq/riccati.hpp"

namespace blq {

// Blocks (n x np) of the generator arguments.
struct GenArgs {
  Eigen::Ref<const Mat> P, Q1, Q2, Ph, Q1h, Q2h;
};

// Drift f of dP = f(t, P, Q1, Q2, P̂, Q̂1, Q̂2) dt + Q1 dW1 + Q2 dW2.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  // Declared Lipschitz constant (not verified at run time).
  virtual double lipschitz() const = 0;
  // Evaluated for interval k at time t in [t_k, t_{k+1}] on paths [p0, p0 + np).
  virtual void eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const = 0;
};

// Aφ + ΥHφ̂ + C1(η1 − η̂1) + C1(I+ΥN1)^{-1}η̂1 + C2η2
class LinearPhiGenerator : public Generator {
 public:
  LinearPhiGenerator(const ProblemSpec& spec, const MatrixPath& upsilon) : spec_(spec), ups_(upsilon) {}
  std::string name() const override { return "linear_phi"; }
  double lipschitz() const override;
  void eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const override;

 private:
  const ProblemSpec& spec_;
  const MatrixPath& ups_;
};

// Observable-filtration drift (A+ΥH)P̂ + C1(I+ΥN1)^{-1}Q̂1 (requires C2 = 0).
class ObservablePhiGenerator : public Generator {
 public:
  ObservablePhiGenerator(const ProblemSpec& spec, const MatrixPath& upsilon) : spec_(spec), ups_(upsilon) {}
  std::string name() const override { return "observable_phi"; }
  double lipschitz() const override;
  void eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const override;

 private:
  const ProblemSpec& spec_;
  const MatrixPath& ups_;
};

// State equation with a given control: AP + B u_k + C1 Q1 + C2 Q2.
class StateGenerator : public Generator {
 public:
  StateGenerator(const ProblemSpec& spec, const Field& control) : spec_(spec), u_(control) {}
  std::string name() const override { return "state"; }
  double lipschitz() const override;
  void eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const override;

 private:
  const ProblemSpec& spec_;
  const Field& u_;
};

// Componentwise c0 + a P + ah P̂ + b1 Q1 + b1h Q̂1 + b2 Q2 + b2h Q̂2 (test generator).
struct AffineGenerator : public Generator {
  double c0 = 0, a = 0, ah = 0, b1 = 0, b1h = 0, b2 = 0, b2h = 0;
  std::string name() const override { return "affine"; }
  double lipschitz() const override;
  void eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const override;
};

// Componentwise kappa sin(P) (nonlinear test generator).
struct SineGenerator : public Generator {
  double kappa = 1.0;
  std::string name() const override { return "sine"; }
  double lipschitz() const override { return std::abs(kappa); }
  void eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const override;
};

struct BsdeOptions {
  // Solve on the W1 filtration only: Q2 ≡ 0 and every regression uses the
  // observable basis.
  bool observable_only = false;
  // Batch-means standard error of P0 from this many disjoint path batches
  // (0 disables).
  int stderr_batches = 10;
};

struct FilteredBsdeSolution {
  Field phi, eta1, eta2;
  Field phi_hat, eta1_hat, eta2_hat;
  Vec phi0;
  Vec phi0_stderr;  // NaN when unavailable
  double dt = 0.0;
  int degree = 0;
  int n_paths = 0;
  double max_refinement_move = 0.0;  // RMS, max over steps
};

// Backward LSMC sweep (implicit midpoint in time): with Ê = E_k[P_{k+1}] and
// Q_k = E_k[(P_{k+1} − ½Δt f_{k+1}) ΔW]/Δt,
//   P_k = Ê − Δt f(t_{k+½}, ½(P_k + Ê), Q_k, ...)
// solved by one fixed-point refinement from P_k = Ê − Δt f(t_{k+½}, Ê, ...).
// NONCONVERGED if the refinement moves P_k by more than 1e-3 RMS.
FilteredBsdeSolution solve_filtered_bsde(const Generator& gen, const Mat& terminal, const PathEnsemble& ens,
                                         const RegressionBasis& basis, const BsdeOptions& opt = {});

// The decoupling BSDE for (φ, η1, η2) with terminal ζ.
FilteredBsdeSolution solve_phi(const ProblemSpec& spec, const MatrixPath& upsilon, const PathEnsemble& ens,
                               const RegressionBasis& basis, const BsdeOptions& opt = {});

// The filtered BSDE for (φ̂, η̂1) solved directly on the W1 filtration with
// terminal ζ̂ (terminal-node regression). Requires C2 ≡ 0; phi = phi_hat and
// eta2 = eta2_hat = 0 in the result.
FilteredBsdeSolution solve_phi_hat_direct(const ProblemSpec& spec, const MatrixPath& upsilon, const PathEnsemble& ens,
                                          const RegressionBasis& basis, const BsdeOptions& opt = {});

}  // namespace blq
