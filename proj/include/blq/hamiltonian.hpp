#pragma once

#include <string>
#include <vector>

#include "blq/bsde.hpp"

namespace blq {

struct HamiltonianTrajectory {
  Field X, X_hat, Y, Y_hat, Z1, Z2, v;
  Field psi, psi_hat;  // empty for the open-loop assembly
  Vec Y0;              // (I + Υ0 G)^{-1} φ0
  std::string construction;  // "open_loop" or "closed_loop"
};

// RMS Euler defects of the forward-backward system along a trajectory:
//   dY = (AY + Bv + C1Z1 + C2Z2)dt + Z1 dW1 + Z2 dW2
//   dX = −(AᵀX + HY)dt − (C1ᵀX + N1Z1)dW1 − (C2ᵀX + N2Z2)dW2
// and the identities that hold by construction (max abs).
struct FbsdeResiduals {
  double state_rms = 0.0;
  double adjoint_rms = 0.0;
  double relation_y = 0.0;        // Y − ΥX̂ − φ
  double relation_z2 = 0.0;       // Z2 − η2
  double relation_v = 0.0;        // v + R^{-1}BᵀX̂
  double initial_identity = 0.0;  // X̂0 + (I+GΥ0)^{-1}Gφ̂0
};

// Decoupled open-loop solution: X̂ and X simulated forward, then
// Y = ΥX̂ + φ, Z1 = η1 − η̂1 + (I+ΥN1)^{-1}(η̂1 − ΥC1ᵀX̂), Z2 = η2, v = −R^{-1}BᵀX̂.
HamiltonianTrajectory assemble_open_loop(const ProblemSpec& spec, const RiccatiBundle& rb,
                                         const FilteredBsdeSolution& sol, const PathEnsemble& ens);

FbsdeResiduals fbsde_residuals(const ProblemSpec& spec, const RiccatiBundle& rb, const FilteredBsdeSolution& sol,
                               const HamiltonianTrajectory& traj, const PathEnsemble& ens);

struct PsiSolution {
  Field psi, psi_hat;
  // RMS of (observable projection of ψ) − ψ̂, max over nodes
  double projection_gap = 0.0;
};

// ψ (ψ0 = 0) by Euler on the full filtration. ψ̂ comes from its own filtered
// SDE on W1, simulated first because ψ's drift depends on it.
PsiSolution solve_psi(const ProblemSpec& spec, const RiccatiBundle& rb, const FilteredBsdeSolution& sol,
                      const PathEnsemble& ens, const RegressionBasis& basis);

// v = R^{-1}Bᵀ(Γ2 Ŷ + ψ̂) for one node (columns are paths).
Mat feedback_control(const NodeCoefs& c, const Eigen::Ref<const Mat>& Y_hat, const Eigen::Ref<const Mat>& psi_hat);

// Closed-loop trajectory rebuilt from the decoupling relations:
// X̂ = −(I+Γ2Υ)^{-1}(Γ2φ̂ + ψ̂), Ŷ = ΥX̂ + φ̂, Y = ΥX̂ + φ, v from feedback_control,
// X = −Γ1(Y − Ŷ) − Γ2Ŷ − ψ.
HamiltonianTrajectory closed_loop_simulate(const ProblemSpec& spec, const RiccatiBundle& rb,
                                           const FilteredBsdeSolution& sol, const PsiSolution& psi,
                                           const PathEnsemble& ens);

struct StationarityResidual {
  double value = 0.0;        // max over nodes of RMS of E[Rv + BᵀX | W1]
  double noise_floor = 0.0;  // max over nodes of σ̂ sqrt(p / n)
  int worst_node = 0;
};

// Projection of Rv + BᵀX onto the observable basis, node by node. The noise
// floor is the RMS a projection of pure noise with the same spread would have.
StationarityResidual stationarity_residual(const ProblemSpec& spec, const HamiltonianTrajectory& traj,
                                           const RegressionBasis& basis, const PathEnsemble& ens);

// Perturbation directions (W1-adapted, same value in every control component).
enum class Direction { Constant, SinW1, EarlyIndicator };
const char* direction_name(Direction d);
std::vector<Direction> all_directions();
Field make_direction(Direction d, int m, const PathEnsemble& ens);

struct PerturbationMargin {
  Direction direction = Direction::Constant;
  double epsilon = 0.0;
  double delta_j = 0.0;
  double se = 0.0;
};

// ΔJ(ε) = J(v* + εu) − J(v*), paired per path. The state response to u is the
// solution of the state equation with zero terminal value and source Bu.
std::vector<PerturbationMargin> optimality_margin(const ProblemSpec& spec, const HamiltonianTrajectory& traj,
                                                  const std::vector<Direction>& directions,
                                                  const std::vector<double>& epsilons, const PathEnsemble& ens,
                                                  const RegressionBasis& basis);

}  // namespace blq
