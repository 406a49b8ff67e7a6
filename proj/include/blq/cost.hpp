#pragma once

#include <string>
#include <vector>

#include "blq/hamiltonian.hpp"

namespace blq {

// Per-path ½[Y0ᵀGY0 + ∫(YᵀHY + vᵀRv + Z1ᵀN1Z1 + Z2ᵀN2Z2)dt], trapezoidal in time.
std::vector<double> cost_per_path(const ProblemSpec& spec, const TimeGrid& grid, const Field& Y, const Field& Z1,
                                  const Field& Z2, const Field& v);

struct CostEstimate {
  double value = 0.0;
  double se = 0.0;
  std::vector<double> per_path;
};

CostEstimate evaluate_cost_mc(const ProblemSpec& spec, const HamiltonianTrajectory& traj, const PathEnsemble& ens);

struct CostTerm {
  std::string name;
  double value = 0.0;
  double se = 0.0;
};

struct CostReport {
  double j_mc = 0.0, j_mc_se = 0.0;
  double j_formula = 0.0, j_formula_se = 0.0;
  double combined_se = 0.0;  // sqrt(j_mc_se² + j_formula_se²)
  double agreement = 0.0;    // |j_mc − j_formula| / combined_se
  std::vector<CostTerm> terms;  // five terms summing to j_formula
};

// Optimal cost from Σ and the BSDE solution:
//   ½E⟨ζ̂, Σ_T ζ̂⟩ + ½E∫(⟨Hφ,φ⟩ − ⟨φ̂,Hφ̂⟩)dt + ½E∫⟨[N1(I+ΥN1)^{-1} − Σ]η̂1, η̂1⟩dt
//   + ½E∫(⟨N1(η1−η̂1), η1−η̂1⟩ + ⟨N2η2, η2⟩)dt − E∫⟨φ̂, Σ(C1(I+ΥN1)^{-1}η̂1 + C2η̂2)⟩dt
// with ζ̂ the terminal-node projection (phi_hat at node N). j_mc fields are
// left at zero; see combine_cost.
CostReport optimal_cost_formula(const ProblemSpec& spec, const RiccatiBundle& rb, const FilteredBsdeSolution& sol,
                                const PathEnsemble& ens);

CostReport combine_cost(CostReport formula, const CostEstimate& mc);

// Batch-means standard error of the MC optimal cost: the whole solve (BSDE,
// open-loop assembly, cost) is repeated on `batches` disjoint path blocks, so
// the regression error shared by all paths of one solve is included. The
// per-path stderr of evaluate_cost_mc is conditional on the fitted solution.
// Batches shrink until each has 10 paths per basis function; NaN below 2.
double cost_batch_stderr(const ProblemSpec& spec, const RiccatiBundle& rb, const PathEnsemble& ens,
                         const RegressionBasis& basis, int batches = 10);

}  // namespace blq
