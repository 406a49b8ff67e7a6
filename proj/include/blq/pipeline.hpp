#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blq/cost.hpp"
#include "blq/hamiltonian.hpp"

namespace blq {

// Artifact names: riccati, bsde, trajectory, control, cost, diagnostics.
const std::vector<std::string>& artifact_names();

struct RunConfig {
  std::string preset;       // "blqa" / "blqb", or empty when config_path is set
  std::string config_path;
  int n_paths = 10000;
  std::optional<double> dt;  // MC step; config file value, then 1/256
  double ode_dt = 1.0 / 2000.0;
  std::uint64_t seed = 42;
  int basis_degree = 3;
  std::string out_dir = ".";
  std::set<std::string> artifacts;  // empty means all
};

// INVALID_ARGUMENT for inconsistent settings (dt_ode > dt_mc, n_paths < 100, ...).
void check_run_config(const RunConfig& cfg);

// Resolves the problem and its MC grid from a run configuration.
ProblemSpec resolve_spec(const RunConfig& cfg);

struct PipelineResult {
  ProblemSpec spec;
  ValidationReport validation;
  RiccatiBundle riccati;
  PathEnsemble ensemble;
  RegressionBasis basis;
  FilteredBsdeSolution bsde;
  HamiltonianTrajectory open_loop, closed_loop;
  PsiSolution psi;
  FbsdeResiduals residuals;
  StationarityResidual stationarity;
  CostReport cost;
  Vec y0, y0_se;
  double j_batch_se = 0.0;  // batch-means stderr of the MC cost
  double feedback_gap = 0.0;    // RMS(v_feedback − v_open_loop)
  double xhat_gap = 0.0;        // RMS(X̂ + (I+Γ2Υ)^{-1}(Γ2φ̂ + ψ̂))
  double x_gap = 0.0;           // RMS(X_closed − X_simulated)
  double terminal_tower = 0.0;  // tower check of ζ at T
  std::optional<double> phi_hat_direct0;  // W1-only solve (C2 ≡ 0)
  std::optional<double> reference_cost;   // closed form when available
};

PipelineResult run_pipeline(const RunConfig& cfg);

}  // namespace blq
