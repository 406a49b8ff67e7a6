#include "blq/pipeline.hpp"

#include <cmath>

#include "blq/config.hpp"
#include "blq/presets.hpp"

namespace blq {

namespace {

const char* kModule = "cli";

double rms_diff(const Field& a, const Field& b) {
  double ss = 0.0;
  for (int k = 0; k < a.nodes(); ++k) ss += (a.mat(k) - b.mat(k)).squaredNorm();
  return std::sqrt(ss / (static_cast<double>(a.nodes()) * a.paths() * a.dim()));
}

int steps_for(double T, double dt, const char* what) {
  const double r = T / dt;
  const double n = std::round(r);
  if (!(dt > 0.0) || std::abs(r - n) > 1e-9 * std::max(1.0, r))
    fail(kModule, ErrorCode::InvalidArgument, std::string(what) + " must divide the horizon");
  return static_cast<int>(n);
}

}  // namespace

const std::vector<std::string>& artifact_names() {
  static const std::vector<std::string> names{"riccati", "bsde", "trajectory", "control", "cost", "diagnostics"};
  return names;
}

void check_run_config(const RunConfig& cfg) {
  if (cfg.preset.empty() == cfg.config_path.empty())
    fail(kModule, ErrorCode::InvalidArgument, "exactly one of --preset and --config is required");
  if (cfg.n_paths < 100) fail(kModule, ErrorCode::InvalidArgument, "n_paths must be at least 100");
  if (cfg.basis_degree < 0 || cfg.basis_degree > 12)
    fail(kModule, ErrorCode::InvalidArgument, "basis degree must be in [0, 12]");
  if (cfg.dt && !(*cfg.dt > 0.0)) fail(kModule, ErrorCode::InvalidArgument, "dt must be positive");
  if (!(cfg.ode_dt > 0.0)) fail(kModule, ErrorCode::InvalidArgument, "ode dt must be positive");
  for (const auto& a : cfg.artifacts) {
    bool known = false;
    for (const auto& n : artifact_names()) known = known || n == a;
    if (!known) fail(kModule, ErrorCode::InvalidArgument, "unknown artifact '" + a + "'");
  }
}

ProblemSpec resolve_spec(const RunConfig& cfg) {
  check_run_config(cfg);
  ProblemSpec spec;
  std::optional<double> dt = cfg.dt;
  if (!cfg.preset.empty()) {
    spec = preset_spec(cfg.preset);
  } else {
    LoadedConfig lc = load_config(cfg.config_path);
    spec = std::move(lc.spec);
    if (!dt) dt = lc.dt;
  }
  const double T = spec.grid.T;
  spec.grid = TimeGrid(T, steps_for(T, dt.value_or(1.0 / 256.0), "dt"));
  if (cfg.ode_dt > spec.grid.dt() * (1.0 + 1e-12))
    fail(kModule, ErrorCode::InvalidArgument, "ode dt must not exceed the MC dt");
  steps_for(T, cfg.ode_dt, "ode dt");
  return spec;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  PipelineResult r;
  r.spec = resolve_spec(cfg);
  const ProblemSpec& spec = r.spec;
  r.validation = require_valid(spec);
  r.riccati = solve_riccati(spec, steps_for(spec.grid.T, cfg.ode_dt, "ode dt"));
  r.ensemble = generate_brownian(cfg.seed, cfg.n_paths, spec.grid);
  const PathEnsemble& ens = r.ensemble;
  r.basis.degree = cfg.basis_degree;

  r.bsde = solve_phi(spec, r.riccati.upsilon, ens, r.basis);
  r.open_loop = assemble_open_loop(spec, r.riccati, r.bsde, ens);
  r.residuals = fbsde_residuals(spec, r.riccati, r.bsde, r.open_loop, ens);
  r.psi = solve_psi(spec, r.riccati, r.bsde, ens, r.basis);
  r.closed_loop = closed_loop_simulate(spec, r.riccati, r.bsde, r.psi, ens);
  r.stationarity = stationarity_residual(spec, r.open_loop, r.basis, ens);

  const CostEstimate mc = evaluate_cost_mc(spec, r.open_loop, ens);
  r.cost = combine_cost(optimal_cost_formula(spec, r.riccati, r.bsde, ens), mc);
  r.j_batch_se = cost_batch_stderr(spec, r.riccati, ens, r.basis);

  const int n = spec.n;
  const Mat F = Mat::Identity(n, n) + r.riccati.upsilon.at(0) * spec.G;
  const Mat Finv = F.partialPivLu().inverse();
  r.y0 = Finv * r.bsde.phi0;
  r.y0_se = Finv.cwiseAbs() * r.bsde.phi0_stderr;

  r.feedback_gap = rms_diff(r.closed_loop.v, r.open_loop.v);
  r.xhat_gap = rms_diff(r.closed_loop.X_hat, r.open_loop.X_hat);
  r.x_gap = rms_diff(r.closed_loop.X, r.open_loop.X);
  r.terminal_tower = tower_check(sample_terminal(spec.terminal, n, ens), ens.grid.N, r.basis, ens);

  bool c2_zero = true;
  for (int k = 0; k <= spec.grid.N; ++k) c2_zero = c2_zero && spec.C2.eval(spec.grid.t(k), spec.grid.T).isZero(0.0);
  if (c2_zero) {
    BsdeOptions o;
    o.stderr_batches = 0;
    r.phi_hat_direct0 = solve_phi_hat_direct(spec, r.riccati.upsilon, ens, r.basis, o).phi0(0);
  }
  if (cfg.preset == "blqa") r.reference_cost = BlqaClosedForm().cost();
  return r;
}

}  // namespace blq
