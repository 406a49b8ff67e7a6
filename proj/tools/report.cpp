#include "report.hpp"

#include <filesystem>
#include <fstream>

#include "blq/csv.hpp"
#include "json.hpp"

namespace blq {

namespace {

using json = nlohmann::json;

bool wanted(const RunConfig& cfg, const std::string& name) {
  return cfg.artifacts.empty() || cfg.artifacts.count(name) > 0;
}

std::string path_of(const RunConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.out_dir) / file).string();
}

void suffixed(std::vector<std::string>& names, const std::string& base, int d) {
  for (int i = 0; i < d; ++i) names.push_back(d == 1 ? base : base + "_" + std::to_string(i));
}

json vec_json(const Vec& v) {
  if (v.size() == 1) return v(0);
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail("cli", ErrorCode::Io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) fail("cli", ErrorCode::Io, "write failed for '" + path + "'");
}

void write_riccati(const RunConfig& cfg, const PipelineResult& r) {
  const RiccatiBundle& b = r.riccati;
  const int n = b.upsilon.dim();
  CsvWriter w(path_of(cfg, "riccati.csv"));
  std::vector<std::string> names{"t"};
  const std::pair<const char*, const MatrixPath*> paths[] = {
      {"upsilon", &b.upsilon}, {"gamma1", &b.gamma1}, {"gamma2", &b.gamma2}, {"sigma", &b.sigma}};
  for (const auto& [name, p] : paths) {
    (void)p;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        names.push_back(n == 1 ? std::string(name) : std::string(name) + "_" + std::to_string(i) + "_" +
                                                         std::to_string(j));
  }
  w.header(names);
  std::vector<double> row;
  for (int k = 0; k <= b.upsilon.grid.N; ++k) {
    row.assign(1, b.upsilon.grid.t(k));
    for (const auto& [name, p] : paths) {
      (void)name;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) row.push_back(p->at(k)(i, j));
    }
    w.row(row);
  }
  w.close();
}

void write_bsde(const RunConfig& cfg, const PipelineResult& r) {
  const int n = r.spec.n;
  const FilteredBsdeSolution& s = r.bsde;
  CsvWriter w(path_of(cfg, "bsde.csv"));
  std::vector<std::string> names{"t"};
  suffixed(names, "phi_hat_mean", n);
  suffixed(names, "eta1_hat_mean", n);
  suffixed(names, "eta2_hat_mean", n);
  suffixed(names, "psi_hat_mean", n);
  w.header(names);
  std::vector<double> row;
  for (int k = 0; k <= r.ensemble.grid.N; ++k) {
    row.assign(1, r.ensemble.grid.t(k));
    for (const Field* f : {&s.phi_hat, &s.eta1_hat, &s.eta2_hat, &r.psi.psi_hat}) {
      const Vec m = f->node_mean(k);
      row.insert(row.end(), m.data(), m.data() + m.size());
    }
    w.row(row);
  }
  w.close();
}

void write_trajectory(const RunConfig& cfg, const PipelineResult& r) {
  const int n = r.spec.n;
  const HamiltonianTrajectory& tr = r.open_loop;
  const auto table = node_table(r.spec, r.ensemble.grid, nullptr, &r.riccati);
  CsvWriter w(path_of(cfg, "trajectory.csv"));
  std::vector<std::string> names{"t"};
  suffixed(names, "y_hat_mean", n);
  suffixed(names, "z1_hat_mean", n);
  suffixed(names, "x_hat_mean", n);
  suffixed(names, "y_mean", n);
  suffixed(names, "x_mean", n);
  w.header(names);
  std::vector<double> row;
  for (int k = 0; k <= r.ensemble.grid.N; ++k) {
    const NodeCoefs& c = table[k];
    const Vec xh = tr.X_hat.node_mean(k);
    // Ẑ1 = (I+ΥN1)^{-1}(η̂1 − ΥC1ᵀX̂) is linear, so its mean follows from the node means
    const Vec z1h = c.K1 * (r.bsde.eta1_hat.node_mean(k) - c.U * c.C1.transpose() * xh);
    row.assign(1, r.ensemble.grid.t(k));
    for (const Vec& m : {Vec(tr.Y_hat.node_mean(k)), z1h, xh, Vec(tr.Y.node_mean(k)), Vec(tr.X.node_mean(k))})
      row.insert(row.end(), m.data(), m.data() + m.size());
    w.row(row);
  }
  w.close();
}

void write_control(const RunConfig& cfg, const PipelineResult& r) {
  const int m = r.spec.m;
  const Field& v = r.closed_loop.v;
  CsvWriter w(path_of(cfg, "control.csv"));
  std::vector<std::string> names{"t"};
  suffixed(names, "v_mean", m);
  suffixed(names, "v_sd", m);
  w.header(names);
  std::vector<double> row;
  for (int k = 0; k <= r.ensemble.grid.N; ++k) {
    const Vec mean = v.node_mean(k);
    const Vec sd = ((v.mat(k).colwise() - mean).array().square().rowwise().sum() / v.paths()).sqrt();
    row.assign(1, r.ensemble.grid.t(k));
    row.insert(row.end(), mean.data(), mean.data() + m);
    row.insert(row.end(), sd.data(), sd.data() + m);
    w.row(row);
  }
  w.close();
}

void write_cost(const RunConfig& cfg, const PipelineResult& r) {
  const CostReport& c = r.cost;
  json terms = json::object();
  for (const auto& t : c.terms) terms[t.name] = {{"value", t.value}, {"se", t.se}};
  json j = {{"j_mc", c.j_mc},
            {"j_mc_se", c.j_mc_se},
            {"j_mc_batch_se", r.j_batch_se},
            {"j_formula", c.j_formula},
            {"j_formula_se", c.j_formula_se},
            {"combined_se", c.combined_se},
            {"agreement", c.agreement},
            {"terms", terms},
            {"y0", vec_json(r.y0)},
            {"y0_se", vec_json(r.y0_se)}};
  if (r.reference_cost) j["reference_cost"] = *r.reference_cost;
  write_json(path_of(cfg, "cost.json"), j);
}

void write_diagnostics(const RunConfig& cfg, const PipelineResult& r) {
  const ProblemSpec& s = r.spec;
  const ValidationReport& v = r.validation;
  double min_h = INFINITY, min_n1 = INFINITY, min_n2 = INFINITY, min_r = INFINITY, sym = 0.0;
  for (const auto& nc : v.nodes) {
    min_h = std::min(min_h, nc.min_eig_H);
    min_n1 = std::min(min_n1, nc.min_eig_N1);
    min_n2 = std::min(min_n2, nc.min_eig_N2);
    min_r = std::min(min_r, nc.min_eig_R);
    sym = std::max(sym, nc.sym_defect);
  }
  const RiccatiBundle& b = r.riccati;
  double min_eig_ups = INFINITY, min_eig_g1 = INFINITY, min_eig_g2 = INFINITY;
  for (int k = 0; k <= b.upsilon.grid.N; ++k) {
    min_eig_ups = std::min(min_eig_ups, min_eigenvalue_sym(b.upsilon.at(k)));
    min_eig_g1 = std::min(min_eig_g1, min_eigenvalue_sym(b.gamma1.at(k)));
    min_eig_g2 = std::min(min_eig_g2, min_eigenvalue_sym(b.gamma2.at(k)));
  }
  json j;
  j["problem"] = {{"name", s.name},
                  {"n", s.n},
                  {"m", s.m},
                  {"T", s.grid.T},
                  {"n_steps", s.grid.N},
                  {"dt", s.grid.dt()},
                  {"ode_steps", b.upsilon.grid.N},
                  {"n_paths", r.ensemble.n_paths},
                  {"seed", r.ensemble.seed},
                  {"basis_degree", r.basis.degree}};
  j["validation"] = {{"accepted", v.accepted},      {"min_eig_G", v.min_eig_G}, {"min_eig_H", min_h},
                     {"min_eig_N1", min_n1},        {"min_eig_N2", min_n2},     {"min_eig_R", min_r},
                     {"max_symmetry_defect", sym}};
  j["riccati"] = {{"upsilon_0", vec_json(Eigen::Map<const Vec>(b.upsilon.at(0).data(), b.upsilon.at(0).size()))},
                  {"min_eig_upsilon", min_eig_ups},
                  {"min_eig_gamma1", min_eig_g1},
                  {"min_eig_gamma2", min_eig_g2},
                  {"min_smin_I_plus_upsilon_N1", b.min_smin_upsilon_n1},
                  {"min_smin_I_plus_gamma2_upsilon", b.min_smin_gamma2_upsilon}};
  j["bsde"] = {{"phi0", vec_json(r.bsde.phi0)},
               {"phi0_se", vec_json(r.bsde.phi0_stderr)},
               {"phi_hat0", vec_json(r.bsde.phi_hat.node_mean(0))},
               {"max_refinement_move", r.bsde.max_refinement_move},
               {"terminal_tower_check", r.terminal_tower}};
  if (r.phi_hat_direct0) j["bsde"]["phi_hat0_direct"] = *r.phi_hat_direct0;
  j["hamiltonian"] = {{"state_euler_residual", r.residuals.state_rms},
                      {"adjoint_euler_residual", r.residuals.adjoint_rms},
                      {"relation_y", r.residuals.relation_y},
                      {"relation_z2", r.residuals.relation_z2},
                      {"relation_v", r.residuals.relation_v},
                      {"initial_identity", r.residuals.initial_identity},
                      {"stationarity_residual", r.stationarity.value},
                      {"stationarity_noise_floor", r.stationarity.noise_floor},
                      {"feedback_open_loop_rms", r.feedback_gap},
                      {"two_representation_rms", r.xhat_gap},
                      {"closed_vs_simulated_x_rms", r.x_gap},
                      {"psi_hat_projection_gap", r.psi.projection_gap}};
  write_json(path_of(cfg, "diagnostics.json"), j);
}

}  // namespace

void write_artifacts(const RunConfig& cfg, const PipelineResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) fail("cli", ErrorCode::Io, "cannot create output directory '" + cfg.out_dir + "'");
  if (wanted(cfg, "riccati")) write_riccati(cfg, r);
  if (wanted(cfg, "bsde")) write_bsde(cfg, r);
  if (wanted(cfg, "trajectory")) write_trajectory(cfg, r);
  if (wanted(cfg, "control")) write_control(cfg, r);
  if (wanted(cfg, "cost")) write_cost(cfg, r);
  if (wanted(cfg, "diagnostics")) write_diagnostics(cfg, r);
}

std::string error_record(const std::string& error_class, const std::string& module, const std::string& detail) {
  return json{{"error", error_class}, {"module", module}, {"detail", detail}}.dump();
}

}  // namespace blq
