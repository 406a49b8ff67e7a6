#include "blq/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "blq/cost.hpp"
#include "blq/numerics.hpp"

namespace blq {

namespace {

double rms(const Eigen::Ref<const Mat>& m) {
  return m.size() ? std::sqrt(m.squaredNorm() / static_cast<double>(m.size())) : 0.0;
}

Field like(const Field& f, int dim) { return Field(f.nodes(), f.paths(), dim); }

}  // namespace

HamiltonianTrajectory assemble_open_loop(const ProblemSpec& spec, const RiccatiBundle& rb,
                                         const FilteredBsdeSolution& sol, const PathEnsemble& ens) {
  const int n = spec.n, m = spec.m, N = ens.grid.N;
  const auto table = node_table(spec, ens.grid, nullptr, &rb);
  HamiltonianTrajectory tr;
  tr.construction = "open_loop";
  tr.X_hat = simulate_xhat(spec, table, sol.phi_hat, sol.eta1_hat, ens);
  tr.X = simulate_x(spec, table, sol.phi, sol.eta1, sol.eta2, sol.eta1_hat, tr.X_hat, ens);
  tr.Y = like(sol.phi, n);
  tr.Y_hat = like(sol.phi, n);
  tr.Z1 = like(sol.phi, n);
  tr.Z2 = like(sol.phi, n);
  tr.v = like(sol.phi, m);
#pragma omp parallel for schedule(static)
  for (int k = 0; k <= N; ++k) {
    const NodeCoefs& c = table[k];
    const auto xh = tr.X_hat.mat(k);
    const auto e1h = sol.eta1_hat.mat(k);
    tr.Y.mat(k).noalias() = c.U * xh;
    tr.Y.mat(k) += sol.phi.mat(k);
    tr.Y_hat.mat(k).noalias() = c.U * xh;
    tr.Y_hat.mat(k) += sol.phi_hat.mat(k);
    tr.Z1.mat(k) = sol.eta1.mat(k) - e1h;
    tr.Z1.mat(k).noalias() += c.K1 * (e1h - (c.U * c.C1.transpose()) * xh);
    tr.Z2.mat(k) = sol.eta2.mat(k);
    tr.v.mat(k).noalias() = -(c.Rinv * c.B.transpose()) * xh;
  }
  const Mat F = Mat::Identity(n, n) + table.front().U * spec.G;
  tr.Y0 = F.partialPivLu().solve(sol.phi0);
  return tr;
}

FbsdeResiduals fbsde_residuals(const ProblemSpec& spec, const RiccatiBundle& rb, const FilteredBsdeSolution& sol,
                               const HamiltonianTrajectory& tr, const PathEnsemble& ens) {
  const int N = ens.grid.N;
  const double dt = ens.grid.dt();
  const auto table = node_table(spec, ens.grid, nullptr, &rb);
  FbsdeResiduals r;
  double ss_state = 0.0, ss_adj = 0.0;
  for (int k = 0; k < N; ++k) {
    const NodeCoefs& c = table[k];
    Eigen::Map<const Eigen::RowVectorXd> dw1(ens.dW1.node(k), ens.n_paths);
    Eigen::Map<const Eigen::RowVectorXd> dw2(ens.dW2.node(k), ens.n_paths);
    const auto Y = tr.Y.mat(k), X = tr.X.mat(k), Z1 = tr.Z1.mat(k), Z2 = tr.Z2.mat(k);
    Mat d = tr.Y.mat(k + 1) - Y - dt * (c.A * Y + c.B * tr.v.mat(k) + c.C1 * Z1 + c.C2 * Z2);
    d -= (Z1.array().rowwise() * dw1.array()).matrix() + (Z2.array().rowwise() * dw2.array()).matrix();
    ss_state += d.squaredNorm();
    Mat e = tr.X.mat(k + 1) - X + dt * (c.A.transpose() * X + c.H * Y);
    e += ((c.C1.transpose() * X + c.N1 * Z1).array().rowwise() * dw1.array()).matrix();
    e += ((c.C2.transpose() * X + c.N2 * Z2).array().rowwise() * dw2.array()).matrix();
    ss_adj += e.squaredNorm();
  }
  const double cnt = static_cast<double>(N) * ens.n_paths * spec.n;
  r.state_rms = std::sqrt(ss_state / cnt);
  r.adjoint_rms = std::sqrt(ss_adj / cnt);
  for (int k = 0; k <= N; ++k) {
    const NodeCoefs& c = table[k];
    const auto xh = tr.X_hat.mat(k);
    r.relation_y = std::max(r.relation_y, (tr.Y.mat(k) - c.U * xh - sol.phi.mat(k)).cwiseAbs().maxCoeff());
    r.relation_z2 = std::max(r.relation_z2, (tr.Z2.mat(k) - sol.eta2.mat(k)).cwiseAbs().maxCoeff());
    r.relation_v =
        std::max(r.relation_v, (tr.v.mat(k) + (c.Rinv * c.B.transpose()) * xh).cwiseAbs().maxCoeff());
  }
  const int n = spec.n;
  const Mat F = Mat::Identity(n, n) + spec.G * table.front().U;
  const Mat x0 = F.partialPivLu().solve(spec.G * sol.phi_hat.mat(0));
  r.initial_identity = (tr.X_hat.mat(0) + x0).cwiseAbs().maxCoeff();
  return r;
}

PsiSolution solve_psi(const ProblemSpec& spec, const RiccatiBundle& rb, const FilteredBsdeSolution& sol,
                      const PathEnsemble& ens, const RegressionBasis& basis) {
  const int n = spec.n;
  const auto table = node_table(spec, ens.grid, nullptr, &rb);
  PsiSolution out;
  const Mat zero = Mat::Zero(n, 1);

  auto filtered = [&](int k, int p0, int np, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift,
                      Eigen::Ref<Mat> diff1, Eigen::Ref<Mat>) {
    const NodeCoefs& c = table[k];
    const auto ph = sol.phi_hat.mat(k).middleCols(p0, np);
    const auto e1h = sol.eta1_hat.mat(k).middleCols(p0, np);
    const auto e2h = sol.eta2_hat.mat(k).middleCols(p0, np);
    const Mat GC1K = c.G2 * c.C1 * c.K1;
    const Mat UC1t = c.U * c.C1.transpose();
    drift.noalias() = -(c.A.transpose() + c.G2 * c.BRB) * x - GC1K * (e1h + UC1t * x) - (c.G2 * c.C2) * e2h;
    const Mat w = c.K2 * (c.G2 * ph + x);
    diff1.noalias() = ((c.N1 - c.G2) * c.K1) * (e1h + UC1t * w) - c.C1.transpose() * w;
  };
  EulerOptions fo;
  fo.uses_w2 = false;
  out.psi_hat = euler_sde(filtered, zero, ens, fo);

  auto full = [&](int k, int p0, int np, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift,
                  Eigen::Ref<Mat> diff1, Eigen::Ref<Mat> diff2) {
    const NodeCoefs& c = table[k];
    const auto ph = sol.phi_hat.mat(k).middleCols(p0, np);
    const auto phi = sol.phi.mat(k).middleCols(p0, np);
    const auto e1 = sol.eta1.mat(k).middleCols(p0, np);
    const auto e2 = sol.eta2.mat(k).middleCols(p0, np);
    const auto e1h = sol.eta1_hat.mat(k).middleCols(p0, np);
    const auto e2h = sol.eta2_hat.mat(k).middleCols(p0, np);
    const auto xh = out.psi_hat.mat(k).middleCols(p0, np);
    const Mat UC1t = c.U * c.C1.transpose();
    drift.noalias() = -c.A.transpose() * x - (c.G2 * c.BRB) * xh - (c.G2 * c.C1 * c.K1) * (e1h + UC1t * xh) -
                      (c.G2 * c.C2) * e2h - (c.G1 * c.C1) * (e1 - e1h) - (c.G1 * c.C2) * (e2 - e2h);
    const Mat w = c.K2 * (c.G2 * ph + xh);
    const Mat fluct = c.G1 * (phi - ph) + (x - xh);
    diff1.noalias() = (c.N1 - c.G1) * (e1 - e1h) - c.C1.transpose() * fluct +
                      ((c.N1 - c.G2) * c.K1) * (e1h + UC1t * w) - c.C1.transpose() * w;
    diff2.noalias() = (c.N2 - c.G1) * e2 - c.C2.transpose() * fluct - c.C2.transpose() * w;
  };
  out.psi = euler_sde(full, zero, ens);

  for (int k = 1; k <= ens.grid.N; ++k) {
    const Mat proj = Projector(ens, k, basis, Filtration::Observable).project(out.psi.mat(k));
    out.projection_gap = std::max(out.projection_gap, rms(proj - out.psi_hat.mat(k)));
  }
  return out;
}

Mat feedback_control(const NodeCoefs& c, const Eigen::Ref<const Mat>& Y_hat, const Eigen::Ref<const Mat>& psi_hat) {
  return (c.Rinv * c.B.transpose()) * (c.G2 * Y_hat + psi_hat);
}

HamiltonianTrajectory closed_loop_simulate(const ProblemSpec& spec, const RiccatiBundle& rb,
                                           const FilteredBsdeSolution& sol, const PsiSolution& psi,
                                           const PathEnsemble& ens) {
  const int n = spec.n, m = spec.m, N = ens.grid.N;
  const auto table = node_table(spec, ens.grid, nullptr, &rb);
  HamiltonianTrajectory tr;
  tr.construction = "closed_loop";
  for (Field* f : {&tr.X, &tr.X_hat, &tr.Y, &tr.Y_hat, &tr.Z1, &tr.Z2}) *f = like(sol.phi, n);
  tr.v = like(sol.phi, m);
  tr.psi = psi.psi;
  tr.psi_hat = psi.psi_hat;
#pragma omp parallel for schedule(static)
  for (int k = 0; k <= N; ++k) {
    const NodeCoefs& c = table[k];
    const auto ph = sol.phi_hat.mat(k);
    const auto qh = psi.psi_hat.mat(k);
    const auto e1h = sol.eta1_hat.mat(k);
    auto xh = tr.X_hat.mat(k);
    xh.noalias() = -c.K2 * (c.G2 * ph + qh);
    tr.Y_hat.mat(k).noalias() = c.U * xh;
    tr.Y_hat.mat(k) += ph;
    tr.Y.mat(k).noalias() = c.U * xh;
    tr.Y.mat(k) += sol.phi.mat(k);
    tr.Z1.mat(k) = sol.eta1.mat(k) - e1h;
    tr.Z1.mat(k).noalias() += c.K1 * (e1h - (c.U * c.C1.transpose()) * xh);
    tr.Z2.mat(k) = sol.eta2.mat(k);
    tr.v.mat(k) = feedback_control(c, tr.Y_hat.mat(k), qh);
    tr.X.mat(k).noalias() = -c.G1 * (tr.Y.mat(k) - tr.Y_hat.mat(k)) - c.G2 * tr.Y_hat.mat(k);
    tr.X.mat(k) -= psi.psi.mat(k);
  }
  const Mat F = Mat::Identity(n, n) + table.front().U * spec.G;
  tr.Y0 = F.partialPivLu().solve(sol.phi0);
  return tr;
}

StationarityResidual stationarity_residual(const ProblemSpec& spec, const HamiltonianTrajectory& traj,
                                           const RegressionBasis& basis, const PathEnsemble& ens) {
  StationarityResidual out;
  const int P = ens.n_paths;
  for (int k = 0; k <= ens.grid.N; ++k) {
    const CoefValues c = eval_all(spec, ens.grid.t(k));
    const Mat s = c.R * traj.v.mat(k) + c.B.transpose() * traj.X.mat(k);
    const Projector proj(ens, k, basis, Filtration::Observable);
    const Mat fit = proj.project(s);
    const double value = rms(fit);
    const double floor = rms(s - fit) * std::sqrt(static_cast<double>(proj.size()) / P);
    if (value > out.value) {
      out.value = value;
      out.worst_node = k;
    }
    out.noise_floor = std::max(out.noise_floor, floor);
  }
  return out;
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Constant: return "constant";
    case Direction::SinW1: return "sin_w1";
    case Direction::EarlyIndicator: return "early_indicator";
  }
  return "unknown";
}

std::vector<Direction> all_directions() { return {Direction::Constant, Direction::SinW1, Direction::EarlyIndicator}; }

Field make_direction(Direction d, int m, const PathEnsemble& ens) {
  const TimeGrid& g = ens.grid;
  Field u(g.N + 1, ens.n_paths, m);
  for (int k = 0; k <= g.N; ++k) {
    auto um = u.mat(k);
    switch (d) {
      case Direction::Constant: um.setOnes(); break;
      case Direction::SinW1:
        for (int p = 0; p < ens.n_paths; ++p) um.col(p).setConstant(std::sin(ens.W1.at(k, p)));
        break;
      case Direction::EarlyIndicator: um.setConstant(g.t(k) <= 0.5 * g.T ? 1.0 : 0.0); break;
    }
  }
  return u;
}

std::vector<PerturbationMargin> optimality_margin(const ProblemSpec& spec, const HamiltonianTrajectory& traj,
                                                  const std::vector<Direction>& directions,
                                                  const std::vector<double>& epsilons, const PathEnsemble& ens,
                                                  const RegressionBasis& basis) {
  const TimeGrid& g = ens.grid;
  const int P = ens.n_paths;
  const std::vector<double> base = cost_per_path(spec, g, traj.Y, traj.Z1, traj.Z2, traj.v);
  std::vector<PerturbationMargin> out;
  BsdeOptions opt;
  opt.stderr_batches = 0;
  for (Direction d : directions) {
    const Field u = make_direction(d, spec.m, ens);
    const StateGenerator gen(spec, u);
    const FilteredBsdeSolution resp = solve_filtered_bsde(gen, Mat::Zero(spec.n, P), ens, basis, opt);
    for (double eps : epsilons) {
      Field Y = traj.Y, Z1 = traj.Z1, Z2 = traj.Z2, v = traj.v;
      for (int k = 0; k <= g.N; ++k) {
        Y.mat(k) += eps * resp.phi.mat(k);
        Z1.mat(k) += eps * resp.eta1.mat(k);
        Z2.mat(k) += eps * resp.eta2.mat(k);
        v.mat(k) += eps * u.mat(k);
      }
      const std::vector<double> pert = cost_per_path(spec, g, Y, Z1, Z2, v);
      std::vector<double> diff(P);
      for (int p = 0; p < P; ++p) diff[p] = pert[p] - base[p];
      const MeanStderr ms = mean_stderr(diff);
      out.push_back({d, eps, ms.mean, ms.se});
    }
  }
  return out;
}

}  // namespace blq
