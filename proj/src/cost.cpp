#include "blq/cost.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "blq/numerics.hpp"

namespace blq {

namespace {

// trapezoid weight of node k
double trap_weight(const TimeGrid& g, int k) { return (k == 0 || k == g.N) ? 0.5 * g.dt() : g.dt(); }

double quad(const Mat& W, const Eigen::Ref<const Vec>& x) { return x.dot(W * x); }

}  // namespace

std::vector<double> cost_per_path(const ProblemSpec& spec, const TimeGrid& grid, const Field& Y, const Field& Z1,
                                  const Field& Z2, const Field& v) {
  const int P = Y.paths();
  std::vector<CoefValues> cv;
  cv.reserve(grid.N + 1);
  for (int k = 0; k <= grid.N; ++k) cv.push_back(eval_all(spec, grid.t(k)));
  std::vector<double> out(P, 0.0);
  kernels::for_blocks(P, true, [&](int p0, int np) {
    for (int p = p0; p < p0 + np; ++p) {
      double integral = 0.0;
      for (int k = 0; k <= grid.N; ++k) {
        const CoefValues& c = cv[k];
        const double f = quad(c.H, Y.mat(k).col(p)) + quad(c.R, v.mat(k).col(p)) + quad(c.N1, Z1.mat(k).col(p)) +
                         quad(c.N2, Z2.mat(k).col(p));
        integral += trap_weight(grid, k) * f;
      }
      out[p] = 0.5 * (quad(spec.G, Y.mat(0).col(p)) + integral);
    }
  });
  return out;
}

CostEstimate evaluate_cost_mc(const ProblemSpec& spec, const HamiltonianTrajectory& traj, const PathEnsemble& ens) {
  CostEstimate e;
  e.per_path = cost_per_path(spec, ens.grid, traj.Y, traj.Z1, traj.Z2, traj.v);
  const MeanStderr ms = mean_stderr(e.per_path);
  e.value = ms.mean;
  e.se = ms.se;
  return e;
}

CostReport optimal_cost_formula(const ProblemSpec& spec, const RiccatiBundle& rb, const FilteredBsdeSolution& sol,
                                const PathEnsemble& ens) {
  const TimeGrid& g = ens.grid;
  const int P = ens.n_paths;
  const auto table = node_table(spec, g, nullptr, &rb);
  constexpr int kTerms = 5;
  std::vector<Mat> m3(g.N + 1), m5(g.N + 1), m6(g.N + 1);
  for (int k = 0; k <= g.N; ++k) {
    const NodeCoefs& c = table[k];
    m3[k] = c.N1 * c.K1 - c.Sig;
    m5[k] = c.Sig * c.C1 * c.K1;
    m6[k] = c.Sig * c.C2;
  }
  std::vector<std::array<double, kTerms>> per(P);
  kernels::for_blocks(P, true, [&](int p0, int np) {
    for (int p = p0; p < p0 + np; ++p) {
      std::array<double, kTerms> t{};
      const Vec zh = sol.phi_hat.mat(g.N).col(p);
      t[0] = 0.5 * quad(table[g.N].Sig, zh);
      for (int k = 0; k <= g.N; ++k) {
        const NodeCoefs& c = table[k];
        const double w = trap_weight(g, k);
        const Vec phi = sol.phi.mat(k).col(p), ph = sol.phi_hat.mat(k).col(p);
        const Vec e1 = sol.eta1.mat(k).col(p), e1h = sol.eta1_hat.mat(k).col(p);
        const Vec e2 = sol.eta2.mat(k).col(p), e2h = sol.eta2_hat.mat(k).col(p);
        t[1] += 0.5 * w * (quad(c.H, phi) - quad(c.H, ph));
        t[2] += 0.5 * w * quad(m3[k], e1h);
        t[3] += 0.5 * w * (quad(c.N1, e1 - e1h) + quad(c.N2, e2));
        t[4] -= w * ph.dot(m5[k] * e1h + m6[k] * e2h);
      }
      per[p] = t;
    }
  });
  static const char* names[kTerms] = {"terminal_sigma", "h_variance", "eta1_hat", "eta_residual", "cross"};
  CostReport r;
  std::vector<double> col(P), total(P, 0.0);
  for (int i = 0; i < kTerms; ++i) {
    for (int p = 0; p < P; ++p) {
      col[p] = per[p][i];
      total[p] += per[p][i];
    }
    const MeanStderr ms = mean_stderr(col);
    r.terms.push_back({names[i], ms.mean, ms.se});
  }
  // the reported total is the exact sum of the stored terms
  r.j_formula = 0.0;
  for (const auto& t : r.terms) r.j_formula += t.value;
  r.j_formula_se = mean_stderr(total).se;
  return r;
}

CostReport combine_cost(CostReport r, const CostEstimate& mc) {
  r.j_mc = mc.value;
  r.j_mc_se = mc.se;
  r.combined_se = std::sqrt(mc.se * mc.se + r.j_formula_se * r.j_formula_se);
  const double diff = std::abs(r.j_mc - r.j_formula);
  r.agreement = r.combined_se > 0.0 ? diff / r.combined_se : (diff == 0.0 ? 0.0 : INFINITY);
  return r;
}

double cost_batch_stderr(const ProblemSpec& spec, const RiccatiBundle& rb, const PathEnsemble& ens,
                         const RegressionBasis& basis, int batches) {
  const int P = ens.n_paths;
  int K = batches;
  while (K >= 2 && P / K < 10 * basis_size(basis, Filtration::Full)) --K;
  if (K < 2) return std::numeric_limits<double>::quiet_NaN();
  BsdeOptions opt;
  opt.stderr_batches = 0;
  std::vector<double> est(K);
  for (int b = 0; b < K; ++b) {
    const int q0 = static_cast<int>(static_cast<long long>(P) * b / K);
    const int q1 = static_cast<int>(static_cast<long long>(P) * (b + 1) / K);
    const PathEnsemble sub = slice_ensemble(ens, q0, q1 - q0);
    const FilteredBsdeSolution sol = solve_phi(spec, rb.upsilon, sub, basis, opt);
    est[b] = evaluate_cost_mc(spec, assemble_open_loop(spec, rb, sol, sub), sub).value;
  }
  return mean_stderr(est).se;
}

}  // namespace blq
