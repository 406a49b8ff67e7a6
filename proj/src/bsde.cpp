#include "blq/bsde.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "blq/numerics.hpp"

namespace blq {

namespace {

const char* kModule = "bsde";

double op_norm(const Mat& m) { return m.size() ? Eigen::JacobiSVD<Mat>(m).singularValues()(0) : 0.0; }

Mat resolvent(const Mat& U, const Mat& N1) {
  const Mat F = Mat::Identity(U.rows(), U.cols()) + U * N1;
  if (!(min_singular_value(F) >= kMinSingular))
    fail(kModule, ErrorCode::SingularFactor, "I + Upsilon N1 is singular");
  return F.partialPivLu().inverse();
}

}  // namespace

// ---------------------------------------------------------------------------
// generators

double LinearPhiGenerator::lipschitz() const {
  double L = 0.0;
  for (int k = 0; k <= ups_.grid.N; ++k) {
    const double t = ups_.grid.t(k);
    const CoefValues c = eval_all(spec_, t);
    const Mat& U = ups_.at(k);
    L = std::max(L, op_norm(c.A) + op_norm(U * c.H) + 2.0 * op_norm(c.C1) + op_norm(c.C1 * resolvent(U, c.N1)) +
                        op_norm(c.C2));
  }
  return L;
}

void LinearPhiGenerator::eval(int, double t, int, const GenArgs& a, Eigen::Ref<Mat> out) const {
  const CoefValues c = eval_all(spec_, t);
  const Mat U = ups_.interpolate(t);
  const Mat UH = U * c.H;
  const Mat C1K = c.C1 * resolvent(U, c.N1);
  out.noalias() = c.A * a.P + UH * a.Ph + c.C1 * (a.Q1 - a.Q1h) + C1K * a.Q1h + c.C2 * a.Q2;
}

double ObservablePhiGenerator::lipschitz() const {
  double L = 0.0;
  for (int k = 0; k <= ups_.grid.N; ++k) {
    const CoefValues c = eval_all(spec_, ups_.grid.t(k));
    const Mat& U = ups_.at(k);
    L = std::max(L, op_norm(c.A + U * c.H) + op_norm(c.C1 * resolvent(U, c.N1)));
  }
  return L;
}

void ObservablePhiGenerator::eval(int, double t, int, const GenArgs& a, Eigen::Ref<Mat> out) const {
  const CoefValues c = eval_all(spec_, t);
  const Mat U = ups_.interpolate(t);
  out.noalias() = (c.A + U * c.H) * a.Ph + (c.C1 * resolvent(U, c.N1)) * a.Q1h;
}

double StateGenerator::lipschitz() const {
  double L = 0.0;
  const TimeGrid& g = spec_.grid;
  for (int k = 0; k <= g.N; ++k) {
    const CoefValues c = eval_all(spec_, g.t(k));
    L = std::max(L, op_norm(c.A) + op_norm(c.C1) + op_norm(c.C2));
  }
  return L;
}

void StateGenerator::eval(int k, double t, int p0, const GenArgs& a, Eigen::Ref<Mat> out) const {
  const CoefValues c = eval_all(spec_, t);
  const auto u = u_.mat(k).middleCols(p0, a.P.cols());
  out.noalias() = c.A * a.P + c.B * u + c.C1 * a.Q1 + c.C2 * a.Q2;
}

double AffineGenerator::lipschitz() const {
  return std::abs(a) + std::abs(ah) + std::abs(b1) + std::abs(b1h) + std::abs(b2) + std::abs(b2h);
}

void AffineGenerator::eval(int, double, int, const GenArgs& g, Eigen::Ref<Mat> out) const {
  out = (c0 + (a * g.P + ah * g.Ph + b1 * g.Q1 + b1h * g.Q1h + b2 * g.Q2 + b2h * g.Q2h).array()).matrix();
}

void SineGenerator::eval(int, double, int, const GenArgs& g, Eigen::Ref<Mat> out) const {
  out = kappa * g.P.array().sin().matrix();
}

// ---------------------------------------------------------------------------
// solver

namespace {

struct SweepOutput {
  FilteredBsdeSolution* sol = nullptr;  // null: only P0 is returned
  Vec phi0;
  double max_move = 0.0;
};

double rms(const Mat& m) { return m.size() ? std::sqrt(m.squaredNorm() / static_cast<double>(m.size())) : 0.0; }

// Generator evaluation over columns [q0, q0 + nq), path-parallel in blocks.
void eval_gen(const Generator& gen, int k, double t, int q0, const Mat& P, const Mat& Q1, const Mat& Q2,
              const Mat& Ph, const Mat& Q1h, const Mat& Q2h, Mat& out) {
  out.resize(P.rows(), P.cols());
  kernels::for_blocks(static_cast<int>(P.cols()), true, [&](int p0, int np) {
    GenArgs a{P.middleCols(p0, np),  Q1.middleCols(p0, np),  Q2.middleCols(p0, np),
              Ph.middleCols(p0, np), Q1h.middleCols(p0, np), Q2h.middleCols(p0, np)};
    gen.eval(k, t, q0 + p0, a, out.middleCols(p0, np));
  });
}

void sweep(const Generator& gen, const Eigen::Ref<const Mat>& terminal, const PathEnsemble& ens,
           const RegressionBasis& basis, const BsdeOptions& opt, int q0, int nq, SweepOutput& res) {
  const int n = static_cast<int>(terminal.rows());
  const int N = ens.grid.N;
  const double dt = ens.grid.dt();
  const Filtration full_f = opt.observable_only ? Filtration::Observable : Filtration::Full;

  Mat Pn = terminal;  // P_{k+1}
  Mat fn;             // f_{k+1} (empty at the terminal step)
  Mat Q1, Q2, Q1h, Q2h, Eh, P0, P0h, Pmid, Pmidh, g, Pk, Pkh;
  const Mat zero = Mat::Zero(n, nq);
  FilteredBsdeSolution* sol = res.sol;

  for (int k = N - 1; k >= 0; --k) {
    const Projector full(ens, k, basis, full_f, q0, nq);
    std::unique_ptr<Projector> obs_holder;
    if (!opt.observable_only) obs_holder = std::make_unique<Projector>(ens, k, basis, Filtration::Observable, q0, nq);
    const Projector& obs = opt.observable_only ? full : *obs_holder;

    // conditional expectations of P_{k+1} and of the Z target
    Mat stack(2 * n, nq);
    stack.topRows(n) = Pn;
    if (fn.size())
      stack.bottomRows(n) = Pn - 0.5 * dt * fn;
    else
      stack.bottomRows(n) = Pn;
    const Mat cond = full.project(stack);
    const Mat E = cond.topRows(n);
    const Mat resid = stack.bottomRows(n) - cond.bottomRows(n);

    Eigen::Map<const Eigen::RowVectorXd> dw1(ens.dW1.node(k) + q0, nq);
    Eigen::Map<const Eigen::RowVectorXd> dw2(ens.dW2.node(k) + q0, nq);
    if (opt.observable_only) {
      Q1 = full.project((resid.array().rowwise() * dw1.array()).matrix()) / dt;
      Q2 = zero;
      Q1h = Q1;
      Q2h = zero;
      Eh = E;
    } else {
      Mat qt(2 * n, nq);
      qt.topRows(n) = (resid.array().rowwise() * dw1.array()).matrix();
      qt.bottomRows(n) = (resid.array().rowwise() * dw2.array()).matrix();
      const Mat q = full.project(qt) / dt;
      Q1 = q.topRows(n);
      Q2 = q.bottomRows(n);
      Mat hs(3 * n, nq);
      hs.topRows(n) = Q1;
      hs.middleRows(n, n) = Q2;
      hs.bottomRows(n) = E;
      const Mat h = obs.project(hs);
      Q1h = h.topRows(n);
      Q2h = h.middleRows(n, n);
      Eh = h.bottomRows(n);
    }

    // implicit midpoint, one fixed-point refinement
    const double tm = ens.grid.t(k) + 0.5 * dt;
    eval_gen(gen, k, tm, q0, E, Q1, Q2, Eh, Q1h, Q2h, g);
    P0 = E - dt * g;
    P0h = opt.observable_only ? P0 : obs.project(P0);
    Pmid = 0.5 * (P0 + E);
    Pmidh = 0.5 * (P0h + Eh);
    eval_gen(gen, k, tm, q0, Pmid, Q1, Q2, Pmidh, Q1h, Q2h, g);
    Pk = E - dt * g;
    const double move = rms(Pk - P0);
    res.max_move = std::max(res.max_move, move);
    if (!(move <= kRefineTol)) {
      std::ostringstream os;
      os << "fixed-point refinement moved P by " << move << " RMS at t = " << ens.grid.t(k);
      fail(kModule, ErrorCode::NonConverged, os.str());
    }
    if (!Pk.allFinite() || Pk.cwiseAbs().maxCoeff() > kBlowup)
      fail(kModule, ErrorCode::Blowup, "BSDE solution exceeds 1e12");
    Pkh = opt.observable_only ? Pk : obs.project(Pk);
    eval_gen(gen, k, ens.grid.t(k), q0, Pk, Q1, Q2, Pkh, Q1h, Q2h, fn);

    if (sol) {
      sol->phi.mat(k) = Pk;
      sol->eta1.mat(k) = Q1;
      sol->eta2.mat(k) = Q2;
      sol->phi_hat.mat(k) = Pkh;
      sol->eta1_hat.mat(k) = Q1h;
      sol->eta2_hat.mat(k) = Q2h;
    }
    Pn = Pk;
  }
  res.phi0 = Pn.rowwise().mean();
}

}  // namespace

FilteredBsdeSolution solve_filtered_bsde(const Generator& gen, const Mat& terminal, const PathEnsemble& ens,
                                         const RegressionBasis& basis, const BsdeOptions& opt) {
  const int n = static_cast<int>(terminal.rows());
  const int P = ens.n_paths;
  const int N = ens.grid.N;
  if (terminal.cols() != P) fail(kModule, ErrorCode::InvalidArgument, "terminal has wrong number of paths");

  FilteredBsdeSolution sol;
  sol.dt = ens.grid.dt();
  sol.degree = basis.degree;
  sol.n_paths = P;
  for (Field* f : {&sol.phi, &sol.eta1, &sol.eta2, &sol.phi_hat, &sol.eta1_hat, &sol.eta2_hat})
    *f = Field(N + 1, P, n);

  SweepOutput res;
  res.sol = &sol;
  sweep(gen, terminal, ens, basis, opt, 0, P, res);
  sol.phi0 = res.phi0;
  sol.max_refinement_move = res.max_move;

  // terminal node
  sol.phi.mat(N) = terminal;
  sol.eta1.mat(N) = sol.eta1.mat(N - 1);
  sol.eta2.mat(N) = sol.eta2.mat(N - 1);
  sol.phi_hat.mat(N) = Projector(ens, N, basis, Filtration::Observable).project(terminal);
  sol.eta1_hat.mat(N) = sol.eta1_hat.mat(N - 1);
  sol.eta2_hat.mat(N) = sol.eta2_hat.mat(N - 1);

  // batch-means standard error of P0
  sol.phi0_stderr = Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
  const int p_full = basis_size(basis, opt.observable_only ? Filtration::Observable : Filtration::Full);
  int K = opt.stderr_batches;
  while (K >= 2 && P / K < 10 * p_full) --K;
  if (K >= 2) {
    Mat est(n, K);
    for (int b = 0; b < K; ++b) {
      const int q0 = static_cast<int>(static_cast<long long>(P) * b / K);
      const int q1 = static_cast<int>(static_cast<long long>(P) * (b + 1) / K);
      SweepOutput r;
      sweep(gen, terminal.middleCols(q0, q1 - q0), ens, basis, opt, q0, q1 - q0, r);
      est.col(b) = r.phi0;
    }
    const Vec mu = est.rowwise().mean();
    for (int i = 0; i < n; ++i) {
      const double var = (est.row(i).array() - mu(i)).square().sum() / (K - 1);
      sol.phi0_stderr(i) = std::sqrt(var / K);
    }
  }
  return sol;
}

FilteredBsdeSolution solve_phi(const ProblemSpec& spec, const MatrixPath& upsilon, const PathEnsemble& ens,
                               const RegressionBasis& basis, const BsdeOptions& opt) {
  const LinearPhiGenerator gen(spec, upsilon);
  return solve_filtered_bsde(gen, sample_terminal(spec.terminal, spec.n, ens), ens, basis, opt);
}

FilteredBsdeSolution solve_phi_hat_direct(const ProblemSpec& spec, const MatrixPath& upsilon, const PathEnsemble& ens,
                                          const RegressionBasis& basis, const BsdeOptions& opt) {
  const TimeGrid& g = ens.grid;
  for (int k = 0; k <= g.N; ++k)
    if (!spec.C2.eval(g.t(k), g.T).isZero(0.0))
      fail(kModule, ErrorCode::InvalidArgument, "direct filtered solve requires C2 = 0");
  const ObservablePhiGenerator gen(spec, upsilon);
  const Mat zeta = sample_terminal(spec.terminal, spec.n, ens);
  const Mat zeta_hat = Projector(ens, g.N, basis, Filtration::Observable).project(zeta);
  BsdeOptions o = opt;
  o.observable_only = true;
  FilteredBsdeSolution sol = solve_filtered_bsde(gen, zeta_hat, ens, basis, o);
  return sol;
}

}  // namespace blq
