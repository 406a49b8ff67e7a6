#include "blq/pathsim.hpp"

#include <cmath>
#include <sstream>

#include "blq/rng.hpp"

namespace blq {

namespace {
const char* kModule = "pathsim";
}

Field::Field(int n_nodes, int n_paths, int dim, double fill)
    : nodes_(n_nodes), paths_(n_paths), dim_(dim),
      data_(static_cast<std::size_t>(n_nodes) * n_paths * dim, fill) {}

Vec Field::node_mean(int k) const {
  // blocked, fixed-order sum
  const auto m = mat(k);
  Vec acc = Vec::Zero(dim_);
  for (int p0 = 0; p0 < paths_; p0 += kernels::kBlock) {
    const int np = std::min(kernels::kBlock, paths_ - p0);
    acc += m.middleCols(p0, np).rowwise().sum();
  }
  return acc / static_cast<double>(paths_);
}

bool Field::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

PathEnsemble generate_brownian(std::uint64_t seed, int n_paths, const TimeGrid& grid,
                               std::optional<std::uint64_t> w2_seed) {
  if (n_paths < 1) fail(kModule, ErrorCode::InvalidArgument, "n_paths must be at least 1");
  PathEnsemble e;
  e.seed = seed;
  e.seed_w2 = w2_seed.value_or(seed);
  e.n_paths = n_paths;
  e.grid = grid;
  const int N = grid.N;
  const double sdt = std::sqrt(grid.dt());
  e.dW1 = Field(N, n_paths, 1);
  e.dW2 = Field(N, n_paths, 1);
  e.W1 = Field(N + 1, n_paths, 1);
  e.W2 = Field(N + 1, n_paths, 1);
  kernels::for_blocks(n_paths, true, [&](int p0, int np) {
    for (int p = p0; p < p0 + np; ++p) {
      double w1 = 0.0, w2 = 0.0;
      for (int k = 0; k < N; ++k) {
        const double d1 = sdt * counter_normal(e.seed, p, k, 0);
        const double d2 = sdt * counter_normal(e.seed_w2, p, k, 1);
        e.dW1.at(k, p) = d1;
        e.dW2.at(k, p) = d2;
        w1 += d1;
        w2 += d2;
        e.W1.at(k + 1, p) = w1;
        e.W2.at(k + 1, p) = w2;
      }
    }
  });
  return e;
}

PathEnsemble slice_ensemble(const PathEnsemble& ens, int q0, int nq) {
  if (q0 < 0 || nq < 1 || q0 + nq > ens.n_paths) fail(kModule, ErrorCode::InvalidArgument, "path slice out of range");
  PathEnsemble e;
  e.seed = ens.seed;
  e.seed_w2 = ens.seed_w2;
  e.n_paths = nq;
  e.grid = ens.grid;
  auto cut = [&](const Field& f) {
    Field out(f.nodes(), nq, f.dim());
    for (int k = 0; k < f.nodes(); ++k) out.mat(k) = f.mat(k).middleCols(q0, nq);
    return out;
  };
  e.dW1 = cut(ens.dW1);
  e.dW2 = cut(ens.dW2);
  e.W1 = cut(ens.W1);
  e.W2 = cut(ens.W2);
  return e;
}

Mat sample_terminal(const TerminalSpec& terminal, int n, const PathEnsemble& ens) {
  const int N = ens.grid.N;
  const double T = ens.grid.T;
  const Vec dir = terminal.direction_for(n);
  Mat out(n, ens.n_paths);
  for (int p = 0; p < ens.n_paths; ++p) out.col(p) = terminal.scalar(ens.W1.at(N, p), ens.W2.at(N, p), T) * dir;
  return out;
}

Field euler_sde(const SdeCoefficients& coeffs, const Mat& x0, const PathEnsemble& ens, const EulerOptions& opt) {
  const int d = static_cast<int>(x0.rows());
  const int P = ens.n_paths;
  const int N = ens.grid.N;
  const double dt = ens.grid.dt();
  if (x0.cols() != 1 && x0.cols() != P) fail(kModule, ErrorCode::InvalidArgument, "x0 must be d x 1 or d x n_paths");
  Field out(N + 1, P, d);
  if (x0.cols() == 1)
    out.mat(0).colwise() = x0.col(0);
  else
    out.mat(0) = x0;
  const std::vector<double> zeros(opt.uses_w2 ? 0 : P, 0.0);
  for (int k = 0; k < N; ++k) {
    kernels::SdeBlockFn fn = [&](int p0, int np, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift,
                                 Eigen::Ref<Mat> diff1, Eigen::Ref<Mat> diff2) {
      coeffs(k, p0, np, x, drift, diff1, diff2);
      if (!opt.uses_w2) diff2.setZero();
    };
    const double* w2 = opt.uses_w2 ? ens.dW2.node(k) : zeros.data();
    auto xk = out.mat(k);
    auto xn = out.mat(k + 1);
    if (opt.parallel)
      kernels::euler_step_parallel(xn, xk, dt, ens.dW1.node(k), w2, fn);
    else
      kernels::euler_step_serial(xn, xk, dt, ens.dW1.node(k), w2, fn);
    if (!xn.allFinite() || xn.cwiseAbs().maxCoeff() > kBlowup) {
      std::ostringstream os;
      os << "simulated process exceeds " << kBlowup << " at t = " << ens.grid.t(k + 1);
      fail(kModule, ErrorCode::Blowup, os.str());
    }
  }
  return out;
}

Field simulate_xhat(const ProblemSpec& spec, const std::vector<NodeCoefs>& table, const Field& phi_hat,
                    const Field& eta1_hat, const PathEnsemble& ens) {
  const int n = spec.n;
  const NodeCoefs& c0 = table.front();
  const Mat I = Mat::Identity(n, n);
  const Mat F = I + spec.G * c0.U;
  if (!(min_singular_value(F) >= kMinSingular)) fail(kModule, ErrorCode::SingularFactor, "I + G Upsilon(0) is singular");
  const Mat x0 = -F.partialPivLu().solve(spec.G * phi_hat.mat(0));
  auto coeffs = [&](int k, int p0, int np, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift,
                    Eigen::Ref<Mat> diff1, Eigen::Ref<Mat>) {
    const NodeCoefs& c = table[k];
    const auto ph = phi_hat.mat(k).middleCols(p0, np);
    const auto e1h = eta1_hat.mat(k).middleCols(p0, np);
    drift.noalias() = -(c.A.transpose() + c.H * c.U) * x - c.H * ph;
    diff1.noalias() = -(c.K1t * c.C1.transpose()) * x - (c.N1 * c.K1) * e1h;
  };
  EulerOptions opt;
  opt.uses_w2 = false;
  return euler_sde(coeffs, x0, ens, opt);
}

Field simulate_x(const ProblemSpec& spec, const std::vector<NodeCoefs>& table, const Field& phi, const Field& eta1,
                 const Field& eta2, const Field& eta1_hat, const Field& xhat, const PathEnsemble& ens) {
  (void)spec;
  const Mat x0 = xhat.mat(0);
  auto coeffs = [&](int k, int p0, int np, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift,
                    Eigen::Ref<Mat> diff1, Eigen::Ref<Mat> diff2) {
    const NodeCoefs& c = table[k];
    const auto ph = phi.mat(k).middleCols(p0, np);
    const auto e1 = eta1.mat(k).middleCols(p0, np);
    const auto e2 = eta2.mat(k).middleCols(p0, np);
    const auto e1h = eta1_hat.mat(k).middleCols(p0, np);
    const auto xh = xhat.mat(k).middleCols(p0, np);
    drift.noalias() = -c.A.transpose() * x - (c.H * c.U) * xh - c.H * ph;
    diff1.noalias() = -c.C1.transpose() * x - c.N1 * (e1 - e1h) - (c.N1 * c.K1) * (e1h - c.U * c.C1.transpose() * xh);
    diff2.noalias() = -c.C2.transpose() * x - c.N2 * e2;
  };
  return euler_sde(coeffs, x0, ens);
}

}  // namespace blq
