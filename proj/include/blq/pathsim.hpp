#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "blq/core.hpp"
#include "blq/kernels.hpp"
#include "blq/node_table.hpp"

namespace blq {

// Node-major per-path values: at node k, path p holds d contiguous doubles,
// so mat(k) is a d x n_paths column-major view.
class Field {
 public:
  using MapT = Eigen::Map<Mat>;
  using ConstMapT = Eigen::Map<const Mat>;

  Field() = default;
  Field(int n_nodes, int n_paths, int dim, double fill = 0.0);

  int nodes() const { return nodes_; }
  int paths() const { return paths_; }
  int dim() const { return dim_; }
  bool empty() const { return data_.empty(); }

  double* node(int k) { return data_.data() + static_cast<std::size_t>(k) * paths_ * dim_; }
  const double* node(int k) const { return data_.data() + static_cast<std::size_t>(k) * paths_ * dim_; }
  MapT mat(int k) { return MapT(node(k), dim_, paths_); }
  ConstMapT mat(int k) const { return ConstMapT(node(k), dim_, paths_); }
  double& at(int k, int p, int i = 0) { return node(k)[static_cast<std::size_t>(p) * dim_ + i]; }
  double at(int k, int p, int i = 0) const { return node(k)[static_cast<std::size_t>(p) * dim_ + i]; }

  // Per-node mean over paths (d-vector).
  Vec node_mean(int k) const;
  bool all_finite() const;
  double max_abs() const;

 private:
  int nodes_ = 0, paths_ = 0, dim_ = 0;
  std::vector<double> data_;
};

struct PathEnsemble {
  std::uint64_t seed = 0;
  std::uint64_t seed_w2 = 0;
  int n_paths = 0;
  TimeGrid grid;
  Field dW1, dW2;  // N nodes (increment k spans [t_k, t_{k+1}])
  Field W1, W2;    // N + 1 nodes, W(0) = 0
};

// Counter-based draws keyed by (seed, path, step, component). W2 uses
// w2_seed when given (so W1 stays identical when W2 is resampled).
PathEnsemble generate_brownian(std::uint64_t seed, int n_paths, const TimeGrid& grid,
                               std::optional<std::uint64_t> w2_seed = std::nullopt);

// Paths [q0, q0 + nq) as a standalone ensemble (same grid and draws).
PathEnsemble slice_ensemble(const PathEnsemble& ens, int q0, int nq);

// Per-path ζ = s(W1_T, W2_T) * direction as an n x P matrix.
Mat sample_terminal(const TerminalSpec& terminal, int n, const PathEnsemble& ens);

// Callback filling d x np drift / diffusion blocks for interval k.
using SdeCoefficients =
    std::function<void(int k, int p0, int np, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift,
                       Eigen::Ref<Mat> diff1, Eigen::Ref<Mat> diff2)>;

struct EulerOptions {
  bool parallel = true;
  // When false the dW2 term is skipped entirely (W1-adapted processes).
  bool uses_w2 = true;
};

// Euler-Maruyama; x0 is d x 1 (shared) or d x P (per path). BLOWUP if any
// entry exceeds 1e12.
Field euler_sde(const SdeCoefficients& coeffs, const Mat& x0, const PathEnsemble& ens, const EulerOptions& opt = {});

// dX̂ = −(AᵀX̂ + HΥX̂ + Hφ̂)dt − [(I+N1Υ)^{-1}C1ᵀX̂ + N1(I+ΥN1)^{-1}η̂1]dW1,
// X̂0 = −(I+GΥ0)^{-1}Gφ̂0. Uses the node table's Υ.
Field simulate_xhat(const ProblemSpec& spec, const std::vector<NodeCoefs>& table, const Field& phi_hat,
                    const Field& eta1_hat, const PathEnsemble& ens);

// dX = −[AᵀX + H(ΥX̂+φ)]dt − [C1ᵀX + N1(η1−η̂1) + N1(I+ΥN1)^{-1}(η̂1−ΥC1ᵀX̂)]dW1
//      − (C2ᵀX + N2η2)dW2, X0 = X̂0.
Field simulate_x(const ProblemSpec& spec, const std::vector<NodeCoefs>& table, const Field& phi, const Field& eta1,
                 const Field& eta2, const Field& eta1_hat, const Field& xhat, const PathEnsemble& ens);

}  // namespace blq
