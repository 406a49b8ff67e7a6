#pragma once

#include <Eigen/Dense>

#include <functional>

namespace blq::kernels {

// Fixed path-block size: reductions sum block partials in block order, so
// results do not depend on the number of threads.
inline constexpr int kBlock = 2048;

// Worker count used by the parallel kernels (1 if OpenMP is unavailable).
int max_threads();
void set_threads(int n);

// Runs fn(p0, np) over consecutive blocks covering [0, n_paths). Exceptions
// thrown inside a block are rethrown on the calling thread.
void for_blocks(int n_paths, bool parallel, const std::function<void(int, int)>& fn);

// G = D D^T for a p x P design matrix.
Eigen::MatrixXd gram_serial(const Eigen::Ref<const Eigen::MatrixXd>& D);
Eigen::MatrixXd gram_parallel(const Eigen::Ref<const Eigen::MatrixXd>& D);

// D Y^T (p x d) for a d x P response.
Eigen::MatrixXd cross_serial(const Eigen::Ref<const Eigen::MatrixXd>& D, const Eigen::Ref<const Eigen::MatrixXd>& Y);
Eigen::MatrixXd cross_parallel(const Eigen::Ref<const Eigen::MatrixXd>& D,
                               const Eigen::Ref<const Eigen::MatrixXd>& Y);

// x_{k+1} = x + drift dt + diff1 .* dW1 + diff2 .* dW2 (column-wise increments),
// in place on x. Serial and parallel versions are bit-identical.
// coeffs(p0, np, x_block, drift, diff1, diff2) fills d x np blocks (pre-zeroed).
using SdeBlockFn =
    std::function<void(int p0, int np, const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::Ref<Eigen::MatrixXd> drift,
                       Eigen::Ref<Eigen::MatrixXd> diff1, Eigen::Ref<Eigen::MatrixXd> diff2)>;
void euler_step_serial(Eigen::Ref<Eigen::MatrixXd> x_next, const Eigen::Ref<const Eigen::MatrixXd>& x, double dt,
                       const double* dW1, const double* dW2, const SdeBlockFn& coeffs);
void euler_step_parallel(Eigen::Ref<Eigen::MatrixXd> x_next, const Eigen::Ref<const Eigen::MatrixXd>& x, double dt,
                         const double* dW1, const double* dW2, const SdeBlockFn& coeffs);

}  // namespace blq::kernels
