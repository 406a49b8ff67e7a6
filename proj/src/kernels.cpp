#include "blq/kernels.hpp"

#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace blq::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

void for_blocks(int n_paths, bool parallel, const std::function<void(int, int)>& fn) {
  const int n_blocks = (n_paths + kBlock - 1) / kBlock;
  if (!parallel || n_blocks < 2) {
    for (int b = 0; b < n_blocks; ++b) fn(b * kBlock, std::min(kBlock, n_paths - b * kBlock));
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n_blocks; ++b) {
    try {
      fn(b * kBlock, std::min(kBlock, n_paths - b * kBlock));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

Eigen::MatrixXd gram_serial(const Eigen::Ref<const Eigen::MatrixXd>& D) { return D * D.transpose(); }

Eigen::MatrixXd gram_parallel(const Eigen::Ref<const Eigen::MatrixXd>& D) {
  const int P = static_cast<int>(D.cols());
  const int n_blocks = (P + kBlock - 1) / kBlock;
  std::vector<Eigen::MatrixXd> part(n_blocks);
  for_blocks(P, true, [&](int p0, int np) {
    const auto blk = D.middleCols(p0, np);
    part[p0 / kBlock] = blk * blk.transpose();
  });
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(D.rows(), D.rows());
  for (const auto& m : part) G += m;
  return G;
}

Eigen::MatrixXd cross_serial(const Eigen::Ref<const Eigen::MatrixXd>& D, const Eigen::Ref<const Eigen::MatrixXd>& Y) {
  return D * Y.transpose();
}

Eigen::MatrixXd cross_parallel(const Eigen::Ref<const Eigen::MatrixXd>& D,
                               const Eigen::Ref<const Eigen::MatrixXd>& Y) {
  const int P = static_cast<int>(D.cols());
  const int n_blocks = (P + kBlock - 1) / kBlock;
  std::vector<Eigen::MatrixXd> part(n_blocks);
  for_blocks(P, true, [&](int p0, int np) {
    part[p0 / kBlock] = D.middleCols(p0, np) * Y.middleCols(p0, np).transpose();
  });
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(D.rows(), Y.rows());
  for (const auto& m : part) C += m;
  return C;
}

namespace {

void euler_block(Eigen::Ref<Eigen::MatrixXd> x_next, const Eigen::Ref<const Eigen::MatrixXd>& x, double dt,
                 const double* dW1, const double* dW2, const SdeBlockFn& coeffs, int p0, int np) {
  const int d = static_cast<int>(x.rows());
  Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(d, np);
  Eigen::MatrixXd diff1 = Eigen::MatrixXd::Zero(d, np);
  Eigen::MatrixXd diff2 = Eigen::MatrixXd::Zero(d, np);
  const auto xb = x.middleCols(p0, np);
  coeffs(p0, np, xb, drift, diff1, diff2);
  Eigen::Map<const Eigen::RowVectorXd> w1(dW1 + p0, np);
  Eigen::Map<const Eigen::RowVectorXd> w2(dW2 + p0, np);
  x_next.middleCols(p0, np) =
      xb + dt * drift + (diff1.array().rowwise() * w1.array()).matrix() + (diff2.array().rowwise() * w2.array()).matrix();
}

}  // namespace

void euler_step_serial(Eigen::Ref<Eigen::MatrixXd> x_next, const Eigen::Ref<const Eigen::MatrixXd>& x, double dt,
                       const double* dW1, const double* dW2, const SdeBlockFn& coeffs) {
  // one pass over all paths; per-column arithmetic is identical to the blocked form
  euler_block(x_next, x, dt, dW1, dW2, coeffs, 0, static_cast<int>(x.cols()));
}

void euler_step_parallel(Eigen::Ref<Eigen::MatrixXd> x_next, const Eigen::Ref<const Eigen::MatrixXd>& x, double dt,
                         const double* dW1, const double* dW2, const SdeBlockFn& coeffs) {
  for_blocks(static_cast<int>(x.cols()), true,
             [&](int p0, int np) { euler_block(x_next, x, dt, dW1, dW2, coeffs, p0, np); });
}

}  // namespace blq::kernels
