// Serial reference vs OpenMP kernels on path-sized workloads.
#include <benchmark/benchmark.h>

#include "blq/kernels.hpp"
#include "blq/rng.hpp"

namespace {

using Eigen::MatrixXd;

MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = blq::counter_normal(seed, j, i, 0);
  return m;
}

void BM_GramSerial(benchmark::State& st) {
  const MatrixXd D = random_matrix(10, static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(blq::kernels::gram_serial(D));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_GramParallel(benchmark::State& st) {
  const MatrixXd D = random_matrix(10, static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(blq::kernels::gram_parallel(D));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_CrossSerial(benchmark::State& st) {
  const MatrixXd D = random_matrix(10, static_cast<int>(st.range(0)), 1);
  const MatrixXd Y = random_matrix(3, static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(blq::kernels::cross_serial(D, Y));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_CrossParallel(benchmark::State& st) {
  const MatrixXd D = random_matrix(10, static_cast<int>(st.range(0)), 1);
  const MatrixXd Y = random_matrix(3, static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(blq::kernels::cross_parallel(D, Y));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

const blq::kernels::SdeBlockFn kLinearSde = [](int, int, const Eigen::Ref<const MatrixXd>& x,
                                               Eigen::Ref<MatrixXd> drift, Eigen::Ref<MatrixXd> diff1,
                                               Eigen::Ref<MatrixXd> diff2) {
  drift = -x;
  diff1 = 0.5 * x;
  diff2 = (0.2 * x.array().sin()).matrix();
};

template <bool Parallel>
void BM_EulerStep(benchmark::State& st) {
  const int P = static_cast<int>(st.range(0));
  const MatrixXd x = random_matrix(4, P, 3);
  const MatrixXd w = random_matrix(2, P, 4) * 0.05;
  const Eigen::VectorXd w1 = w.row(0).transpose(), w2 = w.row(1).transpose();
  MatrixXd next(4, P);
  for (auto _ : st) {
    if constexpr (Parallel)
      blq::kernels::euler_step_parallel(next, x, 1.0 / 256, w1.data(), w2.data(), kLinearSde);
    else
      blq::kernels::euler_step_serial(next, x, 1.0 / 256, w1.data(), w2.data(), kLinearSde);
    benchmark::DoNotOptimize(next.data());
  }
  st.SetItemsProcessed(st.iterations() * P);
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);
BENCHMARK(BM_GramParallel)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);
BENCHMARK(BM_CrossSerial)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);
BENCHMARK(BM_CrossParallel)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);
BENCHMARK(BM_EulerStep<false>)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);
BENCHMARK(BM_EulerStep<true>)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);

BENCHMARK_MAIN();
