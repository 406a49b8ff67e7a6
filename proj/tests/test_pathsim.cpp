#include <cmath>

#include "blq/kernels.hpp"
#include "blq/pathsim.hpp"
#include "blq/rng.hpp"
#include "doctest.h"

using namespace blq;

namespace {

// dX = a X dt + s X dW1 (geometric Brownian motion)
SdeCoefficients gbm(double a, double s) {
  return [=](int, int, int, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift, Eigen::Ref<Mat> d1,
             Eigen::Ref<Mat>) {
    drift = a * x;
    d1 = s * x;
  };
}

double mean_at(const Field& f, int k) { return f.node_mean(k)(0); }

}  // namespace

TEST_CASE("draws are addressed by counter and deterministic") {
  CHECK(counter_normal(42, 7, 3, 0) == counter_normal(42, 7, 3, 0));
  CHECK(counter_normal(42, 7, 3, 0) != counter_normal(43, 7, 3, 0));
  CHECK(counter_normal(42, 7, 3, 0) != counter_normal(42, 7, 3, 1));
  const TimeGrid g(1.0, 16);
  const PathEnsemble a = generate_brownian(5, 300, g), b = generate_brownian(5, 300, g);
  for (int k = 0; k <= 16; ++k) CHECK((a.W1.mat(k) - b.W1.mat(k)).norm() == 0.0);
  // path p is the same regardless of ensemble size
  const PathEnsemble c = generate_brownian(5, 1000, g);
  CHECK(c.W2.at(16, 299) == a.W2.at(16, 299));
}

TEST_CASE("Brownian increments have the right moments") {
  const TimeGrid g(1.0, 8);
  const PathEnsemble e = generate_brownian(11, 50000, g);
  double m = 0, v = 0, cross = 0;
  for (int p = 0; p < e.n_paths; ++p) {
    const double w1 = e.W1.at(8, p), w2 = e.W2.at(8, p);
    m += w1;
    v += w1 * w1;
    cross += w1 * w2;
  }
  m /= e.n_paths;
  v /= e.n_paths;
  cross /= e.n_paths;
  const double se = 1.0 / std::sqrt(e.n_paths);
  CHECK(std::abs(m) < 4 * se);
  CHECK(std::abs(v - 1.0) < 4 * std::sqrt(2.0) * se);
  CHECK(std::abs(cross) < 4 * se);
  CHECK(e.W1.at(0, 0) == 0.0);
}

TEST_CASE("resampling W2 keeps W1") {
  const TimeGrid g(1.0, 8);
  const PathEnsemble a = generate_brownian(3, 500, g), b = generate_brownian(3, 500, g, 99);
  CHECK((a.W1.mat(8) - b.W1.mat(8)).norm() == 0.0);
  CHECK((a.W2.mat(8) - b.W2.mat(8)).norm() > 1.0);
}

TEST_CASE("slices reproduce the parent paths") {
  const TimeGrid g(1.0, 4);
  const PathEnsemble a = generate_brownian(3, 500, g);
  const PathEnsemble s = slice_ensemble(a, 100, 50);
  CHECK(s.n_paths == 50);
  CHECK(s.W1.at(4, 0) == a.W1.at(4, 100));
  CHECK(s.dW2.at(3, 49) == a.dW2.at(3, 149));
}

TEST_CASE("results do not depend on the thread count") {
  const TimeGrid g(1.0, 32);
  const int saved = kernels::max_threads();
  kernels::set_threads(1);
  const PathEnsemble e1 = generate_brownian(8, 5000, g);
  const Field x1 = euler_sde(gbm(0.1, 0.3), Mat::Ones(1, 1), e1);
  kernels::set_threads(4);
  const PathEnsemble e4 = generate_brownian(8, 5000, g);
  const Field x4 = euler_sde(gbm(0.1, 0.3), Mat::Ones(1, 1), e4);
  kernels::set_threads(saved);
  CHECK((x1.mat(32) - x4.mat(32)).norm() == 0.0);
  CHECK(x1.node_mean(32)(0) == x4.node_mean(32)(0));
}

TEST_CASE("serial and parallel Euler agree bit for bit") {
  const TimeGrid g(1.0, 16);
  const PathEnsemble e = generate_brownian(8, 6000, g);
  EulerOptions serial;
  serial.parallel = false;
  const Field a = euler_sde(gbm(0.2, 0.4), Mat::Ones(1, 1), e, serial);
  const Field b = euler_sde(gbm(0.2, 0.4), Mat::Ones(1, 1), e);
  CHECK((a.mat(16) - b.mat(16)).norm() == 0.0);
}

TEST_CASE("Euler mean of a linear SDE matches the integrating factor") {
  // E[X_t] = e^{at}; Euler's mean is (1 + a dt)^k exactly in expectation
  const TimeGrid g(1.0, 64);
  const PathEnsemble e = generate_brownian(21, 40000, g);
  const Field x = euler_sde(gbm(0.5, 0.3), Mat::Ones(1, 1), e);
  const double expect = std::pow(1.0 + 0.5 / 64, 64);
  double var = 0.0;
  const double m = mean_at(x, 64);
  for (int p = 0; p < e.n_paths; ++p) var += (x.at(64, p) - m) * (x.at(64, p) - m);
  const double se = std::sqrt(var / e.n_paths / e.n_paths);
  CHECK(std::abs(m - expect) < 4 * se);
  CHECK(std::abs(expect - std::exp(0.5)) < 0.01);
}

TEST_CASE("Euler weak error is first order") {
  // deterministic part: E[X_T] for dX = aX dt + sX dW is (1 + a dt)^N, error vs e^{aT} halves with dt
  const double a = 1.0;
  const double e1 = std::abs(std::pow(1.0 + a / 16, 16) - std::exp(a));
  const double e2 = std::abs(std::pow(1.0 + a / 32, 32) - std::exp(a));
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
  // the simulated means track those values
  for (int N : {16, 32}) {
    const PathEnsemble e = generate_brownian(4, 40000, TimeGrid(1.0, N));
    const Field x = euler_sde(gbm(a, 0.2), Mat::Ones(1, 1), e);
    CHECK(mean_at(x, N) == doctest::Approx(std::pow(1.0 + a / N, N)).epsilon(0.005));
  }
}

TEST_CASE("W1-only processes ignore W2") {
  const TimeGrid g(1.0, 16);
  const PathEnsemble a = generate_brownian(3, 500, g), b = generate_brownian(3, 500, g, 77);
  SdeCoefficients f = [](int, int, int, const Eigen::Ref<const Mat>& x, Eigen::Ref<Mat> drift, Eigen::Ref<Mat> d1,
                         Eigen::Ref<Mat> d2) {
    drift = -x;
    d1.setConstant(0.3);
    d2.setConstant(0.0);
  };
  EulerOptions o;
  o.uses_w2 = false;
  const Field xa = euler_sde(f, Mat::Ones(1, 1), a, o), xb = euler_sde(f, Mat::Ones(1, 1), b, o);
  CHECK((xa.mat(16) - xb.mat(16)).norm() == 0.0);
}

TEST_CASE("blowup is reported") {
  const PathEnsemble e = generate_brownian(3, 200, TimeGrid(1.0, 16));
  bool thrown = false;
  try {
    euler_sde(gbm(2000.0, 0.0), Mat::Ones(1, 1), e);
  } catch (const Error& err) {
    thrown = err.code() == ErrorCode::Blowup;
  }
  CHECK(thrown);
}

TEST_CASE("terminal sampling") {
  const TimeGrid g(1.0, 4);
  const PathEnsemble e = generate_brownian(3, 100, g);
  const TerminalSpec z = TerminalSpec::smooth(1.0, {{TerminalTerm::Func::Sin, 1, 1.0, 1.0}});
  const Mat m = sample_terminal(z, 2, e);
  CHECK(m.rows() == 2);
  CHECK(m(0, 5) == doctest::Approx(1.0 + std::sin(e.W1.at(4, 5))));
  CHECK(m(1, 5) == m(0, 5));
}
