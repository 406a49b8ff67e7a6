#include "blq/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>

namespace blq {

const GaussHermite& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Golub-Welsch on the Jacobi matrix of He_k: off-diagonal sqrt(k)
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    gh.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    gh.weights[i] = v * v;
  }
  return cache.emplace(n, std::move(gh)).first->second;
}

double int_exp(double r, double t) {
  if (std::abs(r * t) < 1e-300) return t;
  return std::expm1(r * t) / r;
}

MeanStderr mean_stderr(const std::vector<double>& x) {
  MeanStderr out;
  const double n = static_cast<double>(x.size());
  if (x.empty()) return out;
  double s = 0.0;
  for (double v : x) s += v;
  out.mean = s / n;
  if (x.size() < 2) return out;
  double ss = 0.0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

}  // namespace blq
