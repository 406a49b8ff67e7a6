#pragma once

#include <vector>

namespace blq {

// Probabilists' Gauss-Hermite rule: sum_i w_i f(x_i) ≈ E[f(X)], X ~ N(0,1).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussHermite& gauss_hermite(int n);

// expm1(r t) / r, with the r = 0 limit t
double int_exp(double r, double t);

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};
MeanStderr mean_stderr(const std::vector<double>& x);

}  // namespace blq
