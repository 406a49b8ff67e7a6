#pragma once

#include <vector>

#include "blq/core.hpp"
#include "blq/riccati.hpp"

namespace blq {

// Coefficients, Riccati values and derived factors at one time.
struct NodeCoefs {
  double t = 0.0;
  Mat A, B, C1, C2, H, R, Rinv, N1, N2;
  Mat U, G1, G2, Sig;  // Υ, Γ1, Γ2, Σ (zero when not supplied)
  Mat K1;              // (I + Υ N1)^{-1}
  Mat K1t;             // (I + N1 Υ)^{-1}
  Mat K2;              // (I + Γ2 Υ)^{-1} (identity when Γ2 not supplied)
  Mat BRB;             // B R^{-1} B^T
};

// Riccati paths are linearly interpolated from their ODE grid to t.
NodeCoefs coefs_at(const ProblemSpec& spec, double t, const MatrixPath* upsilon, const RiccatiBundle* riccati);

std::vector<NodeCoefs> node_table(const ProblemSpec& spec, const TimeGrid& grid, const MatrixPath* upsilon,
                                  const RiccatiBundle* riccati);

}  // namespace blq
