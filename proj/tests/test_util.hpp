#pragma once

#include <cmath>

#include "blq/pathsim.hpp"

namespace blq::testing {

// RMS over nodes [k0, k1) of a − b.
inline double rms_nodes(const Field& a, const Field& b, int k0, int k1) {
  double ss = 0.0;
  for (int k = k0; k < k1; ++k) ss += (a.mat(k) - b.mat(k)).squaredNorm();
  return std::sqrt(ss / (static_cast<double>(k1 - k0) * a.paths() * a.dim()));
}

inline double rms(const Eigen::Ref<const Mat>& m) { return std::sqrt(m.squaredNorm() / static_cast<double>(m.size())); }

// Field of f(t, W1, W2) on every node and path (scalar process).
template <class F>
Field field_of(const PathEnsemble& ens, F f) {
  Field out(ens.grid.N + 1, ens.n_paths, 1);
  for (int k = 0; k <= ens.grid.N; ++k)
    for (int p = 0; p < ens.n_paths; ++p) out.at(k, p) = f(ens.grid.t(k), ens.W1.at(k, p), ens.W2.at(k, p));
  return out;
}

}  // namespace blq::testing
