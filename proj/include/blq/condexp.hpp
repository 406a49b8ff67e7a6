#pragma once

#include <vector>

#include "blq/pathsim.hpp"

namespace blq {

enum class Filtration {
  Observable,  // functions of W1_t (plus optional W1-adapted features)
  Full,        // functions of (W1_t, W2_t)
};

struct RegressionBasis {
  int degree = 3;
  double ridge = 1e-8;
  // Extra W1-adapted processes used as standardized linear features
  // (one feature per component).
  std::vector<const Field*> extra_features;
};

// Hermite polynomials He_0..He_deg in the standardized state W/sqrt(t); at
// t = 0 only the constant. Ridge is added to the normalized Gram matrix
// except for the constant, so projections preserve the sample mean exactly;
// the ridged solve is followed by iterative refinement against the plain
// normal equations, so projecting twice equals projecting once.
class Projector {
 public:
  Projector(const PathEnsemble& ens, int k, const RegressionBasis& basis, Filtration filtration, int col0 = 0,
            int ncols = -1);

  int size() const { return static_cast<int>(D_.rows()); }
  int col0() const { return col0_; }
  int ncols() const { return static_cast<int>(D_.cols()); }
  double condition() const { return condition_; }
  const Mat& design() const { return D_; }

  // Basis coefficients (p x d) of the least-squares fit of Y (d x ncols).
  Mat coefficients(const Eigen::Ref<const Mat>& Y) const;
  // Fitted values (d x ncols).
  Mat project(const Eigen::Ref<const Mat>& Y) const;

 private:
  int col0_ = 0;
  Mat D_;
  Mat gram_;  // normalized Gram matrix without ridge
  Eigen::LLT<Mat> llt_;
  double condition_ = 1.0;
};

// Number of basis functions for a filtration at a node with t > 0.
int basis_size(const RegressionBasis& basis, Filtration filtration);

// Projection of values (d x P, node k) onto the basis at node k.
Mat condexp_regress(const Eigen::Ref<const Mat>& values, int k, const RegressionBasis& basis, const PathEnsemble& ens,
                    Filtration filtration = Filtration::Observable);

// |mean(projection) - mean(values)| (max over components).
double tower_check(const Eigen::Ref<const Mat>& values, int k, const RegressionBasis& basis, const PathEnsemble& ens,
                   Filtration filtration = Filtration::Observable);

// Whole-field projection (every node).
Field condexp_field(const Field& values, const RegressionBasis& basis, const PathEnsemble& ens,
                    Filtration filtration = Filtration::Observable);

}  // namespace blq
