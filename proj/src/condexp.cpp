#include "blq/condexp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace blq {

namespace {

const char* kModule = "condexp";
constexpr int kRefineSteps = 2;

// He_0..He_deg at x, written to out[0..deg]
void hermite(double x, int deg, double* out) {
  out[0] = 1.0;
  if (deg >= 1) out[1] = x;
  for (int j = 1; j < deg; ++j) out[j + 1] = x * out[j] - j * out[j - 1];
}

}  // namespace

int basis_size(const RegressionBasis& basis, Filtration filtration) {
  const int d = basis.degree;
  int extra = 0;
  for (const Field* f : basis.extra_features) extra += f->dim();
  if (filtration == Filtration::Observable) return d + 1 + extra;
  return (d + 1) * (d + 2) / 2 + extra;
}

Projector::Projector(const PathEnsemble& ens, int k, const RegressionBasis& basis, Filtration filtration, int col0,
                     int ncols)
    : col0_(col0) {
  if (ncols < 0) ncols = ens.n_paths - col0;
  if (basis.degree < 0) fail(kModule, ErrorCode::InvalidArgument, "basis degree must be nonnegative");
  const double t = ens.grid.t(k);
  const int deg = basis.degree;
  int extra = 0;
  for (const Field* f : basis.extra_features) extra += f->dim();
  const int p = k == 0 ? 1 : basis_size(basis, filtration);
  if (ncols < 10 * p) {
    std::ostringstream os;
    os << "regression needs at least 10 paths per basis function (" << ncols << " paths, " << p << " functions)";
    fail(kModule, ErrorCode::InvalidArgument, os.str());
  }
  D_.resize(p, ncols);
  if (k == 0) {
    D_.setOnes();
  } else {
    const double inv_sd = 1.0 / std::sqrt(t);
    const double* w1 = ens.W1.node(k) + col0;
    const double* w2 = ens.W2.node(k) + col0;
    kernels::for_blocks(ncols, true, [&](int p0, int np) {
      std::vector<double> h1(deg + 1), h2(deg + 1);
      for (int q = p0; q < p0 + np; ++q) {
        hermite(w1[q] * inv_sd, deg, h1.data());
        int r = 0;
        if (filtration == Filtration::Observable) {
          for (int i = 0; i <= deg; ++i) D_(r++, q) = h1[i];
        } else {
          hermite(w2[q] * inv_sd, deg, h2.data());
          for (int i = 0; i <= deg; ++i)
            for (int j = 0; j + i <= deg; ++j) D_(r++, q) = h1[i] * h2[j];
        }
      }
    });
    // standardized extra features
    int r = p - extra;
    for (const Field* f : basis.extra_features) {
      const auto m = f->mat(k).middleCols(col0, ncols);
      for (int i = 0; i < f->dim(); ++i, ++r) {
        const double mu = m.row(i).mean();
        const double sd = std::sqrt((m.row(i).array() - mu).square().mean());
        const double s = sd > 0.0 ? 1.0 / sd : 0.0;
        D_.row(r) = (m.row(i).array() - mu) * s;
      }
    }
  }
  gram_ = kernels::gram_parallel(D_) / static_cast<double>(ncols);
  Mat G = gram_;
  for (int i = 1; i < p; ++i) G(i, i) += basis.ridge;
  Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  condition_ = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxCondition)) {
    std::ostringstream os;
    os << "normal equations ill-conditioned at t = " << t << " (condition " << condition_ << ")";
    fail(kModule, ErrorCode::RankDeficient, os.str());
  }
  llt_.compute(G);
}

Mat Projector::coefficients(const Eigen::Ref<const Mat>& Y) const {
  if (Y.cols() != D_.cols()) fail(kModule, ErrorCode::InvalidArgument, "response has wrong number of paths");
  const Mat b = kernels::cross_parallel(D_, Y) / static_cast<double>(D_.cols());
  // ridged solve, then refinement steps toward the plain least-squares fit
  // (keeps projections idempotent; null directions of the Gram stay at zero)
  Mat c = llt_.solve(b);
  for (int it = 0; it < kRefineSteps; ++it) c += llt_.solve(b - gram_ * c);
  return c;
}

Mat Projector::project(const Eigen::Ref<const Mat>& Y) const {
  const Mat c = coefficients(Y);
  Mat out(Y.rows(), Y.cols());
  const Mat ct = c.transpose();
  kernels::for_blocks(static_cast<int>(Y.cols()), true,
                      [&](int p0, int np) { out.middleCols(p0, np).noalias() = ct * D_.middleCols(p0, np); });
  return out;
}

Mat condexp_regress(const Eigen::Ref<const Mat>& values, int k, const RegressionBasis& basis, const PathEnsemble& ens,
                    Filtration filtration) {
  return Projector(ens, k, basis, filtration).project(values);
}

double tower_check(const Eigen::Ref<const Mat>& values, int k, const RegressionBasis& basis, const PathEnsemble& ens,
                   Filtration filtration) {
  const Mat proj = condexp_regress(values, k, basis, ens, filtration);
  return (proj.rowwise().mean() - values.rowwise().mean()).cwiseAbs().maxCoeff();
}

Field condexp_field(const Field& values, const RegressionBasis& basis, const PathEnsemble& ens, Filtration filtration) {
  Field out(values.nodes(), values.paths(), values.dim());
  for (int k = 0; k < values.nodes(); ++k) out.mat(k) = condexp_regress(values.mat(k), k, basis, ens, filtration);
  return out;
}

}  // namespace blq
