#include "blq/node_table.hpp"

#include <sstream>

namespace blq {

namespace {

Mat checked_inverse(const Mat& F, const char* what, double t) {
  const double smin = min_singular_value(F);
  if (!(smin >= kMinSingular)) {
    std::ostringstream os;
    os << what << " is singular at t = " << t << " (smallest singular value " << smin << ")";
    fail("riccati", ErrorCode::SingularFactor, os.str());
  }
  return F.partialPivLu().inverse();
}

}  // namespace

NodeCoefs coefs_at(const ProblemSpec& spec, double t, const MatrixPath* upsilon, const RiccatiBundle* riccati) {
  const int n = spec.n;
  const CoefValues c = eval_all(spec, t);
  NodeCoefs out;
  out.t = t;
  out.A = c.A;
  out.B = c.B;
  out.C1 = c.C1;
  out.C2 = c.C2;
  out.H = c.H;
  out.R = c.R;
  out.N1 = c.N1;
  out.N2 = c.N2;
  out.Rinv = c.R.ldlt().solve(Mat::Identity(spec.m, spec.m));
  out.BRB = c.B * out.Rinv * c.B.transpose();
  const Mat I = Mat::Identity(n, n);
  if (riccati) upsilon = &riccati->upsilon;
  out.U = upsilon ? upsilon->interpolate(t) : Mat::Zero(n, n);
  if (riccati) {
    out.G1 = riccati->gamma1.interpolate(t);
    out.G2 = riccati->gamma2.interpolate(t);
    out.Sig = riccati->sigma.interpolate(t);
    out.K2 = checked_inverse(I + out.G2 * out.U, "I + Gamma2 Upsilon", t);
  } else {
    out.G1 = out.G2 = out.Sig = Mat::Zero(n, n);
    out.K2 = I;
  }
  out.K1 = checked_inverse(I + out.U * out.N1, "I + Upsilon N1", t);
  out.K1t = checked_inverse(I + out.N1 * out.U, "I + N1 Upsilon", t);
  return out;
}

std::vector<NodeCoefs> node_table(const ProblemSpec& spec, const TimeGrid& grid, const MatrixPath* upsilon,
                                  const RiccatiBundle* riccati) {
  std::vector<NodeCoefs> out;
  out.reserve(grid.N + 1);
  for (int k = 0; k <= grid.N; ++k) out.push_back(coefs_at(spec, grid.t(k), upsilon, riccati));
  return out;
}

}  // namespace blq
