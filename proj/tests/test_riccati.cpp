#include <cmath>
#include <filesystem>
#include <fstream>

#include "blq/presets.hpp"
#include "blq/riccati.hpp"
#include "doctest.h"
#include "goldens.hpp"

using namespace blq;

namespace {

template <class F>
ErrorCode code_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a blq::Error");
  return ErrorCode::Io;
}

double max_err(const MatrixPath& p, double (BlqaClosedForm::*f)(double) const, const BlqaClosedForm& cf) {
  double e = 0.0;
  for (int k = 0; k <= p.grid.N; ++k) e = std::max(e, std::abs(p.at(k)(0, 0) - (cf.*f)(p.grid.t(k))));
  return e;
}

}  // namespace

TEST_CASE("scalar solutions match the closed forms") {
  const BlqaClosedForm cf;
  const RiccatiBundle rb = solve_riccati(blqa_spec(), 2000);
  CHECK(max_err(rb.upsilon, &BlqaClosedForm::upsilon, cf) < 1e-8);
  CHECK(max_err(rb.gamma1, &BlqaClosedForm::gamma1, cf) < 1e-8);
  CHECK(max_err(rb.gamma2, &BlqaClosedForm::gamma2, cf) < 1e-6);
  CHECK(max_err(rb.sigma, &BlqaClosedForm::sigma, cf) < 1e-8);
}

TEST_CASE("closed forms hold through k = 0") {
  BlqaParams p;
  p.A = 0.125;  // 2A − C1² = 0
  const BlqaClosedForm cf(p);
  CHECK(cf.k() == 0.0);
  const MatrixPath ups = solve_upsilon(blqa_spec(p), 400);
  CHECK(max_err(ups, &BlqaClosedForm::upsilon, cf) < 1e-10);
}

TEST_CASE("trivial cases") {
  ProblemSpec spec = blqa_spec();
  spec.B = Coefficient::scalar(0.0);
  spec.C1 = Coefficient::scalar(0.0);
  const RiccatiBundle rb = solve_riccati(spec, 200);
  for (int k = 0; k <= 200; ++k) CHECK(rb.upsilon.at(k)(0, 0) == 0.0);
  // Γ1 = G e^{−2At} with no control and no noise coupling
  CHECK(rb.gamma1.at(200)(0, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  // G = 0 keeps Γ1 = Γ2 = Σ = 0
  ProblemSpec g0 = blqa_spec();
  g0.G = Mat::Zero(1, 1);
  const RiccatiBundle r0 = solve_riccati(g0, 200);
  CHECK(r0.gamma1.at(200).norm() == 0.0);
  CHECK(r0.gamma2.at(200).norm() == 0.0);
  CHECK(r0.sigma.at(200).norm() == 0.0);
}

TEST_CASE("RK4 converges at fourth order") {
  const BlqaClosedForm cf;
  double prev = 0.0;
  for (int N : {8, 16, 32}) {
    const double e = max_err(solve_upsilon(blqa_spec(), N), &BlqaClosedForm::upsilon, cf);
    if (prev > 0.0) {
      CHECK(prev / e > 12.0);
      CHECK(prev / e < 20.0);
    }
    prev = e;
  }
}

TEST_CASE("frozen reference values of the time-varying problem") {
  const RiccatiBundle rb = solve_riccati(blqb_spec(), 2000);
  const int N = rb.upsilon.grid.N;
  CHECK(rb.upsilon.at(0)(0, 0) == doctest::Approx(golden::kBlqbUpsilon0).epsilon(1e-9));
  CHECK(rb.gamma1.at(N)(0, 0) == doctest::Approx(golden::kBlqbGamma1At1).epsilon(1e-9));
  CHECK(rb.gamma2.at(N)(0, 0) == doctest::Approx(golden::kBlqbGamma2At1).epsilon(1e-9));
  CHECK(rb.sigma.at(N)(0, 0) == doctest::Approx(golden::kBlqbSigmaAt1).epsilon(1e-9));
  CHECK(rb.upsilon.at(N)(0, 0) == 0.0);
  CHECK(rb.gamma1.at(0)(0, 0) == 2.0);
  CHECK(rb.gamma2.at(0)(0, 0) == 2.0);
}

TEST_CASE("Sigma equals Gamma2 (I + Upsilon Gamma2)^{-1}") {
  for (const ProblemSpec& spec : {blqa_spec(), blqb_spec()}) {
    const RiccatiBundle rb = solve_riccati(spec, 2000);
    double e = 0.0;
    for (int k = 0; k <= rb.sigma.grid.N; ++k) {
      const Mat& g2 = rb.gamma2.at(k);
      const Mat rel = g2 * (Mat::Identity(1, 1) + rb.upsilon.at(k) * g2).inverse();
      e = std::max(e, (rb.sigma.at(k) - rel).cwiseAbs().maxCoeff());
    }
    CHECK(e < 1e-8);
  }
}

TEST_CASE("matrix solutions stay symmetric and nonnegative") {
  ProblemSpec spec;
  spec.n = 2;
  spec.m = 1;
  spec.grid = TimeGrid(1.0, 64);
  Mat A(2, 2);
  A << 0.5, 0.2, -0.1, 0.3;
  Mat B(2, 1);
  B << 1.0, 0.5;
  spec.A = Coefficient::constant(A);
  spec.B = Coefficient::constant(B);
  spec.C1 = Coefficient::constant(0.3 * Mat::Identity(2, 2));
  spec.C2 = Coefficient::constant(Mat::Zero(2, 2));
  spec.H = Coefficient::constant(Mat::Identity(2, 2));
  spec.N1 = Coefficient::constant(0.5 * Mat::Identity(2, 2));
  spec.N2 = Coefficient::constant(Mat::Identity(2, 2));
  spec.R = Coefficient::scalar(1.0);
  spec.G = Mat::Identity(2, 2);
  const RiccatiBundle rb = solve_riccati(spec, 500);
  for (int k = 0; k <= 500; k += 50) {
    for (const MatrixPath* p : {&rb.upsilon, &rb.gamma1, &rb.gamma2, &rb.sigma})
      CHECK(symmetry_defect(p->at(k)) < 1e-12);
    CHECK(min_eigenvalue_sym(rb.upsilon.at(k)) > -1e-12);
    CHECK(min_eigenvalue_sym(rb.gamma1.at(k)) > -1e-12);
  }
  CHECK(rb.min_smin_upsilon_n1 >= 1.0 - 1e-12);
}

TEST_CASE("singular factor is detected") {
  ProblemSpec spec = blqa_spec();
  spec.A = Coefficient::scalar(0.0);
  spec.C1 = Coefficient::scalar(1.0);
  spec.B = Coefficient::scalar(2.0);
  spec.N1 = Coefficient::scalar(-2.0);
  CHECK(code_of([&] { solve_riccati(spec, 400); }) == ErrorCode::SingularFactor);
}

TEST_CASE("blowup is detected") {
  ProblemSpec spec = blqa_spec();
  spec.H = Coefficient::scalar(-100.0);
  CHECK(code_of([&] { solve_riccati(spec, 400); }) == ErrorCode::Blowup);
}

TEST_CASE("interpolation and CSV output") {
  const MatrixPath ups = solve_upsilon(blqa_spec(), 10);
  const double mid = 0.5 * (ups.at(3)(0, 0) + ups.at(4)(0, 0));
  CHECK(ups.interpolate(0.35)(0, 0) == doctest::Approx(mid));
  CHECK(ups.interpolate(-1.0)(0, 0) == ups.at(0)(0, 0));
  const std::string path = "test_riccati_out.csv";
  write_matrix_path_csv(path, ups, "upsilon");
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,upsilon_0_0");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 11);
  std::filesystem::remove(path);
}
