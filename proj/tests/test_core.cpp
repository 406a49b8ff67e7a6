#include <cmath>

#include "blq/core.hpp"
#include "blq/presets.hpp"
#include "doctest.h"

using namespace blq;

namespace {

Mat s(double x) { return Mat::Constant(1, 1, x); }

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

}  // namespace

TEST_CASE("time grid nodes and step") {
  const TimeGrid g(2.0, 8);
  CHECK(g.dt() == doctest::Approx(0.25));
  CHECK(g.t(0) == 0.0);
  CHECK(g.t(8) == 2.0);
  CHECK(g.nodes().size() == 9);
  CHECK(TimeGrid::with_step(1.0, 1.0 / 256).N == 256);
  CHECK(code_of([] { TimeGrid::with_step(1.0, 0.3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("coefficient registry evaluates polynomial and exponential forms") {
  const Coefficient p = Coefficient::polynomial({s(2.0), s(3.0), s(-1.0)});
  CHECK(p.eval(0.5, 1.0)(0, 0) == doctest::Approx(2.0 + 1.5 - 0.25));
  const Coefficient e = Coefficient::exp_scalar(-0.05, s(1.0));
  CHECK(e.eval(1.0, 1.0)(0, 0) == doctest::Approx(std::exp(-0.05)));
  CHECK(Coefficient::scalar(0.0).is_zero());
  CHECK_FALSE(p.is_zero());
  CHECK(code_of([&] { p.eval(1.5, 1.0); }) == ErrorCode::OutOfRange);
  // tiny overshoot is clamped
  CHECK(p.eval(1.0 + 1e-14, 1.0)(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("presets validate") {
  CHECK(validate_spec(blqa_spec()).accepted);
  CHECK(validate_spec(blqb_spec()).accepted);
}

TEST_CASE("validation rejects indefinite and asymmetric weights") {
  ProblemSpec spec = blqa_spec();
  spec.R = Coefficient::scalar(0.0);
  const ValidationReport r = validate_spec(spec);
  CHECK_FALSE(r.accepted);
  CHECK(r.failure == ErrorCode::RejectIndefinite);
  CHECK(code_of([&] { require_valid(spec); }) == ErrorCode::RejectIndefinite);

  ProblemSpec neg = blqa_spec();
  neg.H = Coefficient::scalar(-1.0);
  CHECK(validate_spec(neg).failure == ErrorCode::RejectIndefinite);

  ProblemSpec asym = blqa_spec();
  asym.n = 2;
  asym.m = 2;
  asym.A = Coefficient::constant(Mat::Identity(2, 2));
  asym.B = Coefficient::constant(Mat::Identity(2, 2));
  asym.C1 = Coefficient::constant(Mat::Zero(2, 2));
  asym.C2 = Coefficient::constant(Mat::Zero(2, 2));
  asym.H = Coefficient::constant(Mat::Zero(2, 2));
  asym.N1 = Coefficient::constant(Mat::Zero(2, 2));
  asym.N2 = Coefficient::constant(Mat::Zero(2, 2));
  asym.G = Mat::Identity(2, 2);
  Mat R = Mat::Identity(2, 2);
  R(0, 1) = 0.5;
  asym.R = Coefficient::constant(R);
  CHECK(validate_spec(asym).failure == ErrorCode::RejectAsymmetric);
}

TEST_CASE("validation rejects structural errors") {
  ProblemSpec spec = blqa_spec();
  spec.B = Coefficient::constant(Mat::Ones(2, 1));
  CHECK(code_of([&] { validate_spec(spec); }) == ErrorCode::InvalidArgument);
  ProblemSpec nan = blqa_spec();
  nan.A = Coefficient::scalar(std::nan(""));
  CHECK(code_of([&] { validate_spec(nan); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("smooth terminal moments") {
  const TerminalSpec z = blqb_spec().terminal;
  // ζ = 1 + sin(W1) + cos(2 W2) at T = 1
  CHECK(z.mean(1.0) == doctest::Approx(1.0 + std::exp(-2.0)));
  const double second = 1.0 + (1.0 - std::exp(-2.0)) / 2.0 + (1.0 + std::exp(-8.0)) / 2.0 + 2.0 * std::exp(-2.0);
  CHECK(z.second_moment(1.0) == doctest::Approx(second).epsilon(1e-12));
  CHECK(z.conditional_mean_w1(0.3, 1.0) == doctest::Approx(1.0 + std::sin(0.3) + std::exp(-2.0)));
}

TEST_CASE("lognormal terminal moments") {
  const TerminalSpec z = TerminalSpec::lognormal(0.1, 0.3, 0.2);
  CHECK(z.mean(1.0) == doctest::Approx(std::exp(0.1)));
  CHECK(z.second_moment(1.0) == doctest::Approx(std::exp(0.2 + 0.09 + 0.04)));
}

TEST_CASE("matrix helpers") {
  Mat m(2, 2);
  m << 2, 1, 1, 2;
  CHECK(min_eigenvalue_sym(m) == doctest::Approx(1.0));
  CHECK(symmetry_defect(m) == 0.0);
  m(0, 1) = 1.5;
  CHECK(symmetry_defect(m) > 0.0);
  CHECK(min_singular_value(Mat::Identity(3, 3)) == doctest::Approx(1.0));
}

TEST_CASE("error codes map to exit statuses") {
  CHECK(std::string(code_name(ErrorCode::RejectIndefinite)) == "REJECT_INDEFINITE");
  CHECK(exit_status(ErrorCode::RejectIndefinite) == 2);
  CHECK(exit_status(ErrorCode::InvalidArgument) == 2);
  CHECK(exit_status(ErrorCode::Blowup) == 3);
  CHECK(exit_status(ErrorCode::Io) == 4);
}
