#include <cmath>

#include "blq/numerics.hpp"
#include "blq/presets.hpp"
#include "doctest.h"
#include "goldens.hpp"

using namespace blq;

TEST_CASE("closed forms are continuous through k = 0") {
  BlqaParams p;
  p.A = 0.125;
  const BlqaClosedForm at(p);
  BlqaParams q = p;
  q.A = 0.125 + 1e-9;
  const BlqaClosedForm near(q);
  CHECK(at.upsilon(0.0) == doctest::Approx(p.B * p.B / p.R * p.T));
  CHECK(near.upsilon(0.0) == doctest::Approx(at.upsilon(0.0)).epsilon(1e-8));
  CHECK(int_exp(0.0, 0.7) == 0.7);
  CHECK(int_exp(1e-12, 0.7) == doctest::Approx(0.7));
}

TEST_CASE("boundary values") {
  const BlqaClosedForm cf;
  const auto& p = cf.params();
  CHECK(cf.upsilon(p.T) == 0.0);
  CHECK(cf.gamma1(0.0) == p.G);
  CHECK(cf.gamma2(0.0) == p.G);
  CHECK(cf.sigma(0.0) == doctest::Approx(p.G / (1.0 + p.G * cf.upsilon(0.0))));
  // terminal value of φ is the lognormal terminal
  const double w1 = 0.4, w2 = -0.3;
  CHECK(cf.phi(p.T, w1, w2) ==
        doctest::Approx(std::exp((p.a - 0.5 * p.b * p.b - 0.5 * p.c * p.c) * p.T + p.b * w1 + p.c * w2)));
  CHECK(cf.x0() == doctest::Approx(-p.G * cf.y0()));
  CHECK(cf.v(0.0, 0.0) == doctest::Approx(-p.B / p.R * cf.x0()));
}

TEST_CASE("hat processes are conditional means") {
  const BlqaClosedForm cf;
  const auto& gh = gauss_hermite(20);
  double m = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) m += gh.weights[i] * cf.phi(0.6, 0.2, std::sqrt(0.6) * gh.nodes[i]);
  CHECK(m == doctest::Approx(cf.phi_hat(0.6, 0.2)).epsilon(1e-12));
  double m2 = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i)
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
      const double f = cf.phi(0.6, std::sqrt(0.6) * gh.nodes[i], std::sqrt(0.6) * gh.nodes[j]);
      m2 += gh.weights[i] * gh.weights[j] * f * f;
    }
  CHECK(m2 == doctest::Approx(cf.phi_second_moment(0.6)).epsilon(1e-10));
}

TEST_CASE("Gamma2 quadrature matches the Riccati identity") {
  // Γ2 = Σ (I − ΥΣ)^{-1} in the scalar case
  const BlqaClosedForm cf;
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    const double s = cf.sigma(t), u = cf.upsilon(t);
    CHECK(cf.gamma2(t) == doctest::Approx(s / (1.0 - u * s)).epsilon(1e-10));
  }
}

TEST_CASE("zero terminal weight") {
  BlqaParams p;
  p.G = 0.0;
  const BlqaClosedForm cf(p);
  CHECK(cf.x0() == 0.0);
  CHECK(cf.gamma1(0.5) == 0.0);
  const double nu2 = 2.0 * (p.A + p.b * p.C1 + p.c * p.C2 - 0.5 * p.b * p.b - 0.5 * p.c * p.c) + 2 * p.b * p.b +
                     2 * p.c * p.c;
  CHECK(cf.cost() == doctest::Approx(0.5 * p.c * p.c * p.N2 * cf.phi0() * cf.phi0() * int_exp(nu2, p.T)));
}

TEST_CASE("frozen optimal cost") { CHECK(BlqaClosedForm().cost() == doctest::Approx(golden::kBlqaCost).epsilon(1e-12)); }

TEST_CASE("time-varying preset coefficients") {
  const ProblemSpec s = blqb_spec();
  CHECK(s.name == "blqb");
  CHECK(s.B.eval(0.5, 1.0)(0, 0) == doctest::Approx(3.5));
  CHECK(s.C1.eval(0.5, 1.0)(0, 0) == doctest::Approx(-1.5));
  CHECK(s.R.eval(1.0, 1.0)(0, 0) == doctest::Approx(3.0));
  CHECK(s.N1.eval(0.5, 1.0)(0, 0) == doctest::Approx(0.25));
  CHECK(s.H.eval(1.0, 1.0)(0, 0) == doctest::Approx(std::exp(-0.05)));
  CHECK(s.C2.is_zero());
  CHECK(s.terminal.scalar(0.3, 0.2, 1.0) == doctest::Approx(1.0 + std::sin(0.3) + std::cos(0.4)));
}

TEST_CASE("preset lookup") {
  CHECK(preset_spec("blqa").name == "blqa");
  CHECK(preset_spec("blqb", 64).grid.N == 64);
  bool thrown = false;
  try {
    preset_spec("nope");
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::InvalidArgument;
  }
  CHECK(thrown);
}
