#pragma once

#include <string>

#include "blq/pathsim.hpp"

namespace blq {

// Constant scalar coefficients with H = N1 = 0 and a lognormal terminal value.
struct BlqaParams {
  double A = 1.0, B = 1.0, C1 = 0.5, C2 = 0.5, R = 1.0, N2 = 1.0, G = 1.0;
  double a = 0.1, b = 0.3, c = 0.2;
  double T = 1.0;
};

ProblemSpec blqa_spec(const BlqaParams& p = {}, int n_steps = 256);
// T = 1, A = 2, B = 3t+2, C1 = t−2, C2 = 0, G = 2, H = e^{−0.05t}, R = 2t+1,
// N1 = t(1−t), N2 = 2, ζ = 1 + sin(W1_T) + cos(2 W2_T).
ProblemSpec blqb_spec(int n_steps = 256);
// "blqa" or "blqb"; INVALID_ARGUMENT otherwise.
ProblemSpec preset_spec(const std::string& name, int n_steps = 256);

// Exact solution of the constant-coefficient scalar problem with H = N1 = 0.
class BlqaClosedForm {
 public:
  explicit BlqaClosedForm(BlqaParams p = {});

  const BlqaParams& params() const { return p_; }
  double k() const { return 2.0 * p_.A - p_.C1 * p_.C1; }

  // B²/(Rk)(1 − e^{k(t−T)}), or B²(T−t)/R when k = 0
  double upsilon(double t) const;
  double phi0() const;
  double x0() const;  // −Gφ0 / (1 + GΥ0)
  double y0() const;  // φ0 / (1 + Υ0G)

  double phi(double t, double w1, double w2) const;
  double phi_hat(double t, double w1) const;
  double eta1(double t, double w1, double w2) const { return p_.b * phi(t, w1, w2); }
  double eta2(double t, double w1, double w2) const { return p_.c * phi(t, w1, w2); }
  double xhat(double t, double w1) const;
  double v(double t, double w1) const;

  double gamma1(double t) const;
  // ∫_0^t e^{−2As}(B²/R + C1²Υ_s) ds by adaptive Gauss-Kronrod quadrature
  double gamma2_integral(double t) const;
  double gamma2(double t) const;
  double sigma(double t) const;

  double phi_second_moment(double t) const;
  // Gφ0²/(2 + 2GΥ0) + ½c² N2 ∫ E[φ_t²] dt
  double cost() const;

  // Per-path Euler quadrature of the variation-of-constants forms.
  Field x(const PathEnsemble& ens) const;
  Field psi_hat(const PathEnsemble& ens) const;

 private:
  BlqaParams p_;
};

}  // namespace blq
