#include "blq/presets.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

#include "blq/numerics.hpp"

namespace blq {

namespace {

Mat s(double x) { return Mat::Constant(1, 1, x); }

double gk(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-12);
}

}  // namespace

ProblemSpec blqa_spec(const BlqaParams& p, int n_steps) {
  ProblemSpec spec;
  spec.name = "blqa";
  spec.n = spec.m = 1;
  spec.grid = TimeGrid(p.T, n_steps);
  spec.A = Coefficient::scalar(p.A);
  spec.B = Coefficient::scalar(p.B);
  spec.C1 = Coefficient::scalar(p.C1);
  spec.C2 = Coefficient::scalar(p.C2);
  spec.H = Coefficient::scalar(0.0);
  spec.R = Coefficient::scalar(p.R);
  spec.N1 = Coefficient::scalar(0.0);
  spec.N2 = Coefficient::scalar(p.N2);
  spec.G = s(p.G);
  spec.terminal = TerminalSpec::lognormal(p.a, p.b, p.c);
  return spec;
}

ProblemSpec blqb_spec(int n_steps) {
  ProblemSpec spec;
  spec.name = "blqb";
  spec.n = spec.m = 1;
  spec.grid = TimeGrid(1.0, n_steps);
  spec.A = Coefficient::scalar(2.0);
  spec.B = Coefficient::polynomial({s(2.0), s(3.0)});
  spec.C1 = Coefficient::polynomial({s(-2.0), s(1.0)});
  spec.C2 = Coefficient::scalar(0.0);
  spec.H = Coefficient::exp_scalar(-0.05, s(1.0));
  spec.R = Coefficient::polynomial({s(1.0), s(2.0)});
  spec.N1 = Coefficient::polynomial({s(0.0), s(1.0), s(-1.0)});
  spec.N2 = Coefficient::scalar(2.0);
  spec.G = s(2.0);
  spec.terminal = TerminalSpec::smooth(1.0, {{TerminalTerm::Func::Sin, 1, 1.0, 1.0},
                                             {TerminalTerm::Func::Cos, 2, 2.0, 1.0}});
  return spec;
}

ProblemSpec preset_spec(const std::string& name, int n_steps) {
  if (name == "blqa") return blqa_spec({}, n_steps);
  if (name == "blqb") return blqb_spec(n_steps);
  fail("examples", ErrorCode::InvalidArgument, "unknown preset '" + name + "' (expected blqa or blqb)");
}

BlqaClosedForm::BlqaClosedForm(BlqaParams p) : p_(p) {}

double BlqaClosedForm::upsilon(double t) const {
  // B²/(Rk)(1 − e^{k(t−T)}) = −(B²/R) expm1(k(t−T))/k, continuous through k = 0
  return -(p_.B * p_.B / p_.R) * int_exp(k(), t - p_.T);
}

double BlqaClosedForm::phi0() const { return std::exp((p_.a - p_.b * p_.C1 - p_.c * p_.C2 - p_.A) * p_.T); }

double BlqaClosedForm::x0() const { return -p_.G * phi0() / (1.0 + p_.G * upsilon(0.0)); }

double BlqaClosedForm::y0() const { return phi0() / (1.0 + upsilon(0.0) * p_.G); }

double BlqaClosedForm::phi(double t, double w1, double w2) const {
  const double nu = p_.A + p_.b * p_.C1 + p_.c * p_.C2 - 0.5 * p_.b * p_.b - 0.5 * p_.c * p_.c;
  return phi0() * std::exp(nu * t + p_.b * w1 + p_.c * w2);
}

double BlqaClosedForm::phi_hat(double t, double w1) const {
  const double nu = p_.A + p_.b * p_.C1 + p_.c * p_.C2 - 0.5 * p_.b * p_.b;
  return phi0() * std::exp(nu * t + p_.b * w1);
}

double BlqaClosedForm::xhat(double t, double w1) const {
  return x0() * std::exp(-(p_.A + 0.5 * p_.C1 * p_.C1) * t - p_.C1 * w1);
}

double BlqaClosedForm::v(double t, double w1) const { return -p_.B / p_.R * xhat(t, w1); }

double BlqaClosedForm::gamma1(double t) const { return p_.G * std::exp(-2.0 * p_.A * t); }

double BlqaClosedForm::gamma2_integral(double t) const {
  const double q = p_.B * p_.B / p_.R;
  return gk([&](double u) { return std::exp(-2.0 * p_.A * u) * (q + p_.C1 * p_.C1 * upsilon(u)); }, 0.0, t);
}

double BlqaClosedForm::gamma2(double t) const {
  return p_.G * std::exp(-2.0 * p_.A * t) / (1.0 + p_.G * gamma2_integral(t));
}

double BlqaClosedForm::sigma(double t) const {
  return p_.G / (1.0 + upsilon(0.0) * p_.G) * std::exp(-2.0 * p_.A * t);
}

double BlqaClosedForm::phi_second_moment(double t) const {
  const double nu = p_.A + p_.b * p_.C1 + p_.c * p_.C2 - 0.5 * p_.b * p_.b - 0.5 * p_.c * p_.c;
  const double f0 = phi0();
  return f0 * f0 * std::exp((2.0 * nu + 2.0 * p_.b * p_.b + 2.0 * p_.c * p_.c) * t);
}

double BlqaClosedForm::cost() const {
  const double nu = p_.A + p_.b * p_.C1 + p_.c * p_.C2 - 0.5 * p_.b * p_.b - 0.5 * p_.c * p_.c;
  const double f0 = phi0();
  const double moment_integral = f0 * f0 * int_exp(2.0 * nu + 2.0 * p_.b * p_.b + 2.0 * p_.c * p_.c, p_.T);
  return p_.G * f0 * f0 / (2.0 + 2.0 * p_.G * upsilon(0.0)) + 0.5 * p_.c * p_.c * p_.N2 * moment_integral;
}

Field BlqaClosedForm::x(const PathEnsemble& ens) const {
  // X_t = Ψ_t[X0 − ∫Ψ_s^{-1} C2 N2 η2 ds − ∫Ψ_s^{-1} N2 η2 dW2],
  // Ψ_t = exp(−(A + ½C1² + ½C2²)t − C1 W1 − C2 W2)
  const TimeGrid& g = ens.grid;
  const double dt = g.dt();
  const double rate = p_.A + 0.5 * p_.C1 * p_.C1 + 0.5 * p_.C2 * p_.C2;
  Field out(g.N + 1, ens.n_paths, 1);
  const double X0 = x0();
  kernels::for_blocks(ens.n_paths, true, [&](int p0, int np) {
    for (int p = p0; p < p0 + np; ++p) {
      double acc = 0.0;
      for (int k = 0; k <= g.N; ++k) {
        const double t = g.t(k), w1 = ens.W1.at(k, p), w2 = ens.W2.at(k, p);
        const double psi = std::exp(-rate * t - p_.C1 * w1 - p_.C2 * w2);
        out.at(k, p) = psi * (X0 - acc);
        if (k < g.N) acc += p_.N2 * eta2(t, w1, w2) / psi * (p_.C2 * dt + ens.dW2.at(k, p));
      }
    }
  });
  return out;
}

Field BlqaClosedForm::psi_hat(const PathEnsemble& ens) const {
  // ψ̂_t = Φ_t[−∫Φ_s^{-1}(𝓑_s + C1𝓓_s)ds − ∫Φ_s^{-1}𝓓_s dW1],
  // 𝓐 = A + B²Γ2/R + C1²Γ2Υ, 𝓑 = C1Γ2η̂1 + C2Γ2η̂2, 𝓓 = Γ2η̂1 + C1Γ2φ̂,
  // Φ_t = exp(−∫(𝓐 + ½C1²)ds − C1W1)
  const TimeGrid& g = ens.grid;
  const double dt = g.dt();
  auto cal_a = [&](double u) {
    const double g2 = gamma2(u);
    return p_.A + p_.B * p_.B * g2 / p_.R + p_.C1 * p_.C1 * g2 * upsilon(u);
  };
  std::vector<double> int_a(g.N + 1, 0.0), g2(g.N + 1);
  for (int k = 0; k <= g.N; ++k) {
    if (k > 0) int_a[k] = int_a[k - 1] + gk(cal_a, g.t(k - 1), g.t(k));
    g2[k] = gamma2(g.t(k));
  }
  Field out(g.N + 1, ens.n_paths, 1);
  const double half_c1sq = 0.5 * p_.C1 * p_.C1;
  kernels::for_blocks(ens.n_paths, true, [&](int p0, int np) {
    for (int p = p0; p < p0 + np; ++p) {
      double acc = 0.0;
      for (int k = 0; k <= g.N; ++k) {
        const double t = g.t(k), w1 = ens.W1.at(k, p);
        const double Phi = std::exp(-int_a[k] - half_c1sq * t - p_.C1 * w1);
        out.at(k, p) = Phi * acc;
        if (k < g.N) {
          const double ph = phi_hat(t, w1);
          const double cb = g2[k] * ph * (p_.C1 * p_.b + p_.C2 * p_.c);
          const double cd = g2[k] * ph * (p_.b + p_.C1);
          acc -= ((cb + p_.C1 * cd) * dt + cd * ens.dW1.at(k, p)) / Phi;
        }
      }
    }
  });
  return out;
}

}  // namespace blq
