#pragma once

// Reference values frozen from the independent Python oracles in tests/oracles/.

namespace blq::golden {

// blqb preset, fine-step RK4 (dt = 1e-6) and DOP853 (rtol 1e-13) agree to all digits shown
inline constexpr double kBlqbUpsilon0 = 1.676583751538812;
inline constexpr double kBlqbGamma1At1 = 0.2728119829956923;
inline constexpr double kBlqbGamma2At1 = 0.1745805366477119;
inline constexpr double kBlqbSigmaAt1 = 0.1745805366477119;  // Υ(1) = 0, so Σ(1) = Γ2(1)
inline constexpr double kBlqbIntAlpha = 3.296980354184130;    // ∫(A + ΥH)dt
inline constexpr double kBlqbIntBeta = -1.222043035120705;    // ∫C1/(1 + ΥN1)dt

// blqb filtered BSDE value at t = 0 (semi-analytic, from the two integrals above)
inline constexpr double kBlqbPhiHat0 = 6.308902013608669e-02;

// blqa default constants: optimal cost with the analytic lognormal second moment
inline constexpr double kBlqaCost = 0.04386760523895318;

}  // namespace blq::golden
