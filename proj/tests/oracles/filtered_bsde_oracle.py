#!/usr/bin/env python3
"""Reference values for the filtered BSDE of the BLQB preset (C2 = 0).

Semi-analytic route: with alpha = A + Upsilon H and beta = C1/(1 + Upsilon N1)
the observable-filtration BSDE
    d phi_hat = (alpha phi_hat + beta eta1_hat) dt + eta1_hat dW1,
    phi_hat_T = E[zeta | W1_T] = T + sin(W1_T) + exp(-2T)
is linear, and a Girsanov change of measure gives
    phi_hat_t = exp(-int_t^T alpha) * (T + exp(-2T)
                 + sin(W1_t - int_t^T beta) * exp(-(T - t)/2)).
At t = 0 this is a deterministic number (golden phi_hat_0).

Second route (sanity only): a numpy implicit-midpoint least-squares Monte Carlo run of the full
(W1, W2) BSDE over several seeds, reporting the mean and spread of phi_hat_0.
"""
import math
import sys

import numpy as np

from riccati_oracle import scipy_route, T


def semi_analytic_phi_hat0():
    _, _, _, _, int_alpha, int_beta = scipy_route()
    return math.exp(-int_alpha) * (T + math.exp(-2 * T) + math.sin(-int_beta) * math.exp(-T / 2))


def hermite(x, deg):
    out = [np.ones_like(x), x.copy()]
    for j in range(1, deg):
        out.append(x * out[j] - j * out[j - 1])
    return out[: deg + 1]


def lsmc_phi_hat0(n_paths, n_steps, seed, deg=3):
    """Implicit-midpoint LSMC: the generator is evaluated at t_{k+1/2} with
    P_mid = (P_k + E_k P_{k+1})/2 and Q_k = E_k[(P_{k+1} - dt/2 f_{k+1}) dW]/dt."""
    from scipy.integrate import solve_ivp
    from riccati_oracle import f_ups
    up = solve_ivp(lambda t, y: [f_ups(t, y[0])], (T, 0.0), [0.0], rtol=1e-12,
                   atol=1e-12, method="DOP853", dense_output=True)
    dt = T / n_steps
    rng = np.random.default_rng(seed)
    dW1 = rng.standard_normal((n_steps, n_paths)) * math.sqrt(dt)
    dW2 = rng.standard_normal((n_steps, n_paths)) * math.sqrt(dt)
    W1 = np.vstack([np.zeros(n_paths), np.cumsum(dW1, axis=0)])
    W2 = np.vstack([np.zeros(n_paths), np.cumsum(dW2, axis=0)])

    def coeffs(t):
        u = float(up.sol(t)[0])
        return 2.0, u * math.exp(-0.05 * t), (t - 2.0), (t - 2.0) / (1 + u * t * (T - t))

    def design(k, full):
        t = k * dt
        if k == 0:
            return np.ones((n_paths, 1))
        h1 = hermite(W1[k] / math.sqrt(t), deg)
        if not full:
            return np.column_stack(h1)
        h2 = hermite(W2[k] / math.sqrt(t), deg)
        return np.column_stack([h1[i] * h2[j] for i in range(deg + 1)
                                for j in range(deg + 1 - i)])

    def fit(X, y):
        M = X.T @ X
        M[1:, 1:] += 1e-8 * np.eye(M.shape[0] - 1)
        return X @ np.linalg.solve(M, X.T @ y)

    def gen(t, p, q1, ph, q1h):
        a, uh, c1, c1inv = coeffs(t)
        return a * p + uh * ph + c1 * (q1 - q1h) + c1inv * q1h

    P = 1.0 + np.sin(W1[-1]) + np.cos(2 * W2[-1])
    f_next = None
    for k in range(n_steps - 1, -1, -1):
        Xf, Xo = design(k, True), design(k, False)
        y = P if f_next is None else P - 0.5 * dt * f_next
        cond = fit(Xf, P)
        ycond = fit(Xf, y)
        q1 = fit(Xf, (y - ycond) * dW1[k]) / dt
        q1h = fit(Xo, q1)
        tm = (k + 0.5) * dt
        condh = fit(Xo, cond)
        p0 = cond - dt * gen(tm, cond, q1, condh, q1h)
        p1 = cond - dt * gen(tm, 0.5 * (p0 + cond), q1, 0.5 * (fit(Xo, p0) + condh), q1h)
        P = p1
        f_next = gen(k * dt, P, q1, fit(Xo, P), q1h)
    return float(P.mean())


if __name__ == "__main__":
    golden = semi_analytic_phi_hat0()
    print(f"semi-analytic phi_hat_0 = {golden:.15e}")
    if len(sys.argv) > 1:
        n_paths = int(sys.argv[1])
        n_steps = int(sys.argv[2]) if len(sys.argv) > 2 else 256
        seeds = range(int(sys.argv[3]) if len(sys.argv) > 3 else 5)
        deg = int(sys.argv[4]) if len(sys.argv) > 4 else 3
        vals = np.array([lsmc_phi_hat0(n_paths, n_steps, s, deg) for s in seeds])
        rel = (vals - golden) / golden
        print(f"lsmc n={n_paths} N={n_steps} deg={deg}: mean={vals.mean():.6e} "
              f"rel.err mean={rel.mean():+.4%} sd={rel.std(ddof=1):.4%}")
