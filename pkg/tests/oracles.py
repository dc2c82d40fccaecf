"""Independent oracles used by the test suite.

Everything here is computed from first principles (Lyapunov equations on
the companion form, block-Toeplitz linear prediction, direct recursions)
so that the state-space pipeline under test is checked against a second,
unrelated route.
"""

import numpy as np
from scipy.linalg import solve, solve_discrete_lyapunov


def companion(A_stack):
    """Companion matrix built directly from a (p, M, M) coefficient stack."""
    p, M, _ = A_stack.shape
    F = np.zeros((M * p, M * p))
    F[:M] = np.hstack(list(A_stack))
    if p > 1:
        F[M:, : M * (p - 1)] = np.eye(M * (p - 1))
    return F


def var_autocovariance(model, n_lags):
    """Theoretical autocovariances Gamma(h) = E[Y(n+h) Y(n)'], h = 0..n_lags."""
    M, p = model.M, model.p
    F = companion(model.A)
    Q = np.zeros_like(F)
    Q[:M, :M] = model.Sigma
    S = solve_discrete_lyapunov(F, Q)
    gammas = [S[:M, k * M:(k + 1) * M] for k in range(p)]

    def at(h):
        return gammas[h] if h >= 0 else gammas[-h].T

    while len(gammas) <= n_lags:
        h = len(gammas)
        gammas.append(sum(model.A[k] @ at(h - 1 - k) for k in range(p)))
    return gammas


def gamma_at(gammas, h):
    return gammas[h] if h >= 0 else gammas[-h].T


def filtered_autocovariance(gammas, taps, n_lags):
    """Autocovariances of the causally filtered process sum_l b_l Y(n-l)."""
    q = len(taps) - 1
    return [
        sum(
            taps[l] * taps[k] * gamma_at(gammas, h - l + k)
            for l in range(q + 1)
            for k in range(q + 1)
        )
        for h in range(n_lags + 1)
    ]


def prediction_error_covariance(gammas, n_lags, channels):
    """Error covariance of the best linear predictor of the selected
    channels from ``n_lags`` of their own past, solved from the
    block-Toeplitz normal equations."""
    sub = [g[np.ix_(channels, channels)] for g in gammas]
    M = len(channels)
    T = np.empty((n_lags * M, n_lags * M))
    for a in range(n_lags):
        for b in range(n_lags):
            h = b - a
            T[a * M:(a + 1) * M, b * M:(b + 1) * M] = sub[h] if h >= 0 else sub[-h].T
    g = np.hstack([sub[k] for k in range(1, n_lags + 1)])
    W = solve(0.5 * (T + T.T), g.T, assume_a="sym").T
    return sub[0] - W @ g.T


def two_regression_gc(model, source, target, n_lags=300, taps=None, tau=1):
    """Classical two-regression Granger causality from theoretical
    covariances, optionally after filtering with ``taps`` and keeping every
    ``tau``-th sample."""
    if taps is None:
        taps = np.ones(1)
    horizon = n_lags * tau + 2 * len(taps) + 2 * tau + 10
    gammas = var_autocovariance(model, horizon)
    filtered = filtered_autocovariance(gammas, taps, n_lags * tau + tau + 2)
    coarse = [filtered[k * tau] for k in range(n_lags + 2)]
    M = model.M
    full = prediction_error_covariance(coarse, n_lags, list(range(M)))
    keep = [c for c in range(M) if c != source]
    restricted = prediction_error_covariance(coarse, n_lags, keep)
    pos = keep.index(target)
    return float(np.log(restricted[pos, pos] / full[target, target]))


def simulate_iss(A, C, K, Phi, n_samples, seed=0, innovations=None):
    """Direct recursion of an innovations-form model; returns (Y, E)."""
    m = A.shape[0]
    M = C.shape[0]
    if innovations is None:
        rng = np.random.default_rng(seed)
        innovations = rng.standard_normal((n_samples, M)) @ np.linalg.cholesky(Phi).T
    state = np.zeros(m)
    out = np.empty((n_samples, M))
    for n in range(n_samples):
        out[n] = C @ state + innovations[n]
        state = A @ state + K @ innovations[n]
    return out, innovations


def sample_autocovariance(values, max_lag):
    """Sample autocovariances E[Y(n+h) Y(n)'] of a demeaned panel."""
    x = values - values.mean(axis=0)
    n = len(x)
    return [x[h:].T @ x[: n - h] / (n - h) for h in range(max_lag + 1)]


def ols_error_variances(values, order, channels):
    """Residual variances of an OLS regression of the selected channels on
    ``order`` lags of themselves (denominator N - order)."""
    Z = values[:, channels] - values[:, channels].mean(axis=0)
    n = len(Z)
    X = np.hstack([Z[order - k: n - k] for k in range(1, order + 1)])
    T = Z[order:]
    coef, _, _, _ = np.linalg.lstsq(X, T, rcond=None)
    resid = T - X @ coef
    return np.diag(resid.T @ resid / (n - order))
