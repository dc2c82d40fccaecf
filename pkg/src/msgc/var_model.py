"""Stationary vector autoregressive (VAR) processes.

A VAR(p) process over M channels is

    Y[n] = A_1 Y[n-1] + ... + A_p Y[n-p] + U[n],

with M x M coefficient matrices ``A_k`` and Gaussian innovations ``U`` of
covariance ``Sigma``. This module holds the model/data containers, the
simulator, ordinary-least-squares identification with BIC order selection,
and the two families of benchmark generators used by the batch pipeline:
a bivariate process with lagged couplings, and a pair of mixed latent
oscillators with scale-dependent interactions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import RankDeficiencyError, UnstableModelError

__all__ = [
    "TimeSeriesSet",
    "VarModel",
    "SimulationConfig",
    "uni_config",
    "bi_config",
    "mix_config",
    "build_benchmark",
    "simulate_var",
    "simulate_benchmark",
    "estimate_var",
    "select_order_bic",
    "check_stability",
]

# Stability margin: a model is treated as stable iff the companion spectral
# radius is below 1 - STABILITY_MARGIN.
STABILITY_MARGIN = 1e-10


@dataclass(frozen=True)
class TimeSeriesSet:
    """An N x M panel of finite real values.

    Rows are time points, columns are channels. ``dt`` is the sampling
    interval in arbitrary units (None when unknown).
    """

    values: np.ndarray
    labels: tuple[str, ...]
    dt: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("values must be a 2-d array (rows=time, cols=channels)")
        n, m = values.shape
        if n < 1 or m < 1:
            raise ValueError(f"need at least one row and one column, got {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        labels = tuple(str(c) for c in self.labels)
        if len(labels) != m:
            raise ValueError(f"{m} channels but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise ValueError("channel labels must be distinct")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    def select(self, labels) -> "TimeSeriesSet":
        """Return the sub-panel holding ``labels`` in the given order."""
        idx = []
        for lab in labels:
            if lab not in self.labels:
                raise ValueError(f"unknown channel {lab!r}; have {list(self.labels)}")
            idx.append(self.labels.index(lab))
        return TimeSeriesSet(self.values[:, idx], tuple(labels), self.dt)


@dataclass(frozen=True)
class VarModel:
    """Parameters of a VAR(p) process: coefficient matrices and innovation
    covariance.

    ``A`` is a (p, M, M) stack; ``A[k]`` multiplies ``Y[n-k-1]``. ``Sigma``
    must be symmetric positive definite. Stability is a property of the
    parameters, not a construction requirement; operations that need it
    (simulation, state-space embedding) check it and raise
    :class:`UnstableModelError`.
    """

    A: np.ndarray
    Sigma: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise ValueError("A must have shape (p, M, M)")
        p, m, _ = A.shape
        if p < 1 or m < 1:
            raise ValueError("need p >= 1 and M >= 1")
        Sigma = np.asarray(self.Sigma, dtype=float)
        if Sigma.shape != (m, m):
            raise ValueError(f"Sigma must be {m}x{m}, got {Sigma.shape}")
        if np.max(np.abs(Sigma - Sigma.T)) > 1e-12:
            raise ValueError("Sigma must be symmetric within 1e-12")
        Sigma = 0.5 * (Sigma + Sigma.T)
        if np.linalg.eigvalsh(Sigma).min() <= 0:
            raise ValueError("Sigma must be positive definite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Sigma", Sigma)

    @property
    def M(self) -> int:
        return self.A.shape[1]

    @property
    def p(self) -> int:
        return self.A.shape[0]

    def companion(self) -> np.ndarray:
        """The Mp x Mp companion form of the lag polynomial."""
        m, p = self.M, self.p
        F = np.zeros((m * p, m * p))
        F[:m] = np.hstack(list(self.A))
        if p > 1:
            F[m:, : m * (p - 1)] = np.eye(m * (p - 1))
        return F

    @property
    def is_stable(self) -> bool:
        return check_stability(self) < 1.0 - STABILITY_MARGIN


def check_stability(model: VarModel) -> float:
    """Spectral radius of the companion matrix.

    The model counts as stable iff the returned radius is strictly below
    ``1 - 1e-10``.
    """
    return float(np.max(np.abs(np.linalg.eigvals(model.companion()))))


def _require_stable(model: VarModel) -> None:
    rho = check_stability(model)
    if rho >= 1.0 - STABILITY_MARGIN:
        raise UnstableModelError(rho)


# --------------------------------------------------------------------------
# benchmark generators
# --------------------------------------------------------------------------

# Phase of the fast oscillator pole; together with modulus 0.95 this places
# the fast spectral peak at a ~13.3-sample period (lag-1 coefficient 1.6929).
_FAST_PHASE = math.acos(1.6929 / 1.9)


@dataclass(frozen=True)
class SimulationConfig:
    """Settings for the benchmark generators.

    ``generator`` selects the family:

    * ``'uni'``/``'bi'``: bivariate process with autonomous dynamics
      (strength ``c11``/``c22`` at lags ``d11``/``d22``) and lagged
      cross-couplings (``c12`` = influence of y2 on y1 at lag ``d12``;
      ``c21`` = influence of y1 on y2 at lag ``d21``), unit innovation
      variances.
    * ``'mix'``: four latent channels (x1, x2, z1, z2); x1 and z1 are
      AR(2) resonators with pole modulus ``rho_*`` and phase ``phi_*``
      (radians), x2 and z2 are lag-1 copies of their drivers scaled by
      ``coupling_*``; innovation variances ``lambda_*``. The observed
      bivariate pair is formed by instantaneous mixing in
      :func:`simulate_benchmark` (y1 = x1 + z2, y2 = x2 + z1) and is not
      itself a finite-order VAR.
    """

    generator: str
    # lagged-coupling family
    c11: float = 0.5
    d11: int = 1
    c12: float = 0.0
    d12: int = 1
    c21: float = 0.5
    d21: int = 2
    c22: float = 0.0
    d22: int = 1
    # mixed-oscillator family
    rho_slow: float = 0.95
    phi_slow: float = 0.0
    rho_fast: float = 0.95
    phi_fast: float = _FAST_PHASE
    coupling_slow: float = 0.5
    coupling_fast: float = 1.0
    lambda_u1: float = 0.25
    lambda_u2: float = 0.5
    lambda_w1: float = 1.0
    lambda_w2: float = 0.5
    # realization settings
    n_samples: int = 500
    burn_in: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.generator not in ("uni", "bi", "mix"):
            raise ValueError(f"unknown generator tag {self.generator!r}")
        for name in ("d11", "d12", "d21", "d22"):
            if not (isinstance(getattr(self, name), (int, np.integer)) and getattr(self, name) >= 1):
                raise ValueError(f"{name} must be a positive integer")
        for name in ("rho_slow", "rho_fast"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        for name in ("lambda_u1", "lambda_u2", "lambda_w1", "lambda_w2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


def uni_config(**kwargs) -> SimulationConfig:
    """Unidirectional benchmark: y1 is AR(1), y1 drives y2 at lag 2."""
    kwargs.setdefault("c11", 0.5)
    kwargs.setdefault("d11", 1)
    kwargs.setdefault("c12", 0.0)
    kwargs.setdefault("c21", 0.5)
    kwargs.setdefault("d21", 2)
    kwargs.setdefault("c22", 0.0)
    return SimulationConfig(generator="uni", **kwargs)


def bi_config(**kwargs) -> SimulationConfig:
    """Bidirectional benchmark: y2 -> y1 at lag 2 (strength 0.75) and
    y1 -> y2 at lag 7 (strength 0.5), autonomous lag-1 dynamics on both.

    The self-coupling 0.3 keeps the lag polynomial stable: with these
    cross-couplings the process diverges once the product
    (1 - c11)(1 - c22) drops below c12*c21 = 0.375.
    """
    kwargs.setdefault("c11", 0.3)
    kwargs.setdefault("d11", 1)
    kwargs.setdefault("c12", 0.75)
    kwargs.setdefault("d12", 2)
    kwargs.setdefault("c21", 0.5)
    kwargs.setdefault("d21", 7)
    kwargs.setdefault("c22", 0.3)
    kwargs.setdefault("d22", 1)
    return SimulationConfig(generator="bi", **kwargs)


def mix_config(**kwargs) -> SimulationConfig:
    """Mixed-oscillator benchmark: slow resonator x1 drives x2, fast
    resonator z1 drives z2; the observed pair mixes the subprocesses."""
    return SimulationConfig(generator="mix", **kwargs)


def build_benchmark(config: SimulationConfig) -> VarModel:
    """Construct the benchmark VAR model for ``config``.

    For ``'uni'``/``'bi'`` this is the bivariate model of the lagged-coupling
    family with order p = max lag and unit innovation variances. For
    ``'mix'`` it is the four-dimensional model over (x1, x2, z1, z2) with
    diagonal innovation covariance; the observed mixed pair is produced by
    :func:`simulate_benchmark`.
    """
    if config.generator in ("uni", "bi"):
        entries = [
            (0, 0, config.c11, config.d11),
            (0, 1, config.c12, config.d12),
            (1, 0, config.c21, config.d21),
            (1, 1, config.c22, config.d22),
        ]
        p = max([d for _, _, c, d in entries if c != 0.0], default=1)
        A = np.zeros((p, 2, 2))
        for i, j, c, d in entries:
            if c != 0.0:
                A[d - 1, i, j] = c
        return VarModel(A, np.eye(2))
    if config.generator == "mix":
        A = np.zeros((2, 4, 4))
        A[0, 0, 0] = 2.0 * config.rho_slow * math.cos(config.phi_slow)
        A[1, 0, 0] = -config.rho_slow**2
        A[0, 1, 0] = config.coupling_slow
        A[0, 2, 2] = 2.0 * config.rho_fast * math.cos(config.phi_fast)
        A[1, 2, 2] = -config.rho_fast**2
        A[0, 3, 2] = config.coupling_fast
        Sigma = np.diag([config.lambda_u1, config.lambda_u2,
                         config.lambda_w1, config.lambda_w2])
        return VarModel(A, Sigma)
    raise ValueError(f"unknown generator tag {config.generator!r}")


# --------------------------------------------------------------------------
# simulation
# --------------------------------------------------------------------------

def simulate_var(model: VarModel, n_samples: int, burn_in: int = 1000,
                 seed: int = 0, labels=None) -> TimeSeriesSet:
    """Generate a realization of a stable VAR model.

    Innovations are Gaussian with covariance ``Sigma`` (sampled through its
    Cholesky factor); the recursion starts from zeros and the first
    ``burn_in`` rows are discarded. Deterministic for a fixed seed.

    Raises
    ------
    UnstableModelError
        If the companion spectral radius is >= 1 - 1e-10.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    _require_stable(model)
    m, p = model.M, model.p
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(model.Sigma)
    innovations = rng.standard_normal((burn_in + n_samples, m)) @ chol.T
    F = model.companion()
    state = np.zeros(m * p)
    out = np.empty((burn_in + n_samples, m))
    for n in range(burn_in + n_samples):
        state = F @ state
        state[:m] += innovations[n]
        out[n] = state[:m]
    if labels is None:
        labels = tuple(f"y{i + 1}" for i in range(m))
    return TimeSeriesSet(out[burn_in:], labels)


def simulate_benchmark(config: SimulationConfig) -> TimeSeriesSet:
    """Simulate the observed series of a benchmark configuration.

    For ``'uni'``/``'bi'`` this is a plain realization of the bivariate
    model. For ``'mix'`` the four latent channels are simulated and then
    instantaneously mixed into the observed pair (y1 = x1 + z2,
    y2 = x2 + z1).
    """
    model = build_benchmark(config)
    if config.generator == "mix":
        latent = simulate_var(model, config.n_samples, config.burn_in, config.seed,
                              labels=("x1", "x2", "z1", "z2"))
        x = latent.values
        mixed = np.column_stack([x[:, 0] + x[:, 3], x[:, 1] + x[:, 2]])
        return TimeSeriesSet(mixed, ("y1", "y2"))
    return simulate_var(model, config.n_samples, config.burn_in, config.seed)


# --------------------------------------------------------------------------
# identification
# --------------------------------------------------------------------------

def _lagged_regression(values: np.ndarray, p: int, n_skip: int):
    """OLS of row n on rows n-1..n-p, using target rows n_skip..N-1.

    Returns (coefficients stacked as (M*p, M), residuals). Raises
    RankDeficiencyError naming the channels whose lagged copies make the
    regressor matrix singular.
    """
    n, m = values.shape
    X = np.hstack([values[n_skip - k: n - k] for k in range(1, p + 1)])
    T = values[n_skip:]
    # pivoted QR exposes the numerically dependent columns
    _, R, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(float).eps * (diag[0] if diag[0] > 0 else 1.0)
    rank = int(np.sum(diag > tol))
    if rank < X.shape[1]:
        channels = sorted({int(col % m) for col in piv[rank:]})
        raise RankDeficiencyError(channels)
    coef, _, _, _ = np.linalg.lstsq(X, T, rcond=None)
    return coef, T - X @ coef


def estimate_var(data: TimeSeriesSet, p: int) -> VarModel:
    """Identify a VAR(p) model by ordinary least squares.

    Each channel is demeaned first; ``Sigma`` is the residual covariance
    with denominator N - p.

    Raises
    ------
    ValueError
        If the sample is too short (requires N > M*p + 1).
    RankDeficiencyError
        If the lagged regressor matrix is rank deficient.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    n, m = data.values.shape
    if n <= m * p + 1:
        raise ValueError(f"need N > M*p + 1 samples to fit order {p} (N={n}, M={m})")
    centered = data.values - data.values.mean(axis=0)
    coef, resid = _lagged_regression(centered, p, p)
    Sigma = resid.T @ resid / (n - p)
    A = np.stack([coef[k * m:(k + 1) * m].T for k in range(p)])
    return VarModel(A, Sigma)


def select_order_bic(data: TimeSeriesSet, p_max: int) -> int:
    """Select the VAR order in 1..p_max by the Bayesian information criterion.

    All candidate orders are fitted on the common target rows
    p_max..N-1 (effective sample N_eff = N - p_max) so the likelihood terms
    are comparable:

        BIC(p) = ln det(Sigma_hat(p)) + M^2 * p * ln(N_eff) / N_eff.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    n, m = data.values.shape
    if n <= m * p_max + 1:
        raise ValueError(
            f"need N > M*p_max + 1 samples to scan orders up to {p_max} (N={n}, M={m})"
        )
    n_eff = n - p_max
    centered = data.values - data.values.mean(axis=0)
    best_p, best_bic = 1, np.inf
    for p in range(1, p_max + 1):
        _, resid = _lagged_regression(centered, p, p_max)
        Sigma = resid.T @ resid / n_eff
        sign, logdet = np.linalg.slogdet(Sigma)
        if sign <= 0:
            raise RankDeficiencyError(
                range(m), f"residual covariance singular at order {p}"
            )
        bic = logdet + (m * m * p * np.log(n_eff)) / n_eff
        if bic < best_bic:
            best_p, best_bic = p, bic
    return best_p
