"""State-space algebra: innovations forms, the Riccati fixed point, the
filtered-VAR embedding, and exact downsampling.

Two model classes are used. The general form

    X[n+1] = A X[n] + W[n],      Y[n] = C X[n] + V[n]

carries a state-noise covariance ``Xi``, observation-noise covariance
``Psi`` and cross-covariance ``Theta``. Its innovations form

    Z[n+1] = A Z[n] + K E[n],    Y[n] = C Z[n] + E[n]

shares (A, C) and is parameterized by the steady-state Kalman gain ``K``
and innovation covariance ``Phi``. Converting from the general form to the
innovations form amounts to solving a discrete algebraic Riccati equation
for the state error variance P:

    P = A P A' + Xi - (A P C' + Theta) (C P C' + Psi)^-1 (C P A' + Theta')

after which Phi = C P C' + Psi and K = (A P C' + Theta) Phi^-1.

The innovation variances read off ``Phi`` are one-step prediction error
variances given the infinite past, which is what the causality measures in
:mod:`msgc.granger` consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DareConvergenceError, SingularInnovationError, UnstableModelError
from .rescale import FirFilter
from .var_model import VarModel, check_stability, STABILITY_MARGIN

__all__ = [
    "SsModel",
    "IssModel",
    "DareSolution",
    "solve_dare",
    "var_filter_to_iss",
    "downsample_iss",
    "iss_submodel",
]


def _spectral_radius(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0


@dataclass(frozen=True)
class SsModel:
    """General-form state-space model (A, C, Xi, Psi, Theta).

    ``A`` must be stable; ``Xi``/``Psi`` symmetric within 1e-10 and the
    joint noise covariance [[Xi, Theta], [Theta', Psi]] positive
    semidefinite (minimum eigenvalue above -1e-8).
    """

    A: np.ndarray
    C: np.ndarray
    Xi: np.ndarray
    Psi: np.ndarray
    Theta: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        C = np.asarray(self.C, dtype=float)
        Xi = np.asarray(self.Xi, dtype=float)
        Psi = np.asarray(self.Psi, dtype=float)
        Theta = np.asarray(self.Theta, dtype=float)
        m = A.shape[0]
        if A.shape != (m, m):
            raise ValueError("A must be square")
        M = C.shape[0]
        if C.shape != (M, m):
            raise ValueError(f"C must be M x {m}")
        if Xi.shape != (m, m) or Psi.shape != (M, M) or Theta.shape != (m, M):
            raise ValueError("noise covariance shapes do not match (A, C)")
        if np.max(np.abs(Xi - Xi.T)) > 1e-10 or np.max(np.abs(Psi - Psi.T)) > 1e-10:
            raise ValueError("Xi and Psi must be symmetric within 1e-10")
        Xi = 0.5 * (Xi + Xi.T)
        Psi = 0.5 * (Psi + Psi.T)
        joint = np.block([[Xi, Theta], [Theta.T, Psi]])
        if np.linalg.eigvalsh(0.5 * (joint + joint.T)).min() < -1e-8:
            raise ValueError("joint noise covariance must be positive semidefinite")
        rho = _spectral_radius(A)
        if rho >= 1.0 - STABILITY_MARGIN:
            raise UnstableModelError(rho, f"state matrix is not stable (radius {rho:.6g})")
        for name, val in (("A", A), ("C", C), ("Xi", Xi), ("Psi", Psi), ("Theta", Theta)):
            object.__setattr__(self, name, val)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def obs_dim(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class IssModel:
    """Innovations-form state-space model (A, C, K, Phi)."""

    A: np.ndarray
    C: np.ndarray
    K: np.ndarray
    Phi: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        C = np.asarray(self.C, dtype=float)
        K = np.asarray(self.K, dtype=float)
        Phi = np.asarray(self.Phi, dtype=float)
        m = A.shape[0]
        M = C.shape[0]
        if A.shape != (m, m) or C.shape != (M, m) or K.shape != (m, M) or Phi.shape != (M, M):
            raise ValueError("inconsistent shapes among (A, C, K, Phi)")
        if np.max(np.abs(Phi - Phi.T)) > 1e-10:
            raise ValueError("Phi must be symmetric within 1e-10")
        Phi = 0.5 * (Phi + Phi.T)
        if np.linalg.eigvalsh(Phi).min() <= 0:
            raise ValueError("Phi must be positive definite")
        rho = _spectral_radius(A)
        if rho >= 1.0 - STABILITY_MARGIN:
            raise UnstableModelError(rho, f"state matrix is not stable (radius {rho:.6g})")
        for name, val in (("A", A), ("C", C), ("K", K), ("Phi", Phi)):
            object.__setattr__(self, name, val)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def obs_dim(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class DareSolution:
    """Converged Riccati solution: error variance P, gain K, innovation
    covariance Phi, iteration count and max-abs equation residual."""

    P: np.ndarray
    K: np.ndarray
    Phi: np.ndarray
    iterations: int
    residual: float


def _riccati_step(model: SsModel, P: np.ndarray):
    """One Riccati map evaluation; returns (next P, gain numerator, Phi)."""
    APC = model.A @ P @ model.C.T + model.Theta
    G = model.C @ P @ model.C.T + model.Psi
    G = 0.5 * (G + G.T)
    if np.linalg.eigvalsh(G).min() < 1e-12:
        raise SingularInnovationError(
            "innovation covariance numerically singular along the Riccati iteration"
        )
    nxt = model.A @ P @ model.A.T + model.Xi - APC @ np.linalg.solve(G, APC.T)
    return 0.5 * (nxt + nxt.T), APC, G


def solve_dare(model: SsModel, tol: float = 1e-12, max_iter: int = 10_000) -> DareSolution:
    """Solve the Riccati fixed point by iterating the covariance recursion.

    Starts from P = Xi and iterates until the max-abs update drops below
    ``tol`` (for stable A this converges to the stabilizing solution). The
    returned solution carries the max-abs equation residual obtained by
    substituting P back into the fixed-point map; the closed-loop matrix
    A - K C is verified to be stable.

    Raises
    ------
    DareConvergenceError
        On non-convergence within ``max_iter`` or a non-stabilizing limit.
    SingularInnovationError
        If C P C' + Psi becomes numerically singular.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    P = model.Xi.copy()
    update = np.inf
    for it in range(1, max_iter + 1):
        P_next, _, _ = _riccati_step(model, P)
        update = float(np.max(np.abs(P_next - P)))
        P = P_next
        if update < tol:
            break
    else:
        raise DareConvergenceError(
            f"Riccati iteration did not converge within {max_iter} iterations "
            f"(last update {update:.3g})",
            residual=update,
            iterations=max_iter,
        )
    P_check, APC, G = _riccati_step(model, P)
    residual = float(np.max(np.abs(P_check - P)))
    Phi = G
    K = np.linalg.solve(Phi.T, APC.T).T
    closed_loop = _spectral_radius(model.A - K @ model.C)
    if closed_loop >= 1.0:
        raise DareConvergenceError(
            f"converged to a non-stabilizing solution (closed-loop radius "
            f"{closed_loop:.6g})",
            residual=residual,
            iterations=it,
        )
    return DareSolution(P=P, K=K, Phi=Phi, iterations=it, residual=residual)


def _strip_dead_taps(b: np.ndarray) -> np.ndarray:
    """Drop exactly-zero leading and trailing taps.

    Leading zeros are a pure delay common to all channels; for stationary
    processes a common delay changes no joint statistics, so the reduced
    filter is equivalent for everything computed here. Trailing zeros only
    inflate the state dimension.
    """
    nonzero = np.nonzero(b)[0]
    return b[nonzero[0]: nonzero[-1] + 1]


def var_filter_to_iss(model: VarModel, filt: FirFilter) -> IssModel:
    """Embed a causally filtered VAR process as an innovations-form model.

    Filtering a VAR(p) with an order-q FIR adds a moving-average component
    driven by the lagged innovations, scaled by B_l = b_l * I. Stacking the
    p lagged outputs and q lagged innovations as the state gives an
    innovations form with

        C = [A_1 .. A_p  B_1 .. B_q],
        A = [[C], [shifted identities for the output lags], [0],
             [shifted identities for the innovation lags]],
        K = [I, 0, B_0^-1, 0]',    Phi = B_0 Sigma B_0'.

    With q = 0 the state holds the output lags only (the classical
    companion embedding) and Phi = Sigma. Filters whose leading taps are
    exactly zero are reduced to their delay-free core first, so the
    B_0 inverse always exists.
    """
    rho = check_stability(model)
    if rho >= 1.0 - STABILITY_MARGIN:
        raise UnstableModelError(rho)
    b = _strip_dead_taps(filt.b)
    if b[0] == 0.0:
        raise ValueError("filter must have a nonzero leading tap after delay reduction")
    q = b.size - 1
    M, p = model.M, model.p
    m = M * (p + q)
    blocks = list(model.A)
    blocks += [b[l] * np.eye(M) for l in range(1, q + 1)]
    C = np.hstack(blocks)
    A = np.zeros((m, m))
    A[:M] = C
    if p > 1:
        A[M: M * p, : M * (p - 1)] = np.eye(M * (p - 1))
    if q > 1:
        A[M * p + M:, M * p: m - M] = np.eye(M * (q - 1))
    K = np.zeros((m, M))
    K[:M] = np.eye(M)
    if q >= 1:
        K[M * p: M * p + M] = np.eye(M) / b[0]
    Phi = b[0] ** 2 * model.Sigma
    return IssModel(A, C, K, Phi)


def downsample_iss(model: IssModel, tau: int, tol: float = 1e-12,
                   max_iter: int = 10_000) -> IssModel:
    """Innovations form of the process observed every ``tau`` samples.

    The downsampled state is the original state at the kept instants, so the
    state matrix becomes A^tau while C is unchanged. Accumulating the
    intermediate innovations gives state noise

        Xi_1 = K Phi K',   Xi_t = A Xi_{t-1} A' + K Phi K'  (t >= 2),

    observation noise Phi, and cross term Theta_tau = A^(tau-1) K Phi. The
    resulting general-form model is converted back to an innovations form
    through :func:`solve_dare`.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    KPhi = model.K @ model.Phi
    Q = KPhi @ model.K.T
    Q = 0.5 * (Q + Q.T)
    Xi = Q.copy()
    for _ in range(tau - 1):
        Xi = model.A @ Xi @ model.A.T + Q
        Xi = 0.5 * (Xi + Xi.T)
    A_tau = np.linalg.matrix_power(model.A, tau)
    Theta = np.linalg.matrix_power(model.A, tau - 1) @ KPhi
    ss = SsModel(A_tau, model.C, Xi, model.Phi, Theta)
    sol = solve_dare(ss, tol=tol, max_iter=max_iter)
    return IssModel(A_tau, model.C, sol.K, sol.Phi)


def iss_submodel(model: IssModel, keep) -> SsModel:
    """General-form model of the channels ``keep`` of an innovations form.

    Restricting the observation equation to a channel subset leaves the
    state equation untouched but turns the model into general form with

        Xi = K Phi K',  Psi = Phi[keep, keep],  Theta = K Phi[:, keep].

    ``keep`` must be strictly increasing 0-based channel indices.
    """
    keep = list(keep)
    M = model.obs_dim
    if len(keep) == 0:
        raise ValueError("keep must not be empty")
    if any(not 0 <= c < M for c in keep):
        raise ValueError(f"channel indices must lie in 0..{M - 1}")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise ValueError("keep must be strictly increasing (no duplicates)")
    KPhi = model.K @ model.Phi
    Xi = KPhi @ model.K.T
    return SsModel(
        model.A,
        model.C[keep],
        0.5 * (Xi + Xi.T),
        model.Phi[np.ix_(keep, keep)],
        KPhi[:, keep],
    )
