"""Change-of-scale filtering and downsampling.

Observing a process at scale ``tau`` means lowpass filtering at the
anti-alias cutoff ``1/(2*tau)`` (sampling rate normalized to 1, so Nyquist
is 0.5) and keeping every ``tau``-th sample. Filters are causal
(one-sided) on purpose: two-sided filtering would mix past and future
samples and corrupt directed measures computed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .var_model import TimeSeriesSet

__all__ = [
    "FirFilter",
    "design_fir_hamming",
    "averaging_filter",
    "apply_filter",
    "downsample",
]


@dataclass(frozen=True)
class FirFilter:
    """Causal FIR filter with unit DC gain.

    ``b`` holds the q+1 coefficients b_0..b_q; ``cutoff`` is the nominal
    normalized cutoff frequency in (0, 0.5]. Coefficients must sum to 1
    within 1e-12 so constant signals pass unchanged. ``b[0]`` may be zero
    (the taps then start with a pure delay); the state-space embedding
    reduces such filters to their delay-free core.
    """

    b: np.ndarray
    cutoff: float

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if b.ndim != 1 or b.size < 1:
            raise ValueError("b must be a 1-d array with at least one tap")
        if not np.all(np.isfinite(b)):
            raise ValueError("filter coefficients must be finite")
        if abs(b.sum() - 1.0) > 1e-12:
            raise ValueError(f"coefficients must sum to 1 (got {b.sum()!r})")
        if not np.any(b != 0.0):
            raise ValueError("filter must have at least one nonzero tap")
        if not 0.0 < self.cutoff <= 0.5:
            raise ValueError("cutoff must lie in (0, 0.5]")
        object.__setattr__(self, "b", b)

    @property
    def q(self) -> int:
        """Filter order (number of taps minus one)."""
        return self.b.size - 1

    def response(self, freqs) -> np.ndarray:
        """Complex frequency response at normalized frequencies ``freqs``."""
        freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
        lags = np.arange(self.b.size)
        return (self.b[None, :] * np.exp(-2j * np.pi * freqs[:, None] * lags)).sum(axis=1)


def _sinc(x: np.ndarray) -> np.ndarray:
    """Normalized sinc with exact zeros at nonzero integer arguments.

    np.sinc evaluates sin(pi*k)/(pi*k) to ~1e-17 instead of 0 at integer k;
    those residuals would otherwise end up as spurious filter taps.
    """
    x = np.asarray(x, dtype=float)
    out = np.sinc(x)
    integral = x == np.round(x)
    return np.where(integral, np.where(x == 0.0, 1.0, 0.0), out)


def design_fir_hamming(q: int, tau: int) -> FirFilter:
    """Design the order-q Hamming windowed-sinc lowpass for scale ``tau``.

    The cutoff is the anti-alias frequency 1/(2*tau); taps are

        b_l = w_l * sinc(2 * f_c * (l - q/2)),   l = 0..q,

    with the Hamming window w_l = 0.54 - 0.46*cos(2*pi*l/q) (w_0 = 1 when
    q = 0), rescaled to unit coefficient sum. At tau = 1 and even q the
    sampled sinc collapses to a pure delay of q/2 samples.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    if tau < 1:
        raise ValueError("tau must be >= 1")
    cutoff = 1.0 / (2.0 * tau)
    lags = np.arange(q + 1, dtype=float)
    if q == 0:
        window = np.ones(1)
    else:
        window = 0.54 - 0.46 * np.cos(2.0 * np.pi * lags / q)
    b = window * _sinc(2.0 * cutoff * (lags - q / 2.0))
    return FirFilter(b / b.sum(), cutoff)


def averaging_filter(tau: int) -> FirFilter:
    """The classic coarse-graining filter: q = tau - 1, all taps 1/tau."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    return FirFilter(np.full(tau, 1.0 / tau), 1.0 / (2.0 * tau))


def apply_filter(data: TimeSeriesSet, filt: FirFilter) -> TimeSeriesSet:
    """Filter every channel causally; rows with incomplete history are
    dropped, so the output has N - q rows (row n of the output is
    sum_l b_l * input[n + q - l])."""
    n = data.n_samples
    q = filt.q
    if n <= q:
        raise ValueError(f"need more than q={q} samples, got {n}")
    values = data.values
    out = np.zeros((n - q, data.n_channels))
    for lag, coeff in enumerate(filt.b):
        if coeff != 0.0:
            out += coeff * values[q - lag: n - lag]
    return TimeSeriesSet(out, data.labels, data.dt)


def downsample(data: TimeSeriesSet, tau: int) -> TimeSeriesSet:
    """Keep rows 0, tau, 2*tau, ... (phase fixed at 0 for determinism).

    The output has ceil(N / tau) rows and the sampling interval is
    multiplied by tau.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if data.n_samples < tau:
        raise ValueError(f"need at least tau={tau} samples, got {data.n_samples}")
    dt = None if data.dt is None else data.dt * tau
    return TimeSeriesSet(data.values[::tau], data.labels, dt)
