import numpy as np
import pytest
from scipy.linalg import solve_discrete_lyapunov

from msgc import (
    FirFilter,
    TimeSeriesSet,
    apply_filter,
    averaging_filter,
    design_fir_hamming,
    downsample,
    downsample_iss,
    simulate_var,
    uni_config,
    build_benchmark,
    var_filter_to_iss,
)


# ------------------------------------------------------------------- design

def test_zero_order_filter_is_identity():
    filt = design_fir_hamming(0, 5)
    assert np.array_equal(filt.b, [1.0])
    assert filt.q == 0


def test_tau1_even_order_collapses_to_pure_delay():
    filt = design_fir_hamming(6, 1)
    assert np.array_equal(filt.b, [0, 0, 0, 1.0, 0, 0, 0])


def test_q6_tau2_shape_and_response():
    filt = design_fir_hamming(6, 2)
    b = filt.b
    assert np.max(np.abs(b - b[::-1])) < 1e-12
    assert abs(b.sum() - 1.0) < 1e-12
    h0 = abs(filt.response(0.0)[0])
    h_cut = abs(filt.response(0.25)[0])
    h_stop = abs(filt.response(0.45)[0])
    assert h_cut < h0
    assert h_cut > h_stop


@pytest.mark.parametrize("q", [2, 4, 6, 8, 7])
@pytest.mark.parametrize("tau", [2, 3, 5])
def test_design_symmetric(q, tau):
    b = design_fir_hamming(q, tau).b
    assert np.max(np.abs(b - b[::-1])) < 1e-12


@pytest.mark.parametrize("q", [0, 2, 4, 6, 8])
@pytest.mark.parametrize("tau", [1, 2, 3, 4, 7, 10])
def test_design_unit_dc_gain(q, tau):
    filt = design_fir_hamming(q, tau)
    assert abs(filt.b.sum() - 1.0) < 1e-12
    assert abs(abs(filt.response(0.0)[0]) - 1.0) < 1e-12


@pytest.mark.parametrize("tau", [2, 3, 4, 5, 6, 7, 8])
def test_design_attenuates_above_cutoff(tau):
    # stopband suppression for the default order; very coarse scales would
    # need a longer filter to keep the same margin
    filt = design_fir_hamming(6, tau)
    dc = abs(filt.response(0.0)[0])
    assert abs(filt.response(filt.cutoff)[0]) < dc
    grid = np.linspace(filt.cutoff + 0.1, 0.5, 200)
    assert np.mean(np.abs(filt.response(grid))) < 0.1 * dc


def test_averaging_filter_values():
    assert np.array_equal(averaging_filter(1).b, [1.0])
    assert np.array_equal(averaging_filter(2).b, [0.5, 0.5])
    assert np.array_equal(averaging_filter(4).b, [0.25] * 4)


def test_filter_validation():
    with pytest.raises(ValueError, match="sum to 1"):
        FirFilter(np.array([0.5, 0.6]), 0.25)
    with pytest.raises(ValueError, match="cutoff"):
        FirFilter(np.array([1.0]), 0.75)
    with pytest.raises(ValueError, match="at least one tap"):
        FirFilter(np.array([]), 0.25)


# ----------------------------------------------------------------- filtering

def test_apply_identity_filter():
    data = TimeSeriesSet(np.arange(12.0).reshape(6, 2), ("a", "b"))
    out = apply_filter(data, design_fir_hamming(0, 3))
    assert np.array_equal(out.values, data.values)


def test_apply_preserves_constants():
    data = TimeSeriesSet(np.full((30, 2), 3.5), ("a", "b"))
    out = apply_filter(data, design_fir_hamming(6, 2))
    assert out.n_samples == 24
    assert np.max(np.abs(out.values - 3.5)) < 1e-12


def test_apply_two_point_average_kills_nyquist():
    alternating = np.tile([1.0, -1.0], 20)[:, None]
    data = TimeSeriesSet(alternating, ("a",))
    out = apply_filter(data, averaging_filter(2))
    assert np.max(np.abs(out.values)) < 1e-12


def test_apply_is_linear():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((50, 2))
    y = rng.standard_normal((50, 2))
    filt = design_fir_hamming(6, 3)

    def f(v):
        return apply_filter(TimeSeriesSet(v, ("a", "b")), filt).values

    lhs = f(2.0 * x - 0.5 * y)
    rhs = 2.0 * f(x) - 0.5 * f(y)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_apply_rejects_short_input():
    data = TimeSeriesSet(np.zeros((4, 1)), ("a",))
    with pytest.raises(ValueError, match="q=6"):
        apply_filter(data, design_fir_hamming(6, 2))


def test_apply_alignment_matches_definition():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((20, 1))
    filt = design_fir_hamming(4, 2)
    out = apply_filter(TimeSeriesSet(x, ("a",)), filt).values
    n = 7  # output row n corresponds to input row n + q
    manual = sum(filt.b[l] * x[n + 4 - l, 0] for l in range(5))
    assert abs(out[n, 0] - manual) < 1e-14


# --------------------------------------------------------------- downsampling

def test_downsample_identity():
    data = TimeSeriesSet(np.arange(10.0)[:, None], ("a",))
    assert np.array_equal(downsample(data, 1).values, data.values)


def test_downsample_keeps_phase_zero_rows():
    data = TimeSeriesSet(np.arange(10.0)[:, None], ("a",))
    out = downsample(data, 3)
    assert np.array_equal(out.values[:, 0], [0.0, 3.0, 6.0, 9.0])
    assert out.n_samples == 4


def test_downsample_ramp():
    data = TimeSeriesSet(np.arange(8.0)[:, None], ("a",), dt=0.5)
    out = downsample(data, 2)
    assert np.array_equal(out.values[:, 0], [0.0, 2.0, 4.0, 6.0])
    assert out.dt == 1.0


def test_downsampled_covariance_matches_state_space_model():
    # data route (filter + decimate a long simulation) against the
    # parameter route (downsampled innovations form)
    model = build_benchmark(uni_config())
    tau, q = 3, 6
    filt = design_fir_hamming(q, tau)
    data = simulate_var(model, 400_000, seed=12)
    coarse = downsample(apply_filter(data, filt), tau)
    x = coarse.values - coarse.values.mean(axis=0)
    sample_cov = x.T @ x / len(x)

    iss = downsample_iss(var_filter_to_iss(model, filt), tau)
    state_cov = solve_discrete_lyapunov(iss.A, iss.K @ iss.Phi @ iss.K.T)
    theory = iss.C @ state_cov @ iss.C.T + iss.Phi
    assert np.max(np.abs(sample_cov - theory)) / np.max(np.abs(theory)) < 0.02
