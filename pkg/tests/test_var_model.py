import numpy as np
import pytest

from msgc import (
    RankDeficiencyError,
    SimulationConfig,
    TimeSeriesSet,
    UnstableModelError,
    VarModel,
    bi_config,
    build_benchmark,
    check_stability,
    estimate_var,
    mix_config,
    select_order_bic,
    simulate_benchmark,
    simulate_var,
    uni_config,
)


# ---------------------------------------------------------------- containers

def test_timeseriesset_rejects_nonfinite():
    with pytest.raises(ValueError, match="row 1, column 0"):
        TimeSeriesSet(np.array([[0.0, 1.0], [np.nan, 2.0]]), ("a", "b"))


def test_timeseriesset_rejects_duplicate_labels():
    with pytest.raises(ValueError, match="distinct"):
        TimeSeriesSet(np.zeros((3, 2)), ("a", "a"))


def test_timeseriesset_select_reorders():
    data = TimeSeriesSet(np.array([[1.0, 2.0, 3.0]]), ("a", "b", "c"))
    sel = data.select(["c", "a"])
    assert sel.labels == ("c", "a")
    assert np.array_equal(sel.values, [[3.0, 1.0]])


def test_varmodel_requires_spd_sigma():
    with pytest.raises(ValueError, match="positive definite"):
        VarModel(np.zeros((1, 2, 2)), np.diag([1.0, 0.0]))
    with pytest.raises(ValueError, match="symmetric"):
        VarModel(np.zeros((1, 2, 2)), np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_simulation_config_validation():
    with pytest.raises(ValueError, match="generator"):
        SimulationConfig(generator="nope")
    with pytest.raises(ValueError, match="d21"):
        uni_config(d21=0)
    with pytest.raises(ValueError, match="rho_fast"):
        mix_config(rho_fast=1.0)
    with pytest.raises(ValueError, match="lambda_w1"):
        mix_config(lambda_w1=0.0)


# ---------------------------------------------------------------- benchmarks

def test_build_uni_coefficients(uni_model):
    # y1 drives y2 at lag 2; nothing flows back into y1
    assert uni_model.p == 2 and uni_model.M == 2
    assert uni_model.A[0][0, 0] == 0.5
    assert uni_model.A[1][1, 0] == 0.5
    assert np.all(uni_model.A[:, 0, 1] == 0.0)
    assert np.array_equal(uni_model.Sigma, np.eye(2))


def test_build_bi_coefficients(bi_model):
    assert bi_model.p == 7
    assert bi_model.A[1][0, 1] == 0.75   # y2 -> y1 at lag 2
    assert bi_model.A[6][1, 0] == 0.5    # y1 -> y2 at lag 7
    assert bi_model.A[0][0, 0] == bi_model.A[0][1, 1] > 0.0


def test_build_mix_coefficients(mix_model):
    assert mix_model.M == 4 and mix_model.p == 2
    # fast oscillator: printed reference coefficients
    assert abs(mix_model.A[0][2, 2] - 1.6929) < 1e-3
    assert abs(mix_model.A[1][2, 2] + 0.9025) < 1e-3
    # slow oscillator
    assert abs(mix_model.A[0][0, 0] - 1.9) < 1e-12
    assert abs(mix_model.A[1][0, 0] + 0.9025) < 1e-12
    assert np.allclose(np.diag(mix_model.Sigma), [0.25, 0.5, 1.0, 0.5])


def test_all_benchmarks_stable(uni_model, bi_model, mix_model):
    for model in (uni_model, bi_model, mix_model):
        assert check_stability(model) < 1.0


def test_check_stability_values(mix_model):
    diag = VarModel(0.5 * np.eye(2)[None, :, :], np.eye(2))
    assert abs(check_stability(diag) - 0.5) < 1e-12
    assert abs(check_stability(mix_model) - 0.95) < 1e-6
    unit_root = VarModel(np.eye(2)[None, :, :], np.eye(2))
    assert abs(check_stability(unit_root) - 1.0) < 1e-12
    assert not unit_root.is_stable


# ---------------------------------------------------------------- simulation

def test_simulate_no_dynamics_is_iid_normal():
    model = VarModel(np.zeros((1, 2, 2)), np.eye(2))
    data = simulate_var(model, 100_000, burn_in=0, seed=1)
    x = data.values
    assert np.max(np.abs(x.mean(axis=0))) < 0.02
    assert np.max(np.abs(x.var(axis=0) - 1.0)) < 0.02
    lag1 = np.abs(np.sum(x[1:] * x[:-1], axis=0) / (len(x) - 1))
    assert np.max(lag1) < 0.02


def test_simulate_uni_lagged_cross_correlation(uni_model):
    data = simulate_var(uni_model, 100_000, seed=2)
    y = data.values - data.values.mean(axis=0)
    n = len(y)

    def xcorr(a, b, lag):
        return np.corrcoef(a[: n - lag], b[lag:])[0, 1]

    # y2(n) = 0.5*y1(n-2) + u2: strong forward lag-2 correlation, none back
    assert xcorr(y[:, 0], y[:, 1], 2) > 0.3
    assert abs(xcorr(y[:, 1], y[:, 0], 2)) < 0.02


def test_simulate_ar1_autocorrelation():
    model = VarModel(0.5 * np.eye(2)[None, :, :], np.eye(2))
    data = simulate_var(model, 100_000, seed=3)
    y = data.values - data.values.mean(axis=0)
    for c in range(2):
        rho = np.corrcoef(y[:-1, c], y[1:, c])[0, 1]
        assert abs(rho - 0.5) < 0.01


def test_simulate_reproducible(uni_model):
    a = simulate_var(uni_model, 500, seed=9).values
    b = simulate_var(uni_model, 500, seed=9).values
    c = simulate_var(uni_model, 500, seed=10).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_simulate_rejects_unstable():
    model = VarModel(np.eye(2)[None, :, :], np.eye(2))
    with pytest.raises(UnstableModelError) as err:
        simulate_var(model, 100)
    assert abs(err.value.spectral_radius - 1.0) < 1e-12
    assert "radius" in str(err.value)


def test_simulate_benchmark_mix_is_bivariate():
    data = simulate_benchmark(mix_config(n_samples=300, seed=4))
    assert data.n_channels == 2
    assert data.labels == ("y1", "y2")
    assert data.n_samples == 300


# ------------------------------------------------------------ identification

def test_estimate_recovers_uni(uni_model):
    data = simulate_var(uni_model, 100_000, seed=5)
    fit = estimate_var(data, 2)
    assert np.max(np.abs(fit.A - uni_model.A)) < 0.02
    assert np.max(np.abs(fit.Sigma - np.eye(2))) < 0.02


@pytest.mark.parametrize("config", [uni_config(), bi_config(), mix_config()],
                         ids=["uni", "bi", "mix"])
def test_round_trip_recovery(config):
    model = build_benchmark(config)
    data = simulate_var(model, 100_000, seed=6)
    fit = estimate_var(data, model.p)
    assert np.max(np.abs(fit.A - model.A)) < 0.02


def test_estimate_overfit_extra_lags_near_zero():
    model = VarModel(0.9 * np.eye(2)[None, :, :], np.eye(2))
    data = simulate_var(model, 100_000, seed=7)
    fit = estimate_var(data, 3)
    assert np.max(np.abs(fit.A[1:])) < 0.02


def test_estimate_residuals_orthogonal_to_regressors(uni_model):
    n = 20_000
    data = simulate_var(uni_model, n, seed=8)
    fit = estimate_var(data, 2)
    y = data.values - data.values.mean(axis=0)
    X = np.hstack([y[2 - k: n - k] for k in (1, 2)])
    resid = y[2:] - X @ np.vstack([fit.A[0].T, fit.A[1].T])
    corr = X.T @ resid / n
    norm = np.outer(X.std(axis=0), resid.std(axis=0))
    assert np.max(np.abs(corr / norm)) < 3.0 / np.sqrt(n)


def test_estimate_rank_deficiency_names_channels():
    data = TimeSeriesSet(np.zeros((50, 2)), ("a", "b"))
    with pytest.raises(RankDeficiencyError) as err:
        estimate_var(data, 2)
    assert set(err.value.channels) == {0, 1}


def test_estimate_rejects_short_sample():
    data = TimeSeriesSet(np.random.default_rng(0).standard_normal((7, 2)), ("a", "b"))
    with pytest.raises(ValueError, match="N > M\\*p"):
        estimate_var(data, 3)


# ------------------------------------------------------------ order selection

def test_bic_selects_uni_order():
    hits = 0
    for seed in range(100):
        data = simulate_benchmark(uni_config(n_samples=5000, seed=1000 + seed))
        hits += select_order_bic(data, 10) == 2
    assert hits >= 90


def test_bic_selects_bi_order():
    hits = 0
    for seed in range(50):
        data = simulate_benchmark(bi_config(n_samples=5000, seed=2000 + seed))
        hits += select_order_bic(data, 12) == 7
    assert hits > 25


def test_bic_white_noise_picks_minimum():
    model = VarModel(np.zeros((1, 2, 2)), np.eye(2))
    hits = 0
    for seed in range(50):
        data = simulate_var(model, 5000, burn_in=0, seed=3000 + seed)
        hits += select_order_bic(data, 5) == 1
    assert hits > 25


def test_bic_rejects_short_sample():
    data = TimeSeriesSet(np.random.default_rng(1).standard_normal((20, 2)), ("a", "b"))
    with pytest.raises(ValueError, match="p_max"):
        select_order_bic(data, 10)
