import math
import warnings

import numpy as np
import pytest

import oracles
from sdmafit import (DataSet, FitSpec, LmConfig, MaBlock, MaParams,
                     NumericalError, SdmaParams, SoftParam, fit, fit_dma,
                     fit_ma, fit_sdma, init_ma, predict, rms_error,
                     sample_grid_2d, to_gamma)
from sdmafit import fitting


def grid_data(f, lo=-1.0, hi=1.0, count=41):
    return sample_grid_2d(f, lo, hi, count)


def test_rms_error_definition():
    data = DataSet(x=np.array([[0.0], [1.0], [2.0]]), y=np.zeros(3))
    block = MaBlock(b=[0.5], a=[[0.0]])
    # residuals all equal to r give exactly |r|
    assert math.isclose(rms_error(MaParams(block=block), data), 0.5,
                        rel_tol=1e-15)
    exact = MaBlock(b=[0.0], a=[[0.0]])
    assert rms_error(MaParams(block=exact), data) == 0.0


def test_init_ma_single_plane_is_global_least_squares():
    rng = np.random.default_rng(2)
    data = DataSet(x=rng.normal(0, 1, (30, 2)), y=rng.normal(0, 1, 30))
    block = init_ma(data, 1, np.random.default_rng(0))
    A = np.hstack([np.ones((30, 1)), data.x])
    exact = oracles.lstsq_gamma(A, data.y)
    assert abs(block.b[0] - exact[0]) < 1e-10
    assert np.max(np.abs(block.a[0] - exact[1:])) < 1e-10


def test_init_ma_one_point_per_plane_uses_min_norm_interpolation():
    rng = np.random.default_rng(4)
    data = DataSet(x=rng.normal(0, 1, (6, 2)), y=rng.normal(0, 1, 6))
    block = init_ma(data, 6, np.random.default_rng(1))
    got = sorted((float(block.b[j]), *block.a[j]) for j in range(6))
    want = []
    for i in range(6):
        b, a = oracles.min_norm_plane(data.x[i], data.y[i])
        want.append((float(b), *a))
    want.sort()
    for g, w in zip(got, want):
        assert np.max(np.abs(np.array(g) - np.array(w))) < 1e-10


def test_init_ma_linear_data_recovers_the_line():
    data = grid_data(lambda x: 2.0 * x + 1.0)
    block = init_ma(data, 1, np.random.default_rng(0))
    assert abs(block.b[0] - 1.0) < 1e-10
    assert abs(block.a[0, 0] - 2.0) < 1e-10
    # several planes: every multi-point cell refits the same line
    block3 = init_ma(data, 3, np.random.default_rng(0))
    assert np.max(np.abs(block3.b - 1.0)) < 1e-6
    assert np.max(np.abs(block3.a - 2.0)) < 1e-6


def test_init_ma_more_planes_than_points_still_returns_a_block():
    data = DataSet(x=np.array([[0.0], [1.0], [2.0]]), y=np.array([0., 1., 4.]))
    block = init_ma(data, 5, np.random.default_rng(3))
    assert block.k_terms == 5
    assert np.all(np.isfinite(block.b)) and np.all(np.isfinite(block.a))


def test_fit_ma_constant_data_single_plane():
    data = grid_data(lambda x: 3.25)
    block = fit_ma(data, 1, np.random.default_rng(0))
    assert rms_error(MaParams(block=block), data) < 1e-10
    assert abs(block.b[0] - 3.25) < 1e-8
    assert abs(block.a[0, 0]) < 1e-8


def test_fit_ma_absolute_value_is_near_exact():
    data = grid_data(abs)
    block = fit_ma(data, 2, np.random.default_rng(0))
    assert rms_error(MaParams(block=block), data) < 1e-6


def test_fit_ma_parabola_reaches_chord_grade_error():
    data = grid_data(lambda x: x * x)
    xs = data.x[:, 0]
    achievable = oracles.centered_chord_ma_rms(lambda x: x * x, -1.0, 1.0,
                                               5, xs)
    assert achievable < 0.02  # the threshold is attainable by construction
    result = fit(data, FitSpec(function_class="ma", k_terms=5, restarts=5,
                               rng_seed=0))
    assert result.rms_error < 0.02


def test_fit_ma_linear_data_any_order():
    data = grid_data(lambda x: 2.0 * x + 1.0)
    for k in (1, 2, 3):
        block = fit_ma(data, k, np.random.default_rng(k))
        assert rms_error(MaParams(block=block), data) < 1e-8


def test_fit_recovers_known_max_affine():
    truth = MaBlock(b=[0.3, -0.2], a=[[1.5], [-0.8]])
    xs = np.linspace(-1.5, 1.5, 60).reshape(-1, 1)
    data = DataSet(x=xs, y=predict(MaParams(block=truth), xs))
    result = fit(data, FitSpec(function_class="ma", k_terms=2, restarts=3,
                               rng_seed=1))
    assert result.rms_error < 1e-6


def test_fit_dma_concave_parabola():
    data = grid_data(lambda x: -x * x)
    params = fit_dma(data, 1, 5, np.random.default_rng(0))
    assert rms_error(params, data) < 0.02


def test_fit_dma_linear_data():
    data = grid_data(lambda x: -0.7 * x + 0.2)
    for k, m in ((1, 1), (2, 2)):
        params = fit_dma(data, k, m, np.random.default_rng(k))
        assert rms_error(params, data) < 1e-8


def test_fit_sdma_softplus():
    # log(1 + e^x) is exactly a two-plane log-sum-exp at unit softness
    # minus a constant block, so two soft planes suffice
    data = grid_data(lambda x: math.log1p(math.exp(x)), lo=-4.0, hi=4.0,
                     count=81)
    params = fit_sdma(data, 2, 1, np.random.default_rng(0))
    assert rms_error(params, data) < 1e-3


def test_sdma_final_cost_never_exceeds_its_seed():
    data = grid_data(lambda x: math.log1p(math.exp(x)), lo=-2.0, hi=2.0)
    dma = fit_dma(data, 2, 1, np.random.default_rng(9))
    soft = SoftParam(log_alpha=math.log(10.0))
    seed = SdmaParams(convex=dma.convex, soft_convex=soft,
                      concave=dma.concave, soft_concave=soft)
    seed_rms = rms_error(seed, data)
    # the same generator seed replays the identical difference-fit stage
    final = fit_sdma(data, 2, 1, np.random.default_rng(9))
    assert rms_error(final, data) <= seed_rms + 1e-12


def test_fit_is_bitwise_deterministic():
    data = grid_data(abs)
    spec = FitSpec(function_class="sdma", k_terms=2, m_terms=1, restarts=2,
                   rng_seed=3)
    r1 = fit(data, spec)
    r2 = fit(data, spec)
    assert np.array_equal(to_gamma(r1.params), to_gamma(r2.params))
    assert r1.restart_costs == r2.restart_costs
    assert r1.best_restart_index == r2.best_restart_index
    assert r1.rms_error == r2.rms_error


def test_restart_bookkeeping_is_consistent():
    data = grid_data(lambda x: x * x)
    result = fit(data, FitSpec(function_class="ma", k_terms=3, restarts=4,
                               rng_seed=0))
    costs = result.restart_costs
    assert len(costs) == 4
    assert result.best_restart_index == int(np.argmin(costs))
    implied = math.sqrt(min(costs) / data.n_points)
    assert math.isclose(result.rms_error, implied, rel_tol=1e-12)
    # the stored error agrees with recomputing it from the model
    assert math.isclose(result.rms_error, rms_error(result.params, data),
                        rel_tol=1e-9, abs_tol=1e-12)


def test_failed_restart_recorded_as_inf(monkeypatch):
    data = grid_data(abs)
    real = fitting._run_restart

    def flaky(d, spec, restart):
        if restart == 0:
            raise NumericalError("injected failure")
        return real(d, spec, restart)

    monkeypatch.setattr(fitting, "_run_restart", flaky)
    result = fit(data, FitSpec(function_class="ma", k_terms=2, restarts=3,
                               rng_seed=0))
    assert result.restart_costs[0] == math.inf
    assert result.best_restart_index != 0
    assert math.isfinite(result.rms_error)


def test_all_restarts_failing_propagates_the_error(monkeypatch):
    data = grid_data(abs)

    def always_fail(d, spec, restart):
        raise NumericalError("injected failure")

    monkeypatch.setattr(fitting, "_run_restart", always_fail)
    with pytest.raises(NumericalError):
        fit(data, FitSpec(function_class="ma", k_terms=2, restarts=3,
                          rng_seed=0))


def test_underdetermined_data_warns():
    xs = np.linspace(-1.0, 1.0, 4).reshape(-1, 1)
    data = DataSet(x=xs, y=np.abs(xs[:, 0]))
    spec = FitSpec(function_class="ma", k_terms=2, restarts=1, rng_seed=0)
    with pytest.warns(UserWarning, match="underdetermined"):
        fit(data, spec)

    xs = np.linspace(-1.0, 1.0, 11).reshape(-1, 1)
    data = DataSet(x=xs, y=np.abs(xs[:, 0]))
    with pytest.warns(UserWarning, match="fewer than 3 points"):
        fit(data, spec)

    xs = np.linspace(-1.0, 1.0, 12).reshape(-1, 1)
    data = DataSet(x=xs, y=np.abs(xs[:, 0]))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fit(data, spec)


def test_fit_spec_validation():
    with pytest.raises(ValueError):
        FitSpec(function_class="smax", k_terms=2)
    with pytest.raises(ValueError):
        FitSpec(function_class="ma", k_terms=0)
    with pytest.raises(ValueError):
        FitSpec(function_class="dma", k_terms=1, m_terms=0)
    with pytest.raises(ValueError):
        FitSpec(function_class="ma", k_terms=1, restarts=0)
    with pytest.raises(ValueError):
        FitSpec(function_class="ma", k_terms=1, rng_seed=-1)


def test_fit_accepts_custom_solver_settings():
    data = grid_data(abs, count=21)
    spec = FitSpec(function_class="ma", k_terms=2, restarts=1, rng_seed=0,
                   lm=LmConfig(max_iterations=1))
    result = fit(data, spec)  # must not raise even with a starved solver
    assert math.isfinite(result.rms_error)
