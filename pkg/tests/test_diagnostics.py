"""Time-series diagnostics: witness, averages, deviations, maxima, onsets."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvlab.diagnostics import (
    WitnessConfig,
    antipodal_pair,
    bures_series,
    en_series,
    nu_tilde_series,
    prominent_maxima,
    relative_deviation,
    separability_onset,
    time_avg_en,
    witness_from_series,
    witness_N,
)
from cvlab.dynamics import OUKernel, SystemParams, build_model
from cvlab.errors import InvalidArgument
from cvlab.gaussian import (
    QuadratureState,
    SqueezeSpec,
    antipodal_bures_batch,
    bures_distance,
    prepare_squeezed_coherent,
)
from cvlab.integrator import IntegratorConfig, integrate

series = st.lists(st.floats(0.0, 2.0), min_size=2, max_size=60)


def test_witness_of_monotone_series_is_zero():
    assert witness_from_series(np.linspace(1.0, 0.0, 50)) == 0.0
    assert witness_from_series([0.5, 0.7, 0.6, 0.9]) == pytest.approx(0.5)


@settings(max_examples=60, deadline=None)
@given(series)
def test_witness_bounds(values):
    w = witness_from_series(values)
    inc = np.diff(values)
    assert w >= 0.0
    assert w >= max(0.0, values[-1] - values[0]) - 1e-12
    assert w == pytest.approx(np.sum(np.clip(inc, 0, None)))


def test_time_average():
    t = np.linspace(0.0, 10.0, 1001)
    assert time_avg_en(np.ones_like(t), 10.0, t) == pytest.approx(1.0)
    assert time_avg_en(t, 4.0, t) == pytest.approx(2.0)
    with pytest.raises(InvalidArgument):
        time_avg_en(t, 11.0, t)
    with pytest.raises(InvalidArgument):
        time_avg_en(t, 0.0, t)


def test_relative_deviation_masks_small_baseline():
    base = np.array([0.0, 0.005, 0.5, 1.0])
    test = np.array([1.0, 1.0, 0.55, 0.9])
    dev = relative_deviation(test, base, floor=0.01, times=np.arange(4.0))
    assert np.isnan(dev.percent[:2]).all()
    np.testing.assert_allclose(dev.percent[2:], [10.0, 10.0])
    assert dev.max_in(2.5, 3.5) == pytest.approx(10.0)
    assert np.isnan(dev.max_in(0.0, 1.0))
    with pytest.raises(InvalidArgument):
        relative_deviation(test, base[:3])


def test_prominent_maxima():
    t = np.linspace(0, 20, 2001)
    y = 1.2 * np.abs(np.sin(t / 2))
    tm, ym = prominent_maxima(y, t, height=0.9)
    np.testing.assert_allclose(tm, [np.pi, 3 * np.pi, 5 * np.pi], atol=0.05)
    assert np.all(ym > 0.9)


def test_separability_onset():
    x = np.array([0.0, 0.1, 0.2, 0.3])
    assert separability_onset(x, [1.0, 0.5, 0.0, 0.0]) == 0.2
    assert separability_onset(x, [0.0, 0.0, 0.0, 0.0]) == 0.0
    assert separability_onset(x, [1.0, 1.0, 1.0, 1.0]) is None


def test_antipodal_pair_shares_covariance():
    m = prepare_squeezed_coherent(SqueezeSpec(0.7, -0.3, 1 + 1j, -0.5j))
    plus, minus = antipodal_pair(m)
    from cvlab.gaussian import moments_to_quadrature
    qp, qm = moments_to_quadrature(plus), moments_to_quadrature(minus)
    np.testing.assert_allclose(qp.sigma, qm.sigma, atol=1e-13)
    np.testing.assert_allclose(qp.R, -qm.R, atol=1e-13)
    np.testing.assert_allclose(qp.R, moments_to_quadrature(m).R, atol=1e-13)
    R0 = np.array([1.0, 0.0, 0.0, -1.0])
    p2, _ = antipodal_pair(m, WitnessConfig(R0))
    np.testing.assert_allclose(moments_to_quadrature(p2).R, R0, atol=1e-13)
    with pytest.raises(InvalidArgument):
        WitnessConfig(sign=0)


def _pair(kind, system, kernel=None, horizon=10.0):
    model = build_model(kind, system, kernel)
    cfg = IntegratorConfig(horizon=horizon, sample_dt=0.1)
    plus, minus = antipodal_pair(prepare_squeezed_coherent(SqueezeSpec(1.0, -1.0)))
    return [integrate(model, model.initial_vector(m), cfg) for m in (plus, minus)]


def test_bures_series_equal_covariance_path():
    pair = _pair("markov", SystemParams(delta_AB=-0.5))
    db = bures_series(pair)
    R, sigma = pair[0].quadrature()
    np.testing.assert_allclose(db, antipodal_bures_batch(R, sigma), atol=1e-10)
    k = 37
    ref = bures_distance(QuadratureState(R[k], sigma[k]), QuadratureState(-R[k], sigma[k]))
    assert db[k] == pytest.approx(ref, abs=1e-8)


def test_markov_witness_vanishes():
    assert witness_N(_pair("markov", SystemParams(delta_AB=-1.0))) <= 1e-8


def test_structured_witness_is_finite():
    pair = _pair("o0", SystemParams(delta_AB=-1.0, delta_AE=0.1), OUKernel(0.5), horizon=30.0)
    assert witness_N(pair) > 1e-3


def test_series_helpers_need_a_model():
    traj = integrate(lambda t, y: -y, np.ones(1, complex), IntegratorConfig(horizon=1.0, sample_dt=0.5))
    with pytest.raises(InvalidArgument):
        en_series(traj)
    with pytest.raises(InvalidArgument):
        nu_tilde_series(traj)


def test_bures_series_grid_mismatch():
    a = _pair("markov", SystemParams(), horizon=2.0)[0]
    b = _pair("markov", SystemParams(), horizon=3.0)[0]
    with pytest.raises(InvalidArgument):
        bures_series((a, b))
