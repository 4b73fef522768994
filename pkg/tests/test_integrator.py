"""Adaptive Dormand-Prince integrator, stiffness handling and the convergence probe."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from cvlab.dynamics import SystemParams, build_model
from cvlab.errors import InvalidArgument, StiffnessFailure
from cvlab.gaussian import SqueezeSpec, prepare_squeezed_coherent
from cvlab.integrator import (
    DP_A,
    DP_B,
    DP_C,
    DP_E,
    DP_P,
    PROBE_THRESHOLDS,
    IntegratorConfig,
    compare_runs,
    convergence_probe,
    integrate,
    refined_config,
)


def test_tableau_consistency():
    np.testing.assert_allclose(DP_A.sum(axis=1), DP_C, atol=1e-15)
    assert DP_B.sum() == pytest.approx(1.0, abs=1e-15)
    assert DP_E.sum() == pytest.approx(0.0, abs=1e-15)
    # the continuous extension reproduces the 5th-order weights at θ = 1
    np.testing.assert_allclose(DP_P.sum(axis=1)[:6], DP_B, atol=1e-14)
    assert DP_P.sum(axis=1)[6] == pytest.approx(0.0, abs=1e-14)


def test_rotation_at_tight_tolerance():
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, horizon=50.0, sample_dt=0.05)
    traj = integrate(lambda t, y: 1j * y, np.array([1.0 + 0j]), cfg)
    exact = np.exp(1j * traj.times)
    assert np.max(np.abs(traj.states[:, 0] - exact)) < 1e-9
    # modulus is conserved by the exact flow
    assert np.max(np.abs(np.abs(traj.states[:, 0]) - 1)) < 1e-9


def test_sample_grid_is_exact():
    cfg = IntegratorConfig(horizon=1.0, sample_dt=0.1)
    traj = integrate(lambda t, y: -y, np.ones(1, complex), cfg)
    np.testing.assert_array_equal(traj.times, np.arange(11) * 0.1)
    np.testing.assert_allclose(traj.states[:, 0].real, np.exp(-traj.times), rtol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3.0, 0.5), st.floats(-5.0, 5.0))
def test_scalar_linear_flow(re, im):
    lam = re + 1j * im
    cfg = IntegratorConfig(horizon=3.0, sample_dt=0.1)
    traj = integrate(lambda t, y: lam * y, np.array([1.0 + 0j]), cfg)
    exact = np.exp(lam * traj.times)
    assert np.max(np.abs(traj.states[:, 0] - exact) / np.maximum(1, np.abs(exact))) < 1e-8


def test_matrix_flow_against_expm():
    rng = np.random.default_rng(7)
    K = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) - 3 * np.eye(4)
    y0 = rng.normal(size=4) + 0j
    cfg = IntegratorConfig(horizon=2.0, sample_dt=0.5)
    traj = integrate(lambda t, y: K @ y, y0, cfg)
    for t, y in zip(traj.times, traj.states):
        np.testing.assert_allclose(y, expm(K * t) @ y0, atol=1e-9)


def test_stiff_problem_switches_to_implicit():
    cfg = IntegratorConfig(horizon=1.0, sample_dt=0.1, stiff_threshold=20)
    traj = integrate(lambda t, y: -1e6 * (y - np.cos(t)), np.array([1.0 + 0j]), cfg)
    assert traj.step_stats["stiff_switch_time"] is not None
    np.testing.assert_allclose(traj.states[:, 0].real, np.cos(traj.times), atol=1e-5)


def test_blow_up_raises_with_time():
    cfg = IntegratorConfig(horizon=2.0, sample_dt=0.1, stiff_fallback=False)
    with pytest.raises(StiffnessFailure) as info:
        integrate(lambda t, y: y * y, np.array([1.0 + 0j]), cfg)
    assert info.value.time == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("kwargs", [
    {"rel_tol": 0.0}, {"abs_tol": -1.0}, {"sample_dt": 0.0}, {"sample_dt": 200.0},
    {"max_step": 0.0}, {"stiff_threshold": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(InvalidArgument):
        IntegratorConfig(**kwargs)


def test_non_finite_initial_state():
    with pytest.raises(InvalidArgument):
        integrate(lambda t, y: y, np.array([np.nan + 0j]))


def test_refined_config():
    cfg = IntegratorConfig(sample_dt=0.02)
    fine = refined_config(cfg)
    assert fine.sample_dt == 0.01
    assert fine.rel_tol == pytest.approx(cfg.rel_tol * 1e-2)
    assert fine.abs_tol == pytest.approx(cfg.abs_tol * 1e-2)
    assert fine.horizon == cfg.horizon


def test_probe_on_bare_rhs():
    cfg = IntegratorConfig(horizon=5.0, sample_dt=0.1)
    rep = convergence_probe(lambda t, y: 1j * y, np.array([1.0 + 0j]), cfg)
    assert rep.passed
    assert rep.max_dEN < 1e-8
    assert set(rep.as_dict()) == {"max_dEN", "max_dDB", "integrated", "passed"}


def test_probe_detects_a_coarse_run():
    cfg = IntegratorConfig(rel_tol=1e-3, abs_tol=1e-3, horizon=20.0, sample_dt=0.5, max_step=5.0)
    coarse = integrate(lambda t, y: 3j * y, np.array([1.0 + 0j]), cfg)
    fine = integrate(lambda t, y: 3j * y, np.array([1.0 + 0j]), refined_config(refined_config(cfg)))
    rep = compare_runs(coarse, fine)
    assert not rep.passed
    assert rep.max_dEN > PROBE_THRESHOLDS["max_dEN"]


def test_model_probe_monitors_entanglement():
    model = build_model("markov", SystemParams())
    y0 = model.initial_vector(prepare_squeezed_coherent(SqueezeSpec(1.0, 0.5)))
    cfg = IntegratorConfig(horizon=20.0, sample_dt=0.05)
    traj = integrate(model, y0, cfg)
    assert traj.physicality_log["ok"].all()
    rep = convergence_probe(model, y0, cfg, reference=traj)
    assert rep.passed, rep.as_dict()


def test_compiled_and_python_kernels_agree():
    model = build_model("markov", SystemParams(delta_AB=-0.3))
    y0 = model.initial_vector(prepare_squeezed_coherent(SqueezeSpec(0.4, -0.2)))
    cfg = IntegratorConfig(horizon=5.0, sample_dt=0.1)
    a = integrate(model, y0, cfg)
    kernel = getattr(model.rhs, "py_func", model.rhs)
    b = integrate(lambda t, y: kernel(t, y, model.params), y0, cfg)
    np.testing.assert_allclose(a.states, b.states, atol=1e-11)
