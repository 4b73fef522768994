"""Gaussian core: conversions, spectra, entanglement, fidelity, closed forms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvlab.errors import InvalidArgument, NonPhysicalState, NumericalDegeneracy
from cvlab.gaussian import (
    DEFAULT_DISPLACEMENT,
    LadderMoments,
    QuadratureState,
    SqueezeSpec,
    analytic_thermal_cutoff,
    antipodal_bures_batch,
    bright_dark_transform,
    bures_distance,
    check_physical,
    equal_covariance_fidelity,
    fidelity,
    log_negativity,
    log_negativity_batch,
    moments_to_quadrature,
    physicality_batch,
    prepare_squeezed_coherent,
    pt_nu_min,
    pt_nu_min_batch,
    simon_threshold,
    steady_covariance,
    steady_symplectic_eigs,
    symplectic_form,
    symplectic_spectrum,
)

squeeze = st.floats(-1.5, 1.5)
small = st.floats(-2.0, 2.0)


def tmsv(r):
    """Two-mode squeezed vacuum in (x_a, x_b, p_a, p_b) ordering; E_N = 2r."""
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    sigma = 0.5 * np.array([[c, s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, -s, c]])
    return QuadratureState(np.zeros(4), sigma)


def local_rotation(ta, tb):
    """Symplectic phase rotation on each mode."""
    S = np.zeros((4, 4))
    for k, t in ((0, ta), (1, tb)):
        c, s = np.cos(t), np.sin(t)
        S[k, k], S[k, k + 2], S[k + 2, k], S[k + 2, k + 2] = c, s, -s, c
    return S


# ---------------------------------------------------------------------------
# frozen values


def test_vacuum_is_minimal():
    q = QuadratureState.vacuum(2)
    np.testing.assert_allclose(symplectic_spectrum(q.sigma), [0.5, 0.5], atol=1e-14)
    assert log_negativity(q) == 0.0
    assert check_physical(q).ok


def test_symplectic_form_layout():
    J = symplectic_form(2)
    np.testing.assert_array_equal(J @ J, -np.eye(4))
    assert J[0, 2] == 1 and J[2, 0] == -1
    with pytest.raises(InvalidArgument):
        symplectic_form(0)


def test_positive_squeezing_squeezes_x():
    q = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(0.7, -0.3, 0j, 0j)))
    np.testing.assert_allclose(np.diag(q.sigma),
                               0.5 * np.exp([-1.4, 0.6, 1.4, -0.6]), rtol=1e-13)


def test_coherent_mean_vector():
    q = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(0.0, 0.0, 1 + 2j, -0.5j)))
    np.testing.assert_allclose(q.R, np.sqrt(2) * np.array([1.0, 0.0, 2.0, -0.5]), atol=1e-14)
    np.testing.assert_allclose(q.sigma, 0.5 * np.eye(4), atol=1e-14)


def test_default_displacement():
    assert abs(DEFAULT_DISPLACEMENT) == pytest.approx(np.sqrt(5))
    assert np.angle(DEFAULT_DISPLACEMENT) == pytest.approx(np.pi / 4)


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 1.7])
def test_tmsv_negativity(r):
    assert log_negativity(tmsv(r)) == pytest.approx(2 * r, abs=1e-12)
    assert pt_nu_min(tmsv(r).sigma) == pytest.approx(0.5 * np.exp(-2 * r), rel=1e-10)


def test_nonphysical_state_rejected():
    sigma = 0.2 * np.eye(4)
    with pytest.raises(NonPhysicalState) as info:
        log_negativity(QuadratureState(np.zeros(4), sigma))
    assert not info.value.report.bona_fide


def test_asymmetric_covariance_rejected():
    sigma = 0.5 * np.eye(4)
    sigma[0, 1] = 1e-6
    with pytest.raises(InvalidArgument):
        symplectic_spectrum(sigma)
    assert not check_physical(QuadratureState(np.zeros(4), sigma)).is_symmetric


def test_shape_mismatch():
    with pytest.raises(InvalidArgument):
        QuadratureState(np.zeros(3), np.eye(3))


def test_simon_threshold_frozen():
    assert simon_threshold(1.0) == pytest.approx(-0.5 * np.log(2 - np.exp(-2)), abs=1e-15)
    assert simon_threshold(1.0) == pytest.approx(-0.3115406302, abs=1e-9)
    assert simon_threshold(1.0, "negative") is None
    assert simon_threshold(-1.0, "negative") == pytest.approx(0.3115406302, abs=1e-9)
    with pytest.raises(InvalidArgument):
        simon_threshold(0.0, "sideways")


def test_steady_state_frozen_values():
    # aligned s=1: ν̃₋ = e^{-1}/2, so E_N = 1 exactly
    assert log_negativity(steady_covariance(1.0, 1.0)) == pytest.approx(1.0, abs=1e-12)
    nu = np.sqrt(np.e**2 + np.e) * np.exp(-1.5) / (2 * np.sqrt(2))
    assert log_negativity(steady_covariance(1.0, 0.5)) == pytest.approx(-np.log(2 * nu), abs=1e-12)
    assert log_negativity(steady_covariance(1.0, 0.5)) == pytest.approx(0.690, abs=1e-3)
    assert log_negativity(steady_covariance(1.0, -0.5)) == 0.0


def test_steady_eigs_match_numeric_spectrum():
    for sa, sb in [(1.0, 1.0), (1.0, 0.5), (0.3, -0.2), (-0.7, -0.4)]:
        closed = min(steady_symplectic_eigs(sa, sb))
        assert closed == pytest.approx(pt_nu_min(steady_covariance(sa, sb).sigma), rel=1e-10)


def test_analytic_thermal_cutoff_frozen():
    assert analytic_thermal_cutoff(0.5, 0.5) == pytest.approx(0.5 * (np.e - 1), abs=1e-12)
    assert analytic_thermal_cutoff(0.5, 0.5) == pytest.approx(0.859, abs=1e-3)
    assert analytic_thermal_cutoff(1.0, -0.5) == 0.0


def test_fidelity_degenerate_sum():
    q = QuadratureState(np.zeros(4), np.diag([1e-14, 1, 1, 1]))
    with pytest.raises(NumericalDegeneracy):
        fidelity(q, q)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=60, deadline=None)
@given(squeeze, squeeze, small, small, small, small)
def test_input_state_is_physical_and_separable(sa, sb, ar, ai, br, bi):
    q = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(sa, sb, ar + 1j * ai, br + 1j * bi)))
    assert check_physical(q).ok
    np.testing.assert_allclose(symplectic_spectrum(q.sigma), [0.5, 0.5], atol=1e-9)
    assert log_negativity(q) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.5), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_negativity_invariant_under_local_rotations(r, ta, tb):
    S = local_rotation(ta, tb)
    rotated = QuadratureState(np.zeros(4), S @ tmsv(r).sigma @ S.T)
    assert log_negativity(rotated) == pytest.approx(2 * r, abs=1e-9)


def two_mode_squeezer(r):
    c, s = np.cosh(r), np.sinh(r)
    return np.array([[c, s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, -s, c]])


@settings(max_examples=60, deadline=None)
@given(squeeze, squeeze, st.floats(0, 2 * np.pi), st.floats(0.0, 1.2), st.floats(0.0, 2.0))
def test_batch_and_single_spectrum_paths_agree(sa, sb, theta, r, n_th):
    # product input, beam splitter, two-mode squeezer, then thermal noise
    q = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(sa, sb, 0j, 0j)))
    c, s = np.cos(theta), np.sin(theta)
    B = np.kron(np.eye(2), np.array([[c, s], [-s, c]]))
    S = two_mode_squeezer(r) @ B
    sigma = S @ q.sigma @ S.T + n_th * np.eye(4)
    sigma = 0.5 * (sigma + sigma.T)
    assert pt_nu_min_batch(sigma[None])[0] == pytest.approx(pt_nu_min(sigma), rel=1e-9)


def test_degenerate_spectrum_is_exact():
    # product inputs have ν̃₊ = ν̃₋ = 1/2; the batch path must not lose digits there
    sig = np.stack([0.5 * np.eye(4), 0.2 * np.eye(4),
                    moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(1.0, 1.0))).sigma])
    nu = pt_nu_min_batch(sig)
    np.testing.assert_allclose(nu, [0.5, 0.2, 0.5], rtol=1e-14)
    assert np.all(log_negativity_batch(sig[[0, 2]]) == 0.0)


@settings(max_examples=40, deadline=None)
@given(squeeze, squeeze, small, small, squeeze, squeeze, small, small)
def test_fidelity_axioms(sa, sb, a1, a2, ta, tb, b1, b2):
    q1 = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(sa, sb, a1 + 0j, a2 * 1j)))
    q2 = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(ta, tb, b1 + 0j, b2 * 1j)))
    f12 = fidelity(q1, q2)
    assert 0.0 <= f12 <= 1.0
    assert f12 == pytest.approx(fidelity(q2, q1), abs=1e-9)
    assert fidelity(q1, q1) == pytest.approx(1.0, abs=1e-9)
    assert bures_distance(q1, q1) == pytest.approx(0.0, abs=1e-4)


def test_pure_product_fidelity_closed_form():
    # coherent states: |<α|β>| = exp(-|α-β|²/2)
    q1 = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(0, 0, 0.3 + 0.1j, 0j)))
    q2 = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(0, 0, -0.2j, 0.5 + 0j)))
    d2 = abs(0.3 + 0.3j) ** 2 + 0.25
    assert fidelity(q1, q2) == pytest.approx(np.exp(-0.5 * d2), rel=1e-12)
    # squeezed vacua: |<0|S(r1)†S(r2)|0>| = 1/sqrt(cosh(r1 - r2))
    q3 = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(0.4, 0, 0j, 0j)))
    q4 = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(-0.3, 0, 0j, 0j)))
    assert fidelity(q3, q4) == pytest.approx(1 / np.sqrt(np.cosh(0.7)), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(squeeze, squeeze, small, small)
def test_antipodal_bures_matches_general_fidelity(sa, sb, ar, bi):
    q = moments_to_quadrature(prepare_squeezed_coherent(SqueezeSpec(sa, sb, ar + 0.3j, 0.2 + bi * 1j)))
    mirror = QuadratureState(-q.R, q.sigma)
    db = antipodal_bures_batch(q.R[None], q.sigma[None])[0]
    assert db == pytest.approx(bures_distance(q, mirror), abs=1e-7)
    assert equal_covariance_fidelity(q.sigma, q.R, -q.R) == pytest.approx(fidelity(q, mirror), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(squeeze, squeeze, small, small)
def test_bright_dark_is_involution(sa, sb, ar, br):
    m = prepare_squeezed_coherent(SqueezeSpec(sa, sb, ar + 0.1j, br - 0.4j))
    back = bright_dark_transform(bright_dark_transform(m))
    for a, b in zip(m.arrays(), back.arrays()):
        np.testing.assert_allclose(a, b, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(squeeze, squeeze)
def test_simon_threshold_separates_steady_states(sa, sb):
    en = log_negativity_batch(steady_covariance(sa, sb).sigma[None])[0]
    pos = simon_threshold(sa, "positive")
    neg = simon_threshold(sa, "negative")
    entangled = (pos is not None and sb > pos) or (neg is not None and sb < neg)
    margin = min(abs(sb - t) for t in (pos, neg) if t is not None) if (pos or neg) is not None else 1
    if margin > 1e-6:
        assert (en > 1e-12) == entangled


def test_physicality_batch_agrees_with_single():
    sig = np.stack([tmsv(0.3).sigma, 0.2 * np.eye(4), steady_covariance(1, 0.5).sigma])
    batch = physicality_batch(sig)
    for k in range(3):
        rep = check_physical(QuadratureState(np.zeros(4), sig[k]))
        assert bool(batch["ok"][k]) == rep.ok
        assert batch["nu_min"][k] == pytest.approx(rep.nu_min, rel=1e-10)


def test_ladder_round_trip():
    m = prepare_squeezed_coherent(SqueezeSpec(0.2, -0.4, 1 - 1j, 0.3j))
    again = LadderMoments.from_arrays(*m.arrays())
    assert again == m
