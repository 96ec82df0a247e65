import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimerheat.errors import ToleranceError
from dimerheat.hamiltonians import DimerParams, excitation_energy_estimates
from dimerheat.semiclassical import (
    MeanFieldState,
    amplitude_closed_form,
    integrate_mean_field,
    is_phase_locked,
    mean_field_rhs,
    phase_plane,
    phase_rhs,
    stationary_residual,
    stationary_solutions,
    theta_rate,
)

amp = st.floats(-1.5, 1.5)


def test_free_rotation():
    st0 = MeanFieldState(0.6 + 0.2j, -0.3j)
    da, db = mean_field_rhs(st0, 1.3, 0.0, 0.0)
    assert da == pytest.approx(-1.3j * st0.a0)
    assert db == pytest.approx(-1.3j * st0.b0)


@given(amp, amp, amp, amp, st.floats(0, 2))
def test_xpm_keeps_mode_powers(ar, ai, br, bi, z):
    s = MeanFieldState(complex(ar, ai), complex(br, bi))
    da, db = mean_field_rhs(s, 1.0, 0.0, z)
    assert abs((np.conj(s.a0) * da).real) <= 1e-14
    assert abs((np.conj(s.b0) * db).real) <= 1e-14


def test_real_equal_amplitudes_are_power_stationary():
    s = MeanFieldState(0.7, 0.7)
    da, _ = mean_field_rhs(s, 1.0, 0.4, 0.0)
    assert abs((np.conj(s.a0) * da).real) <= 1e-15


@given(amp, amp, amp, amp, st.floats(0, 1), st.floats(0, 1))
def test_power_conservation(ar, ai, br, bi, y, z):
    s = MeanFieldState(complex(ar, ai), complex(br, bi))
    if s.total < 1e-3:
        return
    series = integrate_mean_field(s, 1.0, y, z, np.linspace(0, 50, 101))
    assert np.abs(series.total - s.total).max() <= 1e-8 * s.total


def test_power_drift_raises():
    with pytest.raises(ToleranceError):
        integrate_mean_field(MeanFieldState(1.0, 0.5j), 1.0, 0.9, 0.0, np.linspace(0, 50, 11), rtol=1e-3, atol=1e-3)


def test_sfwm_transfers_amplitude():
    s = MeanFieldState.from_polar(2.0, 1.4, np.pi / 4)
    series = integrate_mean_field(s, 1.0, 0.3, 0.0, np.linspace(0, 5, 51))
    assert np.ptp(series.r2) > 0.1


def test_synchronized_amplitudes_stay_put():
    s = MeanFieldState.from_polar(2.0, 1.0, np.pi / 2)
    series = integrate_mean_field(s, 1.0, 0.3, 0.0, np.linspace(0, 50, 101))
    assert np.abs(series.r2 - 1.0).max() <= 1e-8


def test_phase_rhs_examples():
    p = phase_rhs(1.0, 0.37, 1.0, 0.3, 0.2, 2.0)
    assert p.dtheta == pytest.approx(0.0, abs=1e-15)
    q = phase_rhs(np.sqrt(0.5), 1.1, 1.0, 0.0, 0.4, 2.0)
    assert q.dtheta == pytest.approx(-0.4 * (2.0 - 1.0))
    r = phase_rhs(np.sqrt(0.5), np.pi / 4, 1.0, 0.3, 0.0, 2.0)
    assert r.dtheta == pytest.approx(0.0, abs=1e-15)
    for bad in (0.0, np.sqrt(2.0), 2.0):
        with pytest.raises(ValueError):
            phase_rhs(bad, 0.1, 1.0, 0.3, 0.0, 2.0)


@given(st.floats(0.05, 0.95), st.floats(0, np.pi), st.floats(0, 1), st.floats(0, 1))
def test_phase_rhs_matches_field_equations(frac, theta, y, z):
    total = 1.7
    s = MeanFieldState.from_polar(total, frac * total, theta, phi_b=0.4)
    da, db = mean_field_rhs(s, 1.0, y, z)
    p = phase_rhs(s.r, theta, 1.0, y, z, total)
    assert (da / s.a0).imag == pytest.approx(p.dphi_a, abs=1e-12)
    assert (db / s.b0).imag == pytest.approx(p.dphi_b, abs=1e-12)


def test_closed_form_values():
    assert amplitude_closed_form(2.0, 0.3, np.pi / 2, 10.0) == pytest.approx(1.0)
    assert amplitude_closed_form(2.0, 0.3, 1.0, 0.0) == pytest.approx(1.0)
    assert amplitude_closed_form(2.0, 0.3, np.pi / 4, 1e3) == pytest.approx(0.0, abs=1e-300)


def test_logistic_law_from_perturbed_start():
    n, y, eps = 2.0, 0.3, 1e-3
    s = MeanFieldState.from_polar(n, n / 2 * (1 + eps), np.pi / 4)
    t = np.linspace(0, 1 / (4 * y * n), 101)
    series = integrate_mean_field(s, 1.0, y, 0.0, t)
    closed = amplitude_closed_form(n, y, np.pi / 4, t)
    assert np.abs(series.r2 / closed - 1).max() <= 0.02
    assert np.abs(series.theta - np.pi / 4).max() < 1e-9


def test_stationary_branches():
    e = sorted(b.energy for b in stationary_solutions(1.0, 0.3, 0.0, 2.0))
    assert e == pytest.approx([0.4, 1.0, 1.0, 1.6])
    xpm = stationary_solutions(1.0, 0.0, 0.4, 2.0)
    assert xpm[0].energy == pytest.approx(1.4) and xpm[0].thetas is None
    assert [b.energy for b in xpm if b.r == 0.0] == [1.0]
    with pytest.raises(ValueError):
        stationary_solutions(1.0, 0.3, 0.0, 0.0)


@pytest.mark.parametrize("y,z", [(0.3, 0.0), (0.0, 0.4), (0.25, 0.35), (0.0, 0.0)])
def test_stationary_branches_are_fixed_points(y, z):
    for branch in stationary_solutions(1.0, y, z, 2.0):
        assert stationary_residual(branch, 1.0, y, z, 2.0) <= 1e-12


def test_semiclassical_energies_share_quantum_sign_structure():
    y, n = 0.3, 2.0
    semi = sorted(b.energy - 1.0 for b in stationary_solutions(1.0, y, 0.0, n) if b.thetas)
    quantum = sorted(e - 1.0 for e in excitation_energy_estimates(DimerParams(y=y, kind="sfwm"), int(n)))
    assert np.sign(semi).tolist() == np.sign(quantum).tolist() == [-1.0, 1.0]


def test_xpm_has_no_locking_mechanism():
    plane = phase_plane(2.0, 0.0, 0.5)
    assert np.abs(plane.dtheta - plane.dtheta[0]).max() == 0
    s = MeanFieldState.from_polar(2.0, 0.6, 0.3)
    series = integrate_mean_field(s, 1.0, 0.0, 0.5, np.linspace(0, 40, 401))
    assert not is_phase_locked(series, 0.0, 0.5)


def test_sfwm_locking_detected():
    locked = MeanFieldState.from_polar(2.0, 1.0, 0.0)
    series = integrate_mean_field(locked, 1.0, 0.3, 0.0, np.linspace(0, 40, 401))
    assert is_phase_locked(series, 0.3, 0.0)
    assert np.allclose(theta_rate(series, 0.3, 0.0), 0, atol=1e-9)
    # the flow is conservative, so a generic start keeps oscillating
    drifting = MeanFieldState.from_polar(2.0, 1.0, 0.3)
    series = integrate_mean_field(drifting, 1.0, 0.3, 0.0, np.linspace(0, 40, 401))
    assert not is_phase_locked(series, 0.3, 0.0)
    with pytest.raises(ValueError):
        is_phase_locked(integrate_mean_field(locked, 1.0, 0.3, 0.0, np.linspace(0, 5, 11)), 0.3, 0.0)


def test_phase_plane_depends_on_theta_for_sfwm():
    plane = phase_plane(2.0, 0.3, 0.0, 21, 11)
    assert plane.dtheta.shape == (21, 11)
    assert np.ptp(plane.dtheta[:, 2]) > 0
    assert np.allclose(plane.dr2[:, [0, -1]], 0)


def test_state_properties():
    s = MeanFieldState.from_polar(3.0, 1.0, 0.5, phi_b=0.2)
    assert s.total == pytest.approx(3.0)
    assert s.r == pytest.approx(1.0)
    assert s.theta == pytest.approx(0.5)
    assert MeanFieldState.from_vector(s.as_vector()) == s
    with pytest.raises(ValueError):
        MeanFieldState.from_polar(1.0, 2.0, 0.0)
