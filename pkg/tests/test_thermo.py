import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimerheat.dynamics import propagate, steady_state
from dimerheat.fock import build_basis
from dimerheat.lindblad import BathSpec, bose_occupation, build_liouvillian, gibbs_state
from dimerheat.thermo import (
    analytic_linear_one_bath,
    analytic_linear_two_bath,
    conductivity_formula,
    conductivity_peak,
    current_observables,
    fit_decay_rate,
    heat_current_series,
    heat_map,
    heat_transient,
    integrated_heat,
    landauer_current,
    ness_current_scan,
    thermal_conductivity,
)

from conftest import hamiltonian, random_density

TWO_TEMPS = (0.5 * 1.025, 0.5 * 0.975)


def test_initial_current_value(linear8):
    ana = analytic_linear_one_bath(1.0, 0.2, 0.01, 0.5)
    assert ana.current(0.0) == pytest.approx(2.874e-3, rel=5e-4)
    series = heat_transient(linear8, [0.0, 1.0])
    assert series.total[0] == pytest.approx(float(ana.current(0.0)), rel=1e-7)


def test_one_bath_oracle(linear8):
    ana = analytic_linear_one_bath(1.0, 0.2, 0.01, 0.5)
    times = np.linspace(0, 10 * ana.relaxation_time, 201)
    series = heat_transient(linear8, times)
    assert np.abs(series.total / ana.current(times) - 1).max() <= 1e-5
    assert fit_decay_rate(times, series.total) == pytest.approx(ana.rate, rel=1e-2)
    assert ana.relaxation_time == pytest.approx(1 / 0.024)


def test_thermal_start_carries_no_current(basis8, linear8):
    g = gibbs_state(linear8.hamiltonian, 0.5)
    series = heat_transient(linear8, np.linspace(0, 400, 21), rho0=g)
    assert np.abs(series.total).max() <= 1e-14


def test_unitary_part_carries_no_current(basis8):
    rng = np.random.default_rng(7)
    h = hamiltonian(basis8, "sfwm", 0.6).matrix
    for _ in range(5):
        rho = random_density(basis8.dim, rng)
        assert abs(np.trace(h @ (-1j * (h @ rho - rho @ h)))) <= 1e-12


def test_per_bath_split_and_heat(basis8):
    liou = build_liouvillian(hamiltonian(basis8, "sfwm", 0.5), [BathSpec(0.6), BathSpec(0.4)])
    times = np.linspace(0, 500, 51)
    traj = propagate(liou, basis8.vacuum(), times)
    from_states = heat_current_series(liou, traj)
    from_obs = heat_transient(liou, times)
    assert np.allclose(from_states.per_bath, from_obs.per_bath, atol=1e-15)
    assert np.allclose(from_states.total, from_states.per_bath.sum(0))
    assert np.allclose(from_states.net, from_states.per_bath[0] - from_states.per_bath[1])
    assert from_states.heat[0] == 0
    # Tr[H rho(t)] - Tr[H rho(0)] equals the integrated current up to quadrature error
    h = liou.hamiltonian.matrix
    energy = np.einsum("ij,tji->t", h, traj.states).real
    dense = heat_transient(liou, np.linspace(0, 500, 8001))
    assert dense.heat[-1] == pytest.approx(energy[-1] - energy[0], rel=1e-6)


def test_single_bath_has_no_net(linear8):
    assert heat_transient(linear8, [0.0, 1.0]).net is None


def test_sfwm_current_changes_sign(basis8):
    liou = build_liouvillian(hamiltonian(basis8, "sfwm", 0.3), BathSpec(0.5))
    times = np.linspace(0, 3000, 301)
    s = heat_transient(liou, times)
    assert s.total[0] > 0 and s.total.min() < 0
    first_negative = np.argmax(s.total < 0)
    assert np.all(s.total[:first_negative] > 0)


@pytest.mark.parametrize("y", [0.5, 1.0])
def test_nonlinear_net_current_is_time_dependent(basis8, y):
    liou = build_liouvillian(hamiltonian(basis8, "sfwm", y), [BathSpec(TWO_TEMPS[0]), BathSpec(TWO_TEMPS[1])])
    s = heat_transient(liou, np.linspace(0, 2000, 201))
    ss = steady_state(liou, basis8.vacuum())
    steady = [np.sum(liou.heat_operator(i) * ss.rho.T).real for i in range(2)]
    assert np.ptp(s.net) > 1e-4 * abs(steady[0] - steady[1])


def test_two_bath_reduces_to_one_bath():
    one = analytic_linear_one_bath(1.0, 0.2, 0.01, 0.5, n0_sym=0.05)
    two = analytic_linear_two_bath(1.0, 0.2, 0.01, 0.0, 0.5, 0.3, n0_sym=0.05)
    t = np.linspace(0, 300, 31)
    assert np.allclose(two.total_current(t), one.current(t), rtol=1e-14)
    assert np.allclose(two.net_current(t), one.current(t), rtol=1e-14)


def test_equal_gammas_give_constant_landauer_current():
    two = analytic_linear_two_bath(1.0, 0.2, 0.01, 0.01, *TWO_TEMPS)
    t = np.linspace(0, 500, 11)
    lan = landauer_current(1.0, 0.2, 0.01, *TWO_TEMPS)
    assert np.allclose(two.net_current(t), lan, rtol=1e-14)
    assert two.steady_net_current == pytest.approx(lan)
    same = analytic_linear_two_bath(1.0, 0.2, 0.01, 0.01, 0.5, 0.5)
    assert np.all(same.net_current(t) == 0)


def test_two_bath_closed_form_against_numerics():
    b = build_basis(12)
    g1, g2 = 0.015, 0.005
    liou = build_liouvillian(hamiltonian(b, "linear", 0.2), [BathSpec(0.6, g1), BathSpec(0.4, g2)])
    ana = analytic_linear_two_bath(1.0, 0.2, g1, g2, 0.6, 0.4)
    times = np.linspace(0, 5 / ana.rate, 51)
    s = heat_transient(liou, times)
    assert np.allclose(s.net, ana.net_current(times), rtol=1e-8, atol=0)
    assert np.allclose(s.per_bath[1], ana.current(1, times), rtol=1e-7, atol=1e-14)
    # unequal couplings make the net current relax
    assert abs(s.net[0] - s.net[-1]) > 1e-2 * abs(s.net[-1])


def test_landauer_at_converged_cutoff():
    scan = ness_current_scan("sfwm", [0.0], n_max=12)
    lan = landauer_current(1.0, 0.0, 0.01, *TWO_TEMPS)
    assert scan.net[0] == pytest.approx(lan, rel=1e-8)


def test_steady_energy_balance_and_second_law():
    scan = ness_current_scan("sfwm", np.linspace(0, 1, 6), n_max=6)
    assert np.abs(scan.per_bath.sum(1)).max() <= 1e-9
    assert np.all(scan.net >= 0)
    assert np.all(scan.residual <= 1e-9)
    xpm = ness_current_scan("xpm", [0.0, 0.5, 1.0], n_max=6)
    assert np.all(xpm.net >= 0)


def test_scan_validation():
    with pytest.raises(ValueError):
        ness_current_scan("sfwm", [0.1], delta=0.0)
    with pytest.raises(ValueError):
        ness_current_scan("composite", [0.1], n_max=2)


def test_conductivity_shape_ratio():
    ratios = [thermal_conductivity(1.0, 0.2, 0.01, t).ratio for t in np.linspace(0.1, 2.0, 20)]
    assert np.ptp(ratios) / np.mean(ratios) <= 1e-6
    assert np.mean(ratios) == pytest.approx(32.0, rel=1e-6)


def test_conductivity_limits():
    assert conductivity_formula(1.2, 0.01, 1e-3) == pytest.approx(0.0, abs=1e-300)
    small = np.array([1e-3, 1e-4])
    # vanishes linearly in E at fixed T
    assert np.allclose(conductivity_formula(small, 0.01, 0.5) / small, 64 * 0.01, rtol=1e-5)


def test_conductivity_peak():
    assert conductivity_peak(1.0) == pytest.approx(2.576, abs=0.01)
    assert conductivity_peak(0.3) == pytest.approx(conductivity_peak(1.0), rel=1e-6)
    x = conductivity_peak()
    assert x == pytest.approx(3 * np.tanh(x / 2), rel=1e-8)


def test_integrated_heat():
    t = np.linspace(0, 2, 5)
    assert np.all(integrated_heat(t, np.zeros(5)) == 0)
    q = integrated_heat(t, 3 * np.ones(5))
    assert q[0] == 0 and q[-1] == pytest.approx(6.0)
    with pytest.raises(ValueError):
        integrated_heat(t[::-1], np.ones(5))


@given(st.floats(1e-3, 1.0), st.floats(0.1, 10))
def test_fit_decay_rate_synthetic(rate, amp):
    t = np.linspace(0, 5 / rate, 50)
    assert fit_decay_rate(t, amp * np.exp(-rate * t)) == pytest.approx(rate, rel=1e-9)


def test_heat_map_small():
    m = heat_map("sfwm", [0.3, 0.6], [0.0, 0.8], n_max=4, horizon=10.0)
    assert m.heat.shape == (2, 2)
    assert m.t_final == pytest.approx(1000.0)
    # the free dimer only absorbs
    assert np.all(m.heat[:, 0] > 0) and np.all(m.min_current[:, 0] >= 0)
    assert np.all(np.isfinite(m.heat_double))


def test_current_observable_names(linear8):
    assert list(current_observables(linear8)) == ["heat_0"]


def test_bose_input_to_closed_forms():
    ana = analytic_linear_one_bath(1.0, 0.2, 0.01, 0.5, n0_sym=bose_occupation(1.2, 0.5))
    assert np.all(ana.current(np.linspace(0, 100, 5)) == 0)
    with pytest.raises(ValueError):
        analytic_linear_one_bath(1.0, 0.2, 0.0, 0.5)
    with pytest.raises(ValueError):
        analytic_linear_two_bath(1.0, 0.2, 0.0, 0.0, 0.5, 0.4)
