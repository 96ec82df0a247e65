import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimerheat.dynamics import steady_state
from dimerheat.errors import BasisMismatchError
from dimerheat.fock import build_basis
from dimerheat.lindblad import BathSpec, build_liouvillian
from dimerheat.observables import (
    PositionGrid,
    delocalization_measure,
    hermite_table,
    integrate_pdf,
    orthonormality_matrix,
    oscillator_wavefunction,
    position_pdf,
)

from conftest import hamiltonian, random_density


def test_wavefunction_values():
    assert oscillator_wavefunction(0, 0.0) == pytest.approx(np.pi**-0.25)
    assert oscillator_wavefunction(1, 0.0) == 0.0
    # psi_2(x) = pi^-1/4 (2x^2 - 1) e^{-x^2/2} / sqrt2
    x = np.linspace(-3, 3, 7)
    expect = np.pi**-0.25 * (2 * x**2 - 1) * np.exp(-(x**2) / 2) / np.sqrt(2)
    assert np.allclose(oscillator_wavefunction(2, x), expect, atol=1e-15)
    with pytest.raises(ValueError):
        oscillator_wavefunction(-1, 0.0)


def test_recurrence_stays_finite_for_large_n():
    tab = hermite_table(120, np.linspace(-20, 20, 81))
    assert np.all(np.isfinite(tab))


def test_orthonormality_on_default_grid():
    assert np.abs(orthonormality_matrix(8, PositionGrid()) - np.eye(9)).max() <= 1e-8


def test_grid_validation():
    for kw in ({"points": 1}, {"x_max": 0.0}, {"points": 2.5}):
        with pytest.raises(ValueError):
            PositionGrid(**kw)
    g = PositionGrid(5, 2.0)
    assert np.allclose(g.x, [-2, -1, 0, 1, 2]) and g.dx == 1.0


def test_vacuum_density(basis8):
    g = PositionGrid()
    p = position_pdf(basis8.vacuum(), basis8, g)
    x1, x2 = np.meshgrid(g.x, g.x, indexing="ij")
    assert np.allclose(p, np.exp(-(x1**2) - x2**2) / np.pi, atol=1e-15)
    assert np.unravel_index(np.argmax(p), p.shape) == (100, 100)
    assert delocalization_measure(p, g) == pytest.approx(2 * np.pi, rel=1e-8)


def test_uniform_density_ipr():
    g = PositionGrid(101, 2.0)
    area = 16.0
    assert delocalization_measure(np.full((101, 101), 1 / area), g) == pytest.approx(area)


@given(st.integers(0, 2**31 - 1))
def test_random_states_give_valid_densities(seed):
    rng = np.random.default_rng(seed)
    b = build_basis(3)
    g = PositionGrid(121, 7.0)
    p = position_pdf(random_density(b.dim, rng), b, g)
    assert p.min() >= -1e-8
    assert integrate_pdf(p, g) == pytest.approx(1.0, abs=1e-4)


def test_pdf_errors(basis8):
    with pytest.raises(BasisMismatchError):
        position_pdf(np.eye(3), basis8)
    rho = basis8.vacuum()
    rho[0, 1] = 0.3j
    rho[1, 0] = 0.3j
    with pytest.raises(ValueError):
        position_pdf(rho, basis8)


def test_steady_states_delocalize_with_sfwm(basis8):
    g = PositionGrid()
    ipr = {}
    for y in (0.1, 1.0):
        liou = build_liouvillian(hamiltonian(basis8, "sfwm", y), [BathSpec(0.5125), BathSpec(0.4875)])
        p = position_pdf(steady_state(liou, basis8.vacuum()).rho, basis8, g)
        assert integrate_pdf(p, g) == pytest.approx(1.0, abs=1e-4)
        ipr[y] = delocalization_measure(p, g)
        if y == 0.1:
            assert np.unravel_index(np.argmax(p), p.shape) == (100, 100)
    assert ipr[1.0] > ipr[0.1]
