import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimerheat.errors import BasisMismatchError
from dimerheat.fock import (
    Mode,
    QuantumOperator,
    annihilator,
    anticommutator,
    build_basis,
    build_basis_per_mode,
    commutator,
    creator,
    expectation,
    identity,
    normal_mode_annihilators,
    number_operator,
    projector,
    total_number,
)


def test_ordering_small():
    b = build_basis(2)
    assert b.states == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert b.index((1, 1)) == 4
    assert (3, 0) not in b


@given(st.integers(0, 12))
def test_dimension_total_cutoff(n_max):
    b = build_basis(n_max)
    assert b.dim == (n_max + 1) * (n_max + 2) // 2
    assert len(set(b.states)) == b.dim
    assert np.all(np.diff(b.totals) >= 0)


@given(st.integers(0, 8))
def test_dimension_per_mode(n_max):
    b = build_basis_per_mode(n_max)
    assert b.dim == (n_max + 1) ** 2
    assert b.occupations.max() == n_max


@pytest.mark.parametrize("bad", [-1, 2.5, True, "3"])
def test_invalid_cutoff(bad):
    with pytest.raises((ValueError, TypeError)):
        build_basis(bad)


def test_annihilator_elements(basis8):
    a = annihilator(basis8, Mode.A).matrix
    b = annihilator(basis8, "B").matrix
    for (na, nb), j in basis8._index.items():
        if na:
            assert a[basis8.index((na - 1, nb)), j] == pytest.approx(np.sqrt(na), abs=1e-15)
        if nb:
            assert b[basis8.index((na, nb - 1)), j] == pytest.approx(np.sqrt(nb), abs=1e-15)
    vac = basis8.index((0, 0))
    assert np.all(a[:, vac] == 0) and np.all(b[:, vac] == 0)


def test_creator_is_adjoint(basis8):
    for m in Mode:
        assert np.array_equal(creator(basis8, m).matrix, annihilator(basis8, m).matrix.conj().T)


def test_canonical_commutator_below_cutoff(basis8):
    a = annihilator(basis8, Mode.A)
    b = annihilator(basis8, Mode.B)
    ca = commutator(a, a.dag()).matrix
    cab = commutator(a, b.dag()).matrix
    inner = basis8.totals < basis8.n_max
    # truncation only spoils the top sector
    assert np.allclose(ca[np.ix_(inner, inner)], np.eye(inner.sum()), atol=1e-14)
    assert np.abs(cab[np.ix_(inner, inner)]).max() < 1e-14


def test_number_operators(basis8):
    for m in Mode:
        a = annihilator(basis8, m)
        assert np.allclose((a.dag() @ a).matrix, number_operator(basis8, m).matrix, atol=1e-14)
    c, d = normal_mode_annihilators(basis8)
    assert np.allclose((c.dag() @ c + d.dag() @ d).matrix, total_number(basis8).matrix, atol=1e-13)


def test_vacuum_and_coherence_block(basis8):
    rho = basis8.vacuum()
    assert np.trace(rho) == 1
    rows, cols = basis8.coherence_block(0)
    assert rows.size == sum((n + 1) ** 2 for n in range(9))
    assert np.all(basis8.totals[rows] == basis8.totals[cols])
    r1, c1 = basis8.coherence_block(1)
    assert np.all(basis8.totals[r1] - basis8.totals[c1] == 1)


def test_operator_algebra(basis8):
    a = annihilator(basis8, Mode.A)
    one = identity(basis8)
    assert np.allclose((2 * a - a).matrix, a.matrix)
    assert np.allclose((a / 2 + a * 0.5).matrix, a.matrix)
    assert np.allclose(anticommutator(one, a).matrix, 2 * a.matrix)
    assert (-a).norm() == pytest.approx(a.norm())
    assert one.trace() == basis8.dim
    assert one.is_hermitian() and not a.is_hermitian()
    with pytest.raises(ValueError):
        a.matrix[0, 0] = 1.0


def test_basis_mismatch():
    a2 = annihilator(build_basis(2), Mode.A)
    a3 = annihilator(build_basis(3), Mode.A)
    with pytest.raises(BasisMismatchError):
        a2 @ a3
    with pytest.raises(BasisMismatchError):
        expectation(a2, np.eye(3))
    with pytest.raises(ValueError):
        QuantumOperator(np.eye(4), build_basis(2))


def test_expectation(basis8):
    rho = projector(basis8, (2, 1)).matrix
    assert expectation(number_operator(basis8, Mode.A), rho) == pytest.approx(2.0)
    assert expectation(total_number(basis8), projector(basis8, (2, 1))) == pytest.approx(3.0)
