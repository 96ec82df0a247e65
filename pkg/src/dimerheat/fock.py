"""
Truncated two-mode Fock space and dense bosonic operators.

States are pairs ``(n_a, n_b)``.  The default cutoff caps the *total*
number ``n_a + n_b <= n_max``; all dimer Hamiltonians conserve the total
number, so this truncation keeps every number sector complete.  A per-mode
cutoff (``n_a, n_b <= n_max``) is available for convergence studies.

Ordering is ascending total number, then descending ``n_a`` inside a
sector, so each sector runs from ``X_z = n/2`` down to ``-n/2``::

    n_max = 2:  (0,0) (1,0) (0,1) (2,0) (1,1) (0,2)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from numbers import Number

import numpy as np

from .errors import BasisMismatchError

__all__ = [
    "Mode",
    "FockBasis",
    "QuantumOperator",
    "build_basis",
    "build_basis_per_mode",
    "annihilator",
    "creator",
    "number_operator",
    "total_number",
    "identity",
    "normal_mode_annihilators",
    "adjoint",
    "commutator",
    "anticommutator",
    "trace",
    "frobenius_norm",
    "expectation",
    "projector",
]


class Mode(str, Enum):
    A = "a"
    B = "b"


@dataclass(frozen=True)
class FockBasis:
    """Ordered list of two-mode number states under a particle cutoff."""

    n_max: int
    states: tuple[tuple[int, int], ...]
    cutoff: str = "total"

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def _index(self) -> dict[tuple[int, int], int]:
        return {s: i for i, s in enumerate(self.states)}

    def index(self, state: tuple[int, int]) -> int:
        return self._index[tuple(state)]

    def __contains__(self, state) -> bool:
        return tuple(state) in self._index

    @cached_property
    def occupations(self) -> np.ndarray:
        """``(dim, 2)`` integer array of ``(n_a, n_b)``."""
        occ = np.array(self.states, dtype=np.int64).reshape(-1, 2)
        occ.flags.writeable = False
        return occ

    @cached_property
    def totals(self) -> np.ndarray:
        tot = self.occupations.sum(axis=1)
        tot.flags.writeable = False
        return tot

    def sector(self, n: int) -> np.ndarray:
        """Indices of the states with ``n_a + n_b == n``."""
        return np.flatnonzero(self.totals == n)

    def vacuum(self) -> np.ndarray:
        """Vacuum density matrix ``|0,0><0,0|``."""
        rho = np.zeros((self.dim, self.dim), dtype=np.complex128)
        i = self.index((0, 0))
        rho[i, i] = 1.0
        return rho

    def coherence_block(self, k: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Column-stacked positions of matrix elements ``|i><j|`` with
        ``N_i - N_j == k``.

        Returns ``(rows, cols)`` so that position ``p`` of the block refers to
        ``rho[rows[p], cols[p]]``.  Generators that commute with the total
        number map each block onto itself.
        """
        d = self.dim
        p = np.arange(d * d)
        rows, cols = p % d, p // d
        keep = self.totals[rows] - self.totals[cols] == k
        return rows[keep], cols[keep]


def build_basis(n_max: int) -> FockBasis:
    """Complete basis with total-number cutoff, ``(n_max+1)(n_max+2)/2`` states."""
    n_max = _check_cutoff(n_max)
    states = tuple((na, n - na) for n in range(n_max + 1) for na in range(n, -1, -1))
    return FockBasis(n_max, states, "total")


def build_basis_per_mode(n_max: int) -> FockBasis:
    """Basis with ``n_a, n_b <= n_max`` each; same ordering rule."""
    n_max = _check_cutoff(n_max)
    states = tuple(
        (na, n - na)
        for n in range(2 * n_max + 1)
        for na in range(n, -1, -1)
        if na <= n_max and n - na <= n_max
    )
    return FockBasis(n_max, states, "per_mode")


def _check_cutoff(n_max) -> int:
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 0:
        raise ValueError(f"n_max must be a nonnegative integer, got {n_max!r}")
    return int(n_max)


@dataclass(frozen=True, eq=False)
class QuantumOperator:
    """Dense complex matrix tagged with the basis it acts on."""

    matrix: np.ndarray
    basis: FockBasis

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        if m.shape[0] != self.basis.dim:
            raise ValueError(
                f"matrix dimension {m.shape[0]} does not match basis dimension {self.basis.dim}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def _check(self, other: "QuantumOperator") -> None:
        if other.basis is not self.basis and other.basis != self.basis:
            raise BasisMismatchError("operators are expressed in different bases")

    def _wrap(self, m) -> "QuantumOperator":
        return QuantumOperator(m, self.basis)

    def __add__(self, other):
        if isinstance(other, QuantumOperator):
            self._check(other)
            return self._wrap(self.matrix + other.matrix)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QuantumOperator):
            self._check(other)
            return self._wrap(self.matrix - other.matrix)
        return NotImplemented

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, Number):
            return self._wrap(self.matrix * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Number):
            return self._wrap(self.matrix / scalar)
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, QuantumOperator):
            self._check(other)
            return self._wrap(self.matrix @ other.matrix)
        return NotImplemented

    def dag(self) -> "QuantumOperator":
        return self._wrap(self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return np.linalg.norm(self.matrix - self.matrix.conj().T) <= tol * max(1.0, self.norm())

    def restrict(self, n: int) -> np.ndarray:
        """Block of the matrix on the total-number-``n`` sector."""
        idx = self.basis.sector(n)
        return self.matrix[np.ix_(idx, idx)]

    def __repr__(self):
        return f"QuantumOperator(dim={self.dim}, n_max={self.basis.n_max})"


def _mode_column(mode: Mode | str) -> int:
    if not isinstance(mode, Mode):
        mode = Mode(str(mode).lower())
    return 0 if mode is Mode.A else 1


def _ladder(basis: FockBasis, mode: Mode | str) -> np.ndarray:
    col = _mode_column(mode)
    m = np.zeros((basis.dim, basis.dim))
    for j, state in enumerate(basis.states):
        n = state[col]
        if n == 0:
            continue
        target = list(state)
        target[col] -= 1
        m[basis.index(tuple(target)), j] = np.sqrt(n)
    return m


def annihilator(basis: FockBasis, mode: Mode | str) -> QuantumOperator:
    """``<n-1| a |n> = sqrt(n)`` for the chosen mode; vacuum maps to zero."""
    return QuantumOperator(_ladder(basis, mode), basis)


def creator(basis: FockBasis, mode: Mode | str) -> QuantumOperator:
    """Adjoint of :func:`annihilator`.

    States pushed above the cutoff are dropped, which is exactly what the
    conjugate transpose of the truncated annihilator does.
    """
    return annihilator(basis, mode).dag()


def number_operator(basis: FockBasis, mode: Mode | str) -> QuantumOperator:
    col = _mode_column(mode)
    return QuantumOperator(np.diag(basis.occupations[:, col].astype(float)), basis)


def total_number(basis: FockBasis) -> QuantumOperator:
    return QuantumOperator(np.diag(basis.totals.astype(float)), basis)


def identity(basis: FockBasis) -> QuantumOperator:
    return QuantumOperator(np.eye(basis.dim), basis)


def projector(basis: FockBasis, state: tuple[int, int]) -> QuantumOperator:
    m = np.zeros((basis.dim, basis.dim))
    i = basis.index(state)
    m[i, i] = 1.0
    return QuantumOperator(m, basis)


def normal_mode_annihilators(basis: FockBasis) -> tuple[QuantumOperator, QuantumOperator]:
    """Symmetric and antisymmetric modes ``c = (a+b)/sqrt2``, ``d = (a-b)/sqrt2``."""
    a = annihilator(basis, Mode.A)
    b = annihilator(basis, Mode.B)
    s = 1.0 / np.sqrt(2.0)
    return (a + b) * s, (a - b) * s


def adjoint(op: QuantumOperator) -> QuantumOperator:
    return op.dag()


def commutator(x: QuantumOperator, y: QuantumOperator) -> QuantumOperator:
    return x @ y - y @ x


def anticommutator(x: QuantumOperator, y: QuantumOperator) -> QuantumOperator:
    return x @ y + y @ x


def trace(op: QuantumOperator) -> complex:
    return op.trace()


def frobenius_norm(op: QuantumOperator) -> float:
    return op.norm()


def expectation(op: QuantumOperator, rho) -> complex:
    """``Tr[op rho]``; ``rho`` may be an array or an operator on the same basis."""
    if isinstance(rho, QuantumOperator):
        op._check(rho)
        rho = rho.matrix
    rho = np.asarray(rho)
    if rho.shape != op.matrix.shape:
        raise BasisMismatchError(
            f"density matrix shape {rho.shape} does not match operator {op.matrix.shape}"
        )
    # Tr[A B] = sum_ij A_ij B_ji
    return complex(np.sum(op.matrix * rho.T))
