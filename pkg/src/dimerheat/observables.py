"""
Position-space density of two-mode states.

    p(x1, x2) = sum_{ij} rho_ij psi_{na_i}(x1) psi_{na_j}(x1) psi_{nb_i}(x2) psi_{nb_j}(x2)

with normalized oscillator eigenfunctions (``hbar = m = 1``, unit frequency)
generated by the three-term recurrence, which stays finite where raw
factorials and Hermite polynomials overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from . import _kernels
from .errors import BasisMismatchError
from .fock import FockBasis

__all__ = [
    "PositionGrid",
    "oscillator_wavefunction",
    "hermite_table",
    "orthonormality_matrix",
    "position_pdf",
    "integrate_pdf",
    "delocalization_measure",
]


@dataclass(frozen=True)
class PositionGrid:
    """Uniform grid on ``[-x_max, x_max]`` for each of the two axes."""

    points: int = 201
    x_max: float = 8.0

    def __post_init__(self):
        if isinstance(self.points, bool) or int(self.points) != self.points or self.points < 2:
            raise ValueError("points must be an integer >= 2")
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.x_max, self.x_max, int(self.points))

    @property
    def dx(self) -> float:
        return 2.0 * self.x_max / (self.points - 1)


def hermite_table(n_max: int, x) -> np.ndarray:
    """``table[n, k] = psi_n(x_k)`` for ``n <= n_max``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    x = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    return _kernels.hermite_functions(int(n_max), x)


def oscillator_wavefunction(n: int, x):
    """``psi_n(x)``; scalar in, scalar out."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    scalar = np.ndim(x) == 0
    vals = hermite_table(n, x)[n]
    return float(vals[0]) if scalar else vals


def orthonormality_matrix(n_max: int, grid: PositionGrid) -> np.ndarray:
    """Trapezoid overlaps ``int psi_m psi_n dx``."""
    psi = hermite_table(n_max, grid.x)
    w = np.full(grid.points, grid.dx)
    w[[0, -1]] *= 0.5
    return (psi * w) @ psi.T


def position_pdf(rho, basis: FockBasis, grid: PositionGrid | None = None) -> np.ndarray:
    """``p[u, v] = <x1_u, x2_v| rho |x1_u, x2_v>``.

    Raises ``ValueError`` if the imaginary residue exceeds ``1e-10``
    (``rho`` not Hermitian).
    """
    grid = grid or PositionGrid()
    rho = np.ascontiguousarray(np.asarray(rho, dtype=np.complex128))
    if rho.shape != (basis.dim, basis.dim):
        raise BasisMismatchError(f"rho shape {rho.shape} does not match basis dimension {basis.dim}")
    occ = basis.occupations
    top = int(occ.max()) if occ.size else 0
    psi = hermite_table(top, grid.x)
    na = np.ascontiguousarray(occ[:, 0])
    nb = np.ascontiguousarray(occ[:, 1])
    pdf = _kernels.pdf_contract(rho, psi, psi, na, nb)
    if np.abs(pdf.imag).max(initial=0.0) > 1e-10:
        raise ValueError("density is not real: rho is not Hermitian")
    return np.ascontiguousarray(pdf.real)


def _trapz2(f: np.ndarray, dx: float) -> float:
    return float(trapezoid(trapezoid(f, dx=dx, axis=1), dx=dx))


def integrate_pdf(pdf: np.ndarray, grid: PositionGrid) -> float:
    return _trapz2(pdf, grid.dx)


def delocalization_measure(pdf: np.ndarray, grid: PositionGrid) -> float:
    """Inverse participation ratio ``1 / int p^2`` (an area; larger is more spread)."""
    return 1.0 / _trapz2(np.asarray(pdf) ** 2, grid.dx)
