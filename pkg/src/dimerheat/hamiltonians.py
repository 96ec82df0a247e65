"""
Dimer Hamiltonians, spectra and ground states.

    H = omega (a^dag a + b^dag b) + { J (a^dag b + b^dag a)           linear
                                    { Y (a^dag a^dag b b + h.c.)      SFWM
                                    { Z a^dag a b^dag b               XPM

Units: hbar = k_B = 1, energies in units of ``omega`` unless stated.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .fock import FockBasis, Mode, QuantumOperator, annihilator, build_basis, creator

__all__ = [
    "Interaction",
    "DimerParams",
    "Spectrum",
    "build_hamiltonian",
    "spectrum",
    "excitation_energy_estimates",
    "ground_state",
    "OverlapScan",
    "vacuum_overlap_scan",
    "cluster_values",
]


class Interaction(str, Enum):
    LINEAR = "linear"
    SFWM = "sfwm"
    XPM = "xpm"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class DimerParams:
    """Cavity frequency and coupling strengths.

    ``kind`` selects which single interaction term is built; ``COMPOSITE``
    adds every term whose strength is nonzero.
    """

    omega: float = 1.0
    j: float = 0.0
    y: float = 0.0
    z: float = 0.0
    kind: Interaction = Interaction.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "kind", Interaction(self.kind))
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        for name in ("j", "y", "z"):
            val = getattr(self, name)
            if not val >= 0:
                raise ValueError(f"{name} must be nonnegative, got {val}")

    @property
    def strength(self) -> float:
        """Coupling strength of the active single interaction."""
        return {
            Interaction.LINEAR: self.j,
            Interaction.SFWM: self.y,
            Interaction.XPM: self.z,
        }.get(self.kind, float("nan"))


def build_hamiltonian(basis: FockBasis, params: DimerParams) -> QuantumOperator:
    a = annihilator(basis, Mode.A)
    b = annihilator(basis, Mode.B)
    ad = creator(basis, Mode.A)
    bd = creator(basis, Mode.B)
    h = (ad @ a + bd @ b) * params.omega
    kind = params.kind
    composite = kind is Interaction.COMPOSITE
    if kind is Interaction.LINEAR or (composite and params.j):
        h = h + (ad @ b + bd @ a) * params.j
    if kind is Interaction.SFWM or (composite and params.y):
        h = h + (ad @ ad @ b @ b + bd @ bd @ a @ a) * params.y
    if kind is Interaction.XPM or (composite and params.z):
        h = h + (ad @ a @ bd @ b) * params.z
    return h


def cluster_values(values, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-linkage clusters of real values.

    Returns ``(labels, centers)``: ``labels[i]`` is the cluster of
    ``values[i]``; clusters are numbered in ascending order of value and
    ``centers`` holds each cluster's mean.
    """
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    sorted_labels = _kernels.cluster_sorted(values[order], float(tol))
    labels = np.empty_like(sorted_labels)
    labels[order] = sorted_labels
    n = int(sorted_labels[-1]) + 1 if values.size else 0
    centers = np.bincount(labels, weights=values, minlength=n) / np.bincount(labels, minlength=n)
    return labels, centers


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigen-decomposition of a Hermitian Hamiltonian.

    ``sectors[k]`` is the total particle number of eigenvector ``k`` when the
    Hamiltonian conserves it (``-1`` otherwise).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    bohr_frequencies: np.ndarray
    sectors: np.ndarray
    basis: FockBasis
    cluster_tol: float


def spectrum(h: QuantumOperator, cluster_tol: float = 1e-9) -> Spectrum:
    """Full eigen-decomposition, block by block when ``[H, N] = 0``.

    Raises ``ValueError`` for non-Hermitian input.
    """
    m = h.matrix
    scale = max(1.0, np.linalg.norm(m))
    if np.linalg.norm(m - m.conj().T) > 1e-10 * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    basis = h.basis
    totals = basis.totals
    conserving = np.linalg.norm(m * (totals[:, None] != totals[None, :])) <= 1e-12 * scale
    d = basis.dim
    if conserving:
        evals = np.empty(d)
        evecs = np.zeros((d, d), dtype=np.complex128)
        sectors = np.empty(d, dtype=np.int64)
        col = 0
        for n in np.unique(totals):
            idx = np.flatnonzero(totals == n)
            w, v = np.linalg.eigh(m[np.ix_(idx, idx)])
            sl = slice(col, col + idx.size)
            evals[sl] = w
            evecs[idx, sl] = v
            sectors[sl] = n
            col += idx.size
        order = np.argsort(evals, kind="stable")
        evals, evecs, sectors = evals[order], evecs[:, order], sectors[order]
    else:
        evals, evecs = np.linalg.eigh(m)
        sectors = np.full(d, -1, dtype=np.int64)
    diffs = (evals[:, None] - evals[None, :]).ravel()
    _, bohr = cluster_values(diffs, cluster_tol)
    for arr in (evals, evecs, bohr, sectors):
        arr.flags.writeable = False
    return Spectrum(evals, evecs, bohr, sectors, basis, cluster_tol)


def excitation_energy_estimates(params: DimerParams, n: int) -> list[float]:
    """Single-excitation energy estimates ``nu`` in sector ``n``.

    Linear: ``omega +- J`` (exact).  SFWM: ``omega +- Y n``.  XPM:
    ``omega + Z n``.  The nonlinear ones are order-of-magnitude estimates.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    w = params.omega
    if params.kind is Interaction.LINEAR:
        return [w + params.j, w - params.j]
    if params.kind is Interaction.SFWM:
        return [w + params.y * n, w - params.y * n]
    if params.kind is Interaction.XPM:
        return [w + params.z * n]
    raise ValueError("estimates are defined for a single interaction kind")


def ground_state(h: QuantumOperator, degeneracy_tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Lowest eigenpair over the whole truncated space.

    A degenerate lowest level is resolved by the normalized projection of
    the vacuum onto it (the member with largest vacuum overlap); the phase
    makes the largest-magnitude component real and positive.
    """
    spec = spectrum(h)
    e = spec.eigenvalues
    low = np.flatnonzero(e <= e[0] + degeneracy_tol)
    vecs = spec.eigenvectors[:, low]
    vac = h.basis.index((0, 0))
    proj = vecs @ vecs[vac].conj()
    if np.linalg.norm(proj) > 1e-12:
        psi = proj / np.linalg.norm(proj)
    else:
        psi = vecs[:, 0].copy()
    k = np.argmax(np.abs(psi))
    psi = psi * (abs(psi[k]) / psi[k])
    return float(e[low].mean()), psi


@dataclass(frozen=True)
class OverlapScan:
    y: np.ndarray
    overlap: np.ndarray
    critical: float | None


def vacuum_overlap_scan(omega: float, y_grid, n_max: int = 8) -> OverlapScan:
    """``|<G|0>|^2`` along an ascending grid of SFWM strengths.

    ``critical`` is the first grid value where the overlap falls below 1/2,
    or ``None`` if it never does.
    """
    y_grid = np.asarray(y_grid, dtype=np.float64)
    if np.any(np.diff(y_grid) <= 0):
        raise ValueError("y_grid must be strictly ascending")
    basis = build_basis(n_max)
    vac = basis.index((0, 0))
    overlap = np.empty(y_grid.size)
    for i, y in enumerate(y_grid):
        h = build_hamiltonian(basis, DimerParams(omega=omega, y=float(y), kind=Interaction.SFWM))
        _, psi = ground_state(h)
        overlap[i] = abs(psi[vac]) ** 2
    below = np.flatnonzero(overlap < 0.5)
    critical = float(y_grid[below[0]]) if below.size else None
    return OverlapScan(y_grid, overlap, critical)
