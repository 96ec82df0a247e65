"""
Secular (Davies) Lindblad generators for the dimer coupled to Ohmic baths.

For a coupling operator ``c`` the spectral components

    c(nu) = sum_{E_m - E_n = nu} <n|c|m> |n><m|,      [H, c(nu)] = -nu c(nu)

are collected by Bohr frequency.  Components with ``nu < 0`` are folded
onto positive frequencies through ``c(-nu) = c(nu)^dag``, so every channel
has a lowering operator ``L`` (``[H, L] = -nu L``, ``nu > 0``) and two rates

    rate_down = Gamma nu (nbar(nu) + 1)   on  D_L
    rate_up   = Gamma nu  nbar(nu)        on  D_{L^dag}

with ``D_L[rho] = 2 L rho L^dag - {L^dag L, rho}``.

Superoperators use column stacking: ``vec(rho)[i + d*j] = rho[i, j]``, so the
unitary part is ``-i (I (x) H - H^T (x) I)``.  Because ``H`` and the
normal-mode coupling both respect the total particle number, the generator
maps every coherence block ``N_i - N_j = k`` onto itself; :meth:`Liouvillian.block`
builds those blocks directly without materializing the full ``d^2 x d^2``
matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels
from .fock import FockBasis, Mode, QuantumOperator, annihilator, normal_mode_annihilators
from .hamiltonians import Spectrum, cluster_values, spectrum

__all__ = [
    "BathSpec",
    "JumpChannel",
    "Liouvillian",
    "GeneratorBlock",
    "bose_occupation",
    "secular_decomposition",
    "build_liouvillian",
    "all_rates_nonnegative",
    "gibbs_state",
    "vectorize",
    "unvectorize",
]


@dataclass(frozen=True)
class BathSpec:
    """Thermal reservoir: temperature (``k_B = 1``) and coupling rate ``Gamma``."""

    temperature: float
    gamma: float = 0.01

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"bath temperature must be positive, got {self.temperature}")
        if not self.gamma >= 0:
            raise ValueError(f"bath gamma must be nonnegative, got {self.gamma}")


def bose_occupation(nu, temperature):
    """Bose-Einstein occupation ``1 / (exp(nu/T) - 1)``.

    Negative ``nu`` gives the analytic continuation ``-(1 + nbar(|nu|))``.
    ``nu == 0`` is rejected.
    """
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    nu_arr = np.asarray(nu, dtype=np.float64)
    if np.any(nu_arr == 0):
        raise ValueError("Bose occupation diverges at nu = 0")
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(nu_arr / temperature)
    return float(out) if out.ndim == 0 else out


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacking ``vec``."""
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int | None = None) -> np.ndarray:
    vec = np.asarray(vec)
    if dim is None:
        dim = math.isqrt(vec.size)
    return vec.reshape((dim, dim), order="F")


def secular_decomposition(
    spec: Spectrum, coupling: QuantumOperator, cluster_tol: float = 1e-9
) -> list[tuple[float, QuantumOperator]]:
    """Split ``coupling`` into Bohr-frequency components ``c(nu)``.

    Returns ``(nu, c(nu))`` pairs in ascending ``nu`` (any sign, including a
    zero-frequency component when present).  Frequencies closer than
    ``cluster_tol`` are merged.  The components sum back to ``coupling``.
    """
    if not cluster_tol > 0:
        raise ValueError("cluster_tol must be positive")
    if coupling.basis != spec.basis:
        from .errors import BasisMismatchError

        raise BasisMismatchError("coupling and spectrum use different bases")
    v = spec.eigenvectors
    e = spec.eigenvalues
    ce = v.conj().T @ coupling.matrix @ v
    scale = np.abs(ce).max() if ce.size else 0.0
    if scale == 0.0:
        return []
    rows, cols = np.nonzero(np.abs(ce) > 1e-14 * scale)
    # |n><m| with E_m - E_n = nu removes energy nu
    nus = e[cols] - e[rows]
    labels, centers = cluster_values(nus, cluster_tol)
    out = []
    for k, center in enumerate(centers):
        sel = labels == k
        m = np.zeros_like(ce)
        m[rows[sel], cols[sel]] = ce[rows[sel], cols[sel]]
        out.append((float(center), QuantumOperator(v @ m @ v.conj().T, coupling.basis)))
    return out


@dataclass(frozen=True, eq=False)
class JumpChannel:
    """Energy-lowering jump ``lower`` at Bohr frequency ``nu > 0`` for one bath.

    ``folded`` marks channels obtained from a negative-frequency component
    of the coupling (``lower = c(-nu)^dag``).
    """

    nu: float
    lower: QuantumOperator
    rate_down: float
    rate_up: float
    folded: bool = False

    @property
    def raise_op(self) -> QuantumOperator:
        return self.lower.dag()


@dataclass(frozen=True, eq=False)
class GeneratorBlock:
    """A generator restricted to an invariant set of matrix elements.

    ``rows[p], cols[p]`` locate entry ``p`` of the block vector in ``rho``.
    """

    rows: np.ndarray
    cols: np.ndarray
    unitary: np.ndarray
    dissipators: tuple[np.ndarray, ...]

    @cached_property
    def total(self) -> np.ndarray:
        out = self.unitary.copy()
        for part in self.dissipators:
            out += part
        return out

    @property
    def size(self) -> int:
        return self.rows.size

    def gather(self, rho: np.ndarray) -> np.ndarray:
        return np.asarray(rho)[self.rows, self.cols]

    def scatter(self, vec: np.ndarray, dim: int) -> np.ndarray:
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[self.rows, self.cols] = vec
        return rho

    def functional(self, op: np.ndarray) -> np.ndarray:
        """Row vector ``w`` with ``w @ vec_block(rho) = Tr[op rho]`` on the block."""
        return np.asarray(op)[self.cols, self.rows]


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Unitary part plus one dissipator per bath, kept separate for current bookkeeping."""

    hamiltonian: QuantumOperator
    baths: tuple[BathSpec, ...]
    channels: tuple[tuple[JumpChannel, ...], ...]
    spectrum: Spectrum
    decompositions: tuple[tuple[tuple[float, QuantumOperator], ...], ...]
    cluster_tol: float = 1e-9
    dropped_zero_channels: int = 0
    _blocks: dict = field(default_factory=dict, repr=False)

    @property
    def basis(self) -> FockBasis:
        return self.hamiltonian.basis

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def n_baths(self) -> int:
        return len(self.baths)

    def with_baths(self, baths: Sequence[BathSpec]) -> "Liouvillian":
        """Same Hamiltonian and decomposition, new temperatures/rates."""
        baths = _as_bath_tuple(baths)
        if len(baths) != len(self.baths):
            raise ValueError("number of baths must not change")
        return _assemble(self.hamiltonian, self.spectrum, self.decompositions, baths, self.cluster_tol)

    # --- operator-level action -------------------------------------------

    @cached_property
    def _stacks(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        out = []
        d = self.dim
        for chans in self.channels:
            if not chans:
                out.append((np.zeros((0, d, d), dtype=np.complex128), np.zeros(0)))
                continue
            lowers = np.array([ch.lower.matrix for ch in chans])
            ops = np.concatenate([lowers, lowers.conj().transpose(0, 2, 1)])
            rates = np.array([ch.rate_down for ch in chans] + [ch.rate_up for ch in chans])
            keep = rates != 0.0
            out.append((np.ascontiguousarray(ops[keep]), rates[keep]))
        return tuple(out)

    @cached_property
    def _decay(self) -> tuple[np.ndarray, ...]:
        # G = sum_k r_k L_k^dag L_k
        out = []
        for ops, rates in self._stacks:
            out.append(np.einsum("k,kji,kjl->il", rates, ops.conj(), ops))
        return tuple(out)

    def apply_dissipator(self, bath: int, rho: np.ndarray) -> np.ndarray:
        ops, rates = self._stacks[bath]
        g = self._decay[bath]
        rho = np.asarray(rho, dtype=np.complex128)
        sandwich = np.einsum("k,kij,jl,kml->im", rates, ops, rho, ops.conj(), optimize=True)
        return 2.0 * sandwich - g @ rho - rho @ g

    def apply_unitary(self, rho: np.ndarray) -> np.ndarray:
        h = self.hamiltonian.matrix
        return -1j * (h @ rho - rho @ h)

    def apply(self, rho: np.ndarray, part: str | int = "total") -> np.ndarray:
        """``L(rho)``; ``part`` is ``"total"``, ``"unitary"`` or a bath index."""
        if part == "unitary":
            return self.apply_unitary(rho)
        if part == "total":
            out = self.apply_unitary(rho)
            for i in range(self.n_baths):
                out = out + self.apply_dissipator(i, rho)
            return out
        return self.apply_dissipator(int(part), rho)

    def heat_operator(self, bath: int) -> np.ndarray:
        """``h_i`` with ``Tr[H D_i(rho)] = Tr[h_i rho]`` (adjoint dissipator applied to H)."""
        ops, rates = self._stacks[bath]
        h = self.hamiltonian.matrix
        g = self._decay[bath]
        sandwich = np.einsum("k,kji,jl,klm->im", rates, ops.conj(), h, ops, optimize=True)
        return 2.0 * sandwich - g @ h - h @ g

    # --- superoperator matrices ------------------------------------------

    def block(self, k: int | None = 0) -> GeneratorBlock:
        """Generator restricted to coherence order ``k`` (``None``: full space)."""
        if k in self._blocks:
            return self._blocks[k]
        d = self.dim
        if k is None:
            p = np.arange(d * d)
            rows, cols = p % d, p // d
        else:
            rows, cols = self.basis.coherence_block(k)
        h = self.hamiltonian.matrix
        unitary = _kernels.multiply_block(rows, cols, -1j * h, 1j * h)
        parts = []
        for (ops, rates), g in zip(self._stacks, self._decay):
            if k is None:
                sandwich = _full_sandwich(ops, rates)
            else:
                sandwich = _kernels.sandwich_block(rows, cols, ops, rates)
            parts.append(2.0 * sandwich + _kernels.multiply_block(rows, cols, -g, -g))
        blk = GeneratorBlock(rows, cols, unitary, tuple(parts))
        self._blocks[k] = blk
        return blk

    @property
    def unitary_part(self) -> np.ndarray:
        """Full ``d^2 x d^2`` matrix of ``-i[H, .]``."""
        return self.block(None).unitary

    @property
    def dissipators(self) -> tuple[np.ndarray, ...]:
        return self.block(None).dissipators

    @property
    def total(self) -> np.ndarray:
        return self.block(None).total


def _full_sandwich(ops: np.ndarray, rates: np.ndarray) -> np.ndarray:
    # vec(L rho L^dag) = (conj(L) (x) L) vec(rho)
    k, d, _ = ops.shape
    if k == 0:
        return np.zeros((d * d, d * d), dtype=np.complex128)
    left = (ops.conj() * rates[:, None, None]).reshape(k, d * d)  # [k, (j,l)]
    right = ops.reshape(k, d * d)  # [k, (i,m)]
    s4 = (left.T @ right).reshape(d, d, d, d)  # [j, l, i, m]
    return np.ascontiguousarray(s4.transpose(0, 2, 1, 3)).reshape(d * d, d * d)


def _as_bath_tuple(baths) -> tuple[BathSpec, ...]:
    if isinstance(baths, BathSpec):
        baths = (baths,)
    baths = tuple(baths)
    if not baths:
        raise ValueError("at least one bath is required")
    if len(baths) > 2:
        raise ValueError("the dimer supports one or two baths")
    for b in baths:
        if not isinstance(b, BathSpec):
            raise TypeError(f"expected BathSpec, got {type(b).__name__}")
    return baths


def _channels_for(raw, bath: BathSpec, tol: float) -> tuple[tuple[JumpChannel, ...], int]:
    chans = []
    dropped = 0
    for nu, op in raw:
        if abs(nu) <= tol:
            dropped += 1
            continue
        folded = nu < 0
        lower = op.dag() if folded else op
        nu = abs(nu)
        nbar = bose_occupation(nu, bath.temperature)
        chans.append(
            JumpChannel(
                nu=nu,
                lower=lower,
                rate_down=bath.gamma * nu * (nbar + 1.0),
                rate_up=bath.gamma * nu * nbar,
                folded=folded,
            )
        )
    return tuple(chans), dropped


def _assemble(h, spec, decompositions, baths, tol) -> Liouvillian:
    channels = []
    dropped = 0
    for raw, bath in zip(decompositions, baths):
        chans, n_drop = _channels_for(raw, bath, tol)
        channels.append(chans)
        dropped += n_drop
    return Liouvillian(
        hamiltonian=h,
        baths=baths,
        channels=tuple(channels),
        spectrum=spec,
        decompositions=decompositions,
        cluster_tol=tol,
        dropped_zero_channels=dropped,
    )


def build_liouvillian(
    h: QuantumOperator,
    baths: BathSpec | Sequence[BathSpec],
    *,
    symmetric: bool = True,
    couplings: Sequence[QuantumOperator] | None = None,
    cluster_tol: float = 1e-9,
) -> Liouvillian:
    """Assemble the secular Lindblad generator for one or two baths.

    Parameters
    ----------
    h : QuantumOperator
        Hermitian system Hamiltonian.
    baths : BathSpec or sequence of BathSpec
        One or two reservoirs.
    symmetric : bool
        ``True`` couples every bath to the symmetric mode ``(a + b)/sqrt2``.
        ``False`` couples bath 1 to cavity ``a`` and bath 2 to cavity ``b``.
    couplings : sequence of QuantumOperator, optional
        Explicit system coupling operator per bath; overrides ``symmetric``.
    cluster_tol : float
        Bohr frequencies closer than this are merged; channels with
        ``|nu| <= cluster_tol`` are dropped and counted in
        ``dropped_zero_channels``.
    """
    baths = _as_bath_tuple(baths)
    if not cluster_tol > 0:
        raise ValueError("cluster_tol must be positive")
    basis = h.basis
    if couplings is None:
        if symmetric:
            c, _ = normal_mode_annihilators(basis)
            couplings = [c] * len(baths)
        else:
            couplings = [annihilator(basis, Mode.A), annihilator(basis, Mode.B)][: len(baths)]
    if len(couplings) != len(baths):
        raise ValueError("need exactly one coupling operator per bath")
    spec = spectrum(h, cluster_tol=cluster_tol)
    cache: dict[int, tuple] = {}
    decomps = []
    for c in couplings:
        key = id(c)
        if key not in cache:
            cache[key] = tuple(secular_decomposition(spec, c, cluster_tol))
        decomps.append(cache[key])
    return _assemble(h, spec, tuple(decomps), baths, cluster_tol)


def all_rates_nonnegative(liouvillian: Liouvillian) -> bool:
    """True iff every channel frequency is positive and every rate finite and >= 0."""
    for chans in liouvillian.channels:
        for ch in chans:
            if not (ch.nu > 0 and np.isfinite(ch.rate_down) and np.isfinite(ch.rate_up)):
                return False
            if ch.rate_down < 0 or ch.rate_up < 0:
                return False
    return True


def gibbs_state(h: QuantumOperator, temperature: float) -> np.ndarray:
    """``exp(-H/T) / Z`` on the truncated space."""
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    spec = spectrum(h)
    e = spec.eigenvalues
    w = np.exp(-(e - e[0]) / temperature)
    w /= w.sum()
    v = spec.eigenvectors
    return (v * w) @ v.conj().T
