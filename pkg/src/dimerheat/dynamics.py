"""
Time evolution and steady states of Lindblad generators.

Propagation works on the smallest invariant coherence block that contains
the initial state.  The block with ``N_i == N_j`` (285 entries at
``n_max = 8`` instead of 2025) holds the vacuum, Gibbs states and every
steady state, so most runs never touch the full superoperator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import _kernels
from .errors import BasisMismatchError, ToleranceError
from .fock import FockBasis, QuantumOperator
from .lindblad import GeneratorBlock, Liouvillian

__all__ = [
    "Trajectory",
    "SteadyState",
    "propagate",
    "steady_state",
    "expectation_series",
    "trace_distance",
    "check_density_matrix",
    "doubling_time_grid",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of ``d rho/dt = L(rho)``.

    ``states`` is ``None`` when only observables were retained.
    """

    times: np.ndarray
    states: np.ndarray | None
    observables: dict[str, np.ndarray]
    basis: FockBasis
    method: str
    tolerances: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True, eq=False)
class SteadyState:
    rho: np.ndarray
    degenerate: bool
    null_dim: int
    residual: float


def check_density_matrix(rho: np.ndarray, *, time: float | None = None) -> float:
    """Validate Hermiticity, unit trace and positivity; return the smallest eigenvalue.

    Raises :class:`ToleranceError` (carrying ``time``) when a bound is violated.
    """
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise ToleranceError(f"state not Hermitian (deviation {herm:.3e})", time=time, value=herm)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ToleranceError(f"trace drifted to {tr:.12f}", time=time, value=tr)
    lam = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if lam < -POSITIVITY_TOL:
        raise ToleranceError(f"negative eigenvalue {lam:.3e}", time=time, value=lam)
    return lam


def _as_matrix(op, basis: FockBasis) -> np.ndarray:
    if isinstance(op, QuantumOperator):
        if op.basis != basis:
            raise BasisMismatchError("observable lives on a different basis")
        return op.matrix
    m = np.asarray(op)
    if m.shape != (basis.dim, basis.dim):
        raise BasisMismatchError(f"observable shape {m.shape} does not match dimension {basis.dim}")
    return m


def _block_for(liouvillian: Liouvillian, rho: np.ndarray) -> GeneratorBlock:
    totals = liouvillian.basis.totals
    off = totals[:, None] != totals[None, :]
    if np.abs(rho[off]).max(initial=0.0) == 0.0:
        return liouvillian.block(0)
    return liouvillian.block(None)


def _swap_index(blk: GeneratorBlock) -> np.ndarray:
    # position of rho[j, i] for every block entry rho[i, j]
    n = int(max(blk.rows.max(), blk.cols.max())) + 1
    key = blk.rows * n + blk.cols
    order = np.argsort(key)
    return order[np.searchsorted(key[order], blk.cols * n + blk.rows)]


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a nonempty 1-d array")
    if times[0] != 0.0:
        raise ValueError("times must start at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    return times


def _step_plan(times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # distinct step sizes (to 1e-12 relative) so each needs one expm
    dts = np.diff(times)
    if dts.size == 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    order = np.argsort(dts, kind="stable")
    labels = _kernels.cluster_sorted(dts[order], 1e-12 * dts.max())
    ids = np.empty(dts.size, dtype=np.int64)
    ids[order] = labels
    uniq = np.bincount(ids, weights=dts) / np.bincount(ids)
    return uniq, ids


def propagate(
    liouvillian: Liouvillian,
    rho0,
    times,
    *,
    method: str = "expm",
    observables: Mapping[str, object] | None = None,
    keep_states: bool = True,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    check: bool = True,
) -> Trajectory:
    """Solve the master equation on a time grid.

    Parameters
    ----------
    liouvillian : Liouvillian
    rho0 : array_like
        Initial density matrix (validated).
    times : array_like
        Strictly ascending, starting at 0.
    method : {"expm", "rk"}
        ``"expm"`` multiplies by ``exp(L dt)`` (one exponential per distinct
        step); ``"rk"`` uses adaptive DOP853 with ``rtol``/``atol``.
    observables : mapping, optional
        Name to Hermitian operator; ``Tr[O rho(t)]`` is recorded for each.
    keep_states : bool
        Store every density matrix (``False`` keeps observables only).
    check : bool
        Enforce trace, Hermiticity and positivity at every stored time.
    """
    basis = liouvillian.basis
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (basis.dim, basis.dim):
        raise BasisMismatchError(f"rho0 shape {rho0.shape} does not match dimension {basis.dim}")
    try:
        check_density_matrix(rho0, time=0.0)
    except ToleranceError as exc:
        raise ValueError(f"invalid initial state: {exc}") from None
    times = _check_times(times)
    blk = _block_for(liouvillian, rho0)
    v0 = blk.gather(rho0)

    if method == "expm":
        uniq, ids = _step_plan(times)
        gen = blk.total
        props = np.array([expm(dt * gen) for dt in uniq]) if uniq.size else np.zeros((0, v0.size, v0.size), complex)
        vecs = _kernels.propagate_steps(np.ascontiguousarray(props), ids, v0)
        tolerances = {"expm_steps": float(uniq.size)}
    elif method == "rk":
        gen = blk.total
        if times.size == 1:
            vecs = v0[None, :]
        else:
            sol = solve_ivp(
                lambda _t, y: gen @ y,
                (0.0, times[-1]),
                v0,
                method="DOP853",
                t_eval=times,
                rtol=rtol,
                atol=atol,
            )
            if not sol.success:
                raise ToleranceError(f"integrator failed: {sol.message}", time=float(sol.t[-1]))
            vecs = sol.y.T
        # dense output is not exactly Hermiticity-preserving; project back and record the deviation
        swap = _swap_index(blk)
        anti = 0.5 * (vecs - vecs[:, swap].conj())
        vecs = vecs - anti
        tolerances = {"rtol": rtol, "atol": atol, "antihermitian_removed": float(np.abs(anti).max(initial=0.0))}
    else:
        raise ValueError(f"unknown method {method!r}")

    d = basis.dim
    obs_out = {}
    for name, op in (observables or {}).items():
        w = blk.functional(_as_matrix(op, basis))
        obs_out[name] = (vecs @ w).real
    states = np.zeros((times.size, d, d), dtype=np.complex128) if keep_states else None
    rho = np.zeros((d, d), dtype=np.complex128)
    for n in range(times.size):
        rho[blk.rows, blk.cols] = vecs[n]
        if check:
            check_density_matrix(rho, time=float(times[n]))
        if keep_states:
            states[n] = rho
    return Trajectory(times, states, obs_out, basis, method, tolerances)


def _null_spaces(m: np.ndarray, rel_tol: float) -> tuple[np.ndarray, np.ndarray]:
    u, s, vh = np.linalg.svd(m)
    cut = rel_tol * max(s[0], 1e-300)
    null = s <= cut
    return vh[null].conj().T, u[:, null]


def steady_state(
    liouvillian: Liouvillian,
    reference=None,
    *,
    method: str = "block",
    null_tol: float = 1e-11,
    residual_tol: float = RESIDUAL_TOL,
) -> SteadyState:
    """Stationary state reached from ``reference`` (default: maximally mixed).

    The right null space ``R`` and left null space ``F`` of the generator
    give the long-time projector ``R (F^dag R)^-1 F^dag``; a one-dimensional
    null space makes the result independent of ``reference``.

    ``method="block"`` works in the ``N_i == N_j`` block, ``"dense"`` on the
    full superoperator.  Raises :class:`ToleranceError` if ``||L(rho)||``
    exceeds ``residual_tol``.
    """
    basis = liouvillian.basis
    d = basis.dim
    if reference is None:
        reference = np.eye(d, dtype=np.complex128) / d
    reference = np.asarray(reference, dtype=np.complex128)
    if reference.shape != (d, d):
        raise BasisMismatchError("reference state has the wrong shape")
    if method == "block":
        blk = liouvillian.block(0)
    elif method == "dense":
        blk = liouvillian.block(None)
    else:
        raise ValueError(f"unknown method {method!r}")
    gen = blk.total
    right, left = _null_spaces(gen, null_tol)
    if right.shape[1] == 0:
        raise ToleranceError("generator has no numerical null space")
    v = blk.gather(reference)
    coeff = np.linalg.solve(left.conj().T @ right, left.conj().T @ v)
    rho = blk.scatter(right @ coeff, d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise ToleranceError("projected steady state has zero trace", value=tr)
    rho /= tr
    residual = float(np.linalg.norm(gen @ blk.gather(rho)))
    if residual > residual_tol:
        raise ToleranceError(f"steady-state residual {residual:.3e}", value=residual)
    return SteadyState(rho, right.shape[1] > 1, right.shape[1], residual)


def expectation_series(traj: Trajectory, op) -> tuple[np.ndarray, np.ndarray]:
    """``(times, Tr[op rho(t)])`` for a Hermitian ``op``; needs stored states."""
    m = _as_matrix(op, traj.basis)
    if traj.states is None:
        raise ValueError("trajectory was propagated without states")
    vals = np.einsum("ij,tji->t", m, traj.states)
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.abs(vals.imag).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("operator is not Hermitian: imaginary expectation values")
    return traj.times, vals.real


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``(1/2) ||rho - sigma||_1``."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def doubling_time_grid(t_final: float, dt0: float, steps_per_segment: int = 64) -> np.ndarray:
    """Piecewise-uniform grid from 0 to ``t_final`` whose step doubles each segment.

    Resolves the early transient finely while keeping the number of
    distinct matrix exponentials logarithmic in ``t_final / dt0``.
    """
    if not (t_final > 0 and dt0 > 0):
        raise ValueError("t_final and dt0 must be positive")
    if steps_per_segment < 1:
        raise ValueError("steps_per_segment must be at least 1")
    pts = [0.0]
    dt = dt0
    t = 0.0
    while t < t_final:
        seg = t + dt * np.arange(1, steps_per_segment + 1)
        seg = seg[seg < t_final * (1 - 1e-12)]
        pts.extend(seg.tolist())
        t = t + dt * steps_per_segment
        dt *= 2.0
    pts.append(float(t_final))
    return np.asarray(pts)
