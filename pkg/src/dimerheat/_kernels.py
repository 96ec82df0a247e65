"""
Hot numeric kernels with two interchangeable backends.

Every kernel exists twice: a loop implementation compiled with numba's
``@njit`` and a vectorized pure-numpy implementation.  The module-level
names (``hermite_functions``, ``sandwich_block``, ...) point at one of the
two, chosen once at import time:

    DIMERHEAT_NUMBA=0   force the numpy path
    DIMERHEAT_NUMBA=1   require numba (ImportError if unavailable)
    unset               numba when importable, numpy otherwise

Both backends are always importable as ``NUMPY`` / ``NUMBA`` namespaces so
tests and ``benchmarks/bench_kernels.py`` can compare them directly.
"""

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


# =============================================================================
# Hermite functions
# =============================================================================

def _hermite_functions_numpy(n_max, x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max + 1, x.size), dtype=np.float64)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (np.sqrt(2.0 / (n + 1)) * x * out[n]
                      - np.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


@njit(cache=True)
def _hermite_functions_numba(n_max, x):
    m = x.shape[0]
    out = np.empty((n_max + 1, m), dtype=np.float64)
    norm0 = np.pi ** -0.25
    for k in range(m):
        xk = x[k]
        prev = norm0 * np.exp(-0.5 * xk * xk)
        out[0, k] = prev
        if n_max >= 1:
            cur = np.sqrt(2.0) * xk * prev
            out[1, k] = cur
            for n in range(1, n_max):
                nxt = np.sqrt(2.0 / (n + 1)) * xk * cur - np.sqrt(n / (n + 1.0)) * prev
                out[n + 1, k] = nxt
                prev = cur
                cur = nxt
    return out


# =============================================================================
# Position-space density of a two-mode density matrix
# =============================================================================

def _pdf_contract_numpy(rho, psi1, psi2, na, nb):
    # phi[i, x1, x2] = psi1[na_i, x1] * psi2[nb_i, x2]
    phi = psi1[na][:, :, None] * psi2[nb][:, None, :]
    flat = phi.reshape(phi.shape[0], -1)
    mixed = rho @ flat
    return np.einsum("ik,ik->k", flat, mixed).reshape(phi.shape[1:])


@njit(cache=True)
def _pdf_contract_numba(rho, psi1, psi2, na, nb):
    d = rho.shape[0]
    n1 = psi1.shape[1]
    n2 = psi2.shape[1]
    out = np.zeros((n1, n2), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            r = rho[i, j]
            if r == 0:
                continue
            for u in range(n1):
                w = r * psi1[na[i], u] * psi1[na[j], u]
                if w == 0:
                    continue
                for v in range(n2):
                    out[u, v] += w * psi2[nb[i], v] * psi2[nb[j], v]
    return out


# =============================================================================
# Superoperator blocks
# =============================================================================
# Column-stacked vectorization: position p <-> rho[rows[p], cols[p]].
# sandwich_block(M)[p, q] = sum_k rates[k] ops[k, rows[p], rows[q]]
#                                        * conj(ops[k, cols[p], cols[q]])
# i.e. the matrix of rho -> sum_k rates[k] L_k rho L_k^dagger on the block.

def _sandwich_block_numpy(rows, cols, ops, rates):
    out = np.zeros((rows.size, rows.size), dtype=np.complex128)
    left = rows[:, None], rows[None, :]
    right = cols[:, None], cols[None, :]
    for k in range(ops.shape[0]):
        if rates[k] == 0.0:
            continue
        op = ops[k]
        out += rates[k] * op[left] * op[right].conj()
    return out


@njit(cache=True)
def _sandwich_block_numba(rows, cols, ops, rates):
    b = rows.shape[0]
    out = np.zeros((b, b), dtype=np.complex128)
    for k in range(ops.shape[0]):
        r = rates[k]
        if r == 0.0:
            continue
        for p in range(b):
            rp = rows[p]
            cp = cols[p]
            for q in range(b):
                x = ops[k, rp, rows[q]]
                if x == 0:
                    continue
                y = ops[k, cp, cols[q]]
                if y == 0:
                    continue
                out[p, q] += r * x * np.conj(y)
    return out


def _multiply_block_numpy(rows, cols, left, right):
    # rho -> left @ rho + rho @ right, restricted to the block
    same_col = cols[:, None] == cols[None, :]
    same_row = rows[:, None] == rows[None, :]
    return (left[rows[:, None], rows[None, :]] * same_col
            + same_row * right[cols[None, :], cols[:, None]])


@njit(cache=True)
def _multiply_block_numba(rows, cols, left, right):
    b = rows.shape[0]
    out = np.zeros((b, b), dtype=np.complex128)
    for p in range(b):
        for q in range(b):
            v = 0j
            if cols[p] == cols[q]:
                v += left[rows[p], rows[q]]
            if rows[p] == rows[q]:
                v += right[cols[q], cols[p]]
            out[p, q] = v
    return out


# =============================================================================
# Stepping a linear system with precomputed propagators
# =============================================================================

def _propagate_steps_numpy(props, step_ids, v0):
    out = np.empty((step_ids.size + 1, v0.size), dtype=np.complex128)
    out[0] = v0
    v = v0
    for n, k in enumerate(step_ids):
        v = props[k] @ v
        out[n + 1] = v
    return out


@njit(cache=True)
def _propagate_steps_numba(props, step_ids, v0):
    m = step_ids.shape[0]
    out = np.empty((m + 1, v0.shape[0]), dtype=np.complex128)
    out[0] = v0
    v = v0.copy()
    for n in range(m):
        v = np.dot(props[step_ids[n]], v)
        out[n + 1] = v
    return out


# =============================================================================
# Single-linkage clustering of sorted reals
# =============================================================================

def _cluster_sorted_numpy(values, tol):
    if values.size == 0:
        return np.zeros(0, dtype=np.int64)
    jumps = np.diff(values) > tol
    return np.concatenate(([0], np.cumsum(jumps))).astype(np.int64)


@njit(cache=True)
def _cluster_sorted_numba(values, tol):
    n = values.shape[0]
    labels = np.zeros(n, dtype=np.int64)
    label = 0
    for i in range(1, n):
        if values[i] - values[i - 1] > tol:
            label += 1
        labels[i] = label
    return labels


# =============================================================================
# Mean-field dimer: right-hand side and phase-plane samples
# =============================================================================
# State vector y = (Re a0, Im a0, Re b0, Im b0).

def _mean_field_rhs_numpy(y, omega, sfwm, xpm):
    a = y[0] + 1j * y[1]
    b = y[2] + 1j * y[3]
    da = -1j * (omega * a + 2.0 * sfwm * b * b * np.conj(a) + xpm * abs(b) ** 2 * a)
    db = -1j * (omega * b + 2.0 * sfwm * a * a * np.conj(b) + xpm * abs(a) ** 2 * b)
    return np.array([da.real, da.imag, db.real, db.imag])


@njit(cache=True)
def _mean_field_rhs_numba(y, omega, sfwm, xpm):
    a = y[0] + 1j * y[1]
    b = y[2] + 1j * y[3]
    na = a.real * a.real + a.imag * a.imag
    nb = b.real * b.real + b.imag * b.imag
    da = -1j * (omega * a + 2.0 * sfwm * b * b * np.conj(a) + xpm * nb * a)
    db = -1j * (omega * b + 2.0 * sfwm * a * a * np.conj(b) + xpm * na * b)
    out = np.empty(4)
    out[0] = da.real
    out[1] = da.imag
    out[2] = db.real
    out[3] = db.imag
    return out


def _phase_plane_numpy(theta, r2, total, sfwm, xpm):
    th = np.asarray(theta, dtype=np.float64)[:, None]
    r = np.asarray(r2, dtype=np.float64)[None, :]
    dtheta = -(total - 2.0 * r) * (2.0 * sfwm * np.cos(2.0 * th) + xpm)
    dr2 = -4.0 * sfwm * r * (total - r) * np.sin(2.0 * th)
    return dtheta, dr2


@njit(cache=True)
def _phase_plane_numba(theta, r2, total, sfwm, xpm):
    nt = theta.shape[0]
    nr = r2.shape[0]
    dtheta = np.empty((nt, nr))
    dr2 = np.empty((nt, nr))
    for i in range(nt):
        c2 = np.cos(2.0 * theta[i])
        s2 = np.sin(2.0 * theta[i])
        for k in range(nr):
            r = r2[k]
            dtheta[i, k] = -(total - 2.0 * r) * (2.0 * sfwm * c2 + xpm)
            dr2[i, k] = -4.0 * sfwm * r * (total - r) * s2
    return dtheta, dr2


# =============================================================================
# Backend selection
# =============================================================================

_NAMES = (
    "hermite_functions",
    "pdf_contract",
    "sandwich_block",
    "multiply_block",
    "propagate_steps",
    "cluster_sorted",
    "mean_field_rhs",
    "phase_plane",
)

NUMPY = SimpleNamespace(**{n: globals()[f"_{n}_numpy"] for n in _NAMES})
NUMBA = SimpleNamespace(**{n: globals()[f"_{n}_numba"] for n in _NAMES})


def _select_backend():
    flag = os.environ.get("DIMERHEAT_NUMBA", "").strip().lower()
    if flag in ("0", "false", "no", "off"):
        return "numpy"
    if flag in ("1", "true", "yes", "on") and not NUMBA_AVAILABLE:
        raise ImportError("DIMERHEAT_NUMBA=1 but numba is not importable")
    return "numba" if NUMBA_AVAILABLE else "numpy"


BACKEND = _select_backend()
_active = NUMBA if BACKEND == "numba" else NUMPY

hermite_functions = _active.hermite_functions
pdf_contract = _active.pdf_contract
sandwich_block = _active.sandwich_block
multiply_block = _active.multiply_block
propagate_steps = _active.propagate_steps
cluster_sorted = _active.cluster_sorted
mean_field_rhs = _active.mean_field_rhs
phase_plane = _active.phase_plane
