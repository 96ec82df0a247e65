"""
Wall-clock comparison of the numba and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N] [--n-max N]

Each kernel is called once untimed (numba compilation / cache load), then
timed ``--repeat`` times; the best time is reported together with the
largest absolute difference between the two backends' outputs.
"""

import argparse
import time

import numpy as np

from dimerheat import _kernels
from dimerheat.fock import build_basis
from dimerheat.hamiltonians import DimerParams, Interaction, build_hamiltonian
from dimerheat.lindblad import BathSpec, build_liouvillian
from dimerheat.observables import PositionGrid


def best_of(fn, args, repeat):
    fn(*args)
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def max_diff(x, y):
    if isinstance(x, tuple):
        return max(max_diff(a, b) for a, b in zip(x, y))
    return float(np.abs(np.asarray(x) - np.asarray(y)).max())


def cases(n_max):
    basis = build_basis(n_max)
    h = build_hamiltonian(basis, DimerParams(y=1.0, kind=Interaction.SFWM))
    liou = build_liouvillian(h, BathSpec(0.5, 0.01))
    ops, rates = liou._stacks[0]
    rows, cols = basis.coherence_block(0)
    hm = h.matrix
    grid = PositionGrid()
    psi = _kernels.NUMPY.hermite_functions(n_max, grid.x)
    rng = np.random.default_rng(0)
    rho = basis.vacuum() * 0.5 + np.eye(basis.dim) * 0.5 / basis.dim
    occ = basis.occupations
    blk = liou.block(0)
    props = np.array([np.eye(blk.size) + 1e-3 * blk.total])
    v0 = blk.gather(rho)
    vals = np.sort(rng.normal(size=20000))
    theta = np.linspace(0, np.pi, 201)
    r2 = np.linspace(0, 2, 201)
    return {
        "sandwich_block": (rows, cols, ops, rates),
        "multiply_block": (rows, cols, -1j * hm, 1j * hm),
        "pdf_contract": (rho, psi, psi, np.ascontiguousarray(occ[:, 0]), np.ascontiguousarray(occ[:, 1])),
        "hermite_functions": (n_max, grid.x),
        "propagate_steps": (props, np.zeros(500, dtype=np.int64), v0),
        "cluster_sorted": (vals, 1e-4),
        "mean_field_rhs": (np.array([0.3, 0.1, -0.2, 0.5]), 1.0, 0.3, 0.1),
        "phase_plane": (theta, r2, 2.0, 0.3, 0.1),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--n-max", type=int, default=8)
    args = parser.parse_args()
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'kernel':<20} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9} {'max |diff|':>12}")
    for name, call_args in cases(args.n_max).items():
        t_np, out_np = best_of(getattr(_kernels.NUMPY, name), call_args, args.repeat)
        t_nb, out_nb = best_of(getattr(_kernels.NUMBA, name), call_args, args.repeat)
        print(
            f"{name:<20} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {t_np / t_nb:>9.2f} {max_diff(out_np, out_nb):>12.2e}"
        )


if __name__ == "__main__":
    main()
