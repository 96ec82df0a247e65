"""
Mean-field (coherent-amplitude) dynamics of the nonlinear dimer at ``J = 0``.

    i da/dt = omega a + 2 Y b^2 conj(a) + Z |b|^2 a
    i db/dt = omega b + 2 Y a^2 conj(b) + Z |a|^2 b

With ``a = r e^{i phi_a}``, ``|a|^2 + |b|^2 = n`` and ``theta = phi_a - phi_b``:

    d theta/dt = -(n - 2 r^2) (2 Y cos 2theta + Z)
    d r^2/dt   = -4 Y r^2 (n - r^2) sin 2theta

so the total power ``n`` is conserved and pure SFWM has Kuramoto-type
phase dynamics, while pure XPM only shifts the phase difference at a
``theta``-independent rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels
from .errors import ToleranceError

__all__ = [
    "MeanFieldState",
    "MeanFieldSeries",
    "PhaseRates",
    "StationaryBranch",
    "PhasePlane",
    "mean_field_rhs",
    "integrate_mean_field",
    "phase_rhs",
    "theta_rate",
    "amplitude_closed_form",
    "stationary_solutions",
    "stationary_residual",
    "is_phase_locked",
    "phase_plane",
]


@dataclass(frozen=True)
class MeanFieldState:
    a0: complex
    b0: complex

    @property
    def r(self) -> float:
        return abs(self.a0)

    @property
    def total(self) -> float:
        return abs(self.a0) ** 2 + abs(self.b0) ** 2

    @property
    def phi_a(self) -> float:
        return float(np.angle(self.a0))

    @property
    def phi_b(self) -> float:
        return float(np.angle(self.b0))

    @property
    def theta(self) -> float:
        return self.phi_a - self.phi_b

    @classmethod
    def from_polar(cls, total: float, r2: float, theta: float, phi_b: float = 0.0) -> "MeanFieldState":
        """State with ``|a|^2 = r2``, ``|b|^2 = total - r2`` and phase difference ``theta``."""
        if not 0 <= r2 <= total * (1 + 1e-12):
            raise ValueError("need 0 <= r2 <= total")
        r2 = min(r2, total)
        a0 = np.sqrt(r2) * np.exp(1j * (theta + phi_b))
        b0 = np.sqrt(total - r2) * np.exp(1j * phi_b)
        return cls(complex(a0), complex(b0))

    def as_vector(self) -> np.ndarray:
        return np.array([self.a0.real, self.a0.imag, self.b0.real, self.b0.imag])

    @classmethod
    def from_vector(cls, y) -> "MeanFieldState":
        return cls(complex(y[0], y[1]), complex(y[2], y[3]))


def mean_field_rhs(state: MeanFieldState, omega: float, y: float, z: float) -> tuple[complex, complex]:
    """``(da/dt, db/dt)``."""
    out = _kernels.mean_field_rhs(state.as_vector(), float(omega), float(y), float(z))
    return complex(out[0], out[1]), complex(out[2], out[3])


@dataclass(frozen=True, eq=False)
class MeanFieldSeries:
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def r2(self) -> np.ndarray:
        return np.abs(self.a) ** 2

    @property
    def total(self) -> np.ndarray:
        return np.abs(self.a) ** 2 + np.abs(self.b) ** 2

    @property
    def theta(self) -> np.ndarray:
        """Unwrapped phase difference."""
        return np.unwrap(np.angle(self.a) - np.angle(self.b))

    def state(self, k: int) -> MeanFieldState:
        return MeanFieldState(complex(self.a[k]), complex(self.b[k]))


def integrate_mean_field(
    state0: MeanFieldState,
    omega: float,
    y: float,
    z: float,
    t_grid,
    *,
    rtol: float = 1e-11,
    atol: float = 1e-13,
    power_tol: float = 1e-8,
) -> MeanFieldSeries:
    """DOP853 integration sampled on ``t_grid``.

    Raises :class:`ToleranceError` if the total power drifts by more than
    ``power_tol`` relative.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly ascending")
    n0 = state0.total
    if not n0 > 0:
        raise ValueError("initial state must carry nonzero power")
    rhs = _kernels.mean_field_rhs
    args = (float(omega), float(y), float(z))
    sol = solve_ivp(
        lambda _t, v: rhs(v, *args),
        (t_grid[0], t_grid[-1]),
        state0.as_vector(),
        method="DOP853",
        t_eval=t_grid,
        rtol=rtol,
        atol=atol * np.sqrt(n0),
    )
    if not sol.success:
        raise ToleranceError(f"mean-field integration failed: {sol.message}", time=float(sol.t[-1]))
    a = sol.y[0] + 1j * sol.y[1]
    b = sol.y[2] + 1j * sol.y[3]
    series = MeanFieldSeries(t_grid, a, b)
    drift = np.abs(series.total - n0) / n0
    worst = int(np.argmax(drift))
    if drift[worst] > power_tol:
        raise ToleranceError(
            f"total power drifted by {drift[worst]:.3e} (relative)", time=float(t_grid[worst]), value=float(drift[worst])
        )
    return series


@dataclass(frozen=True)
class PhaseRates:
    dphi_a: float
    dphi_b: float

    @property
    def dtheta(self) -> float:
        return self.dphi_a - self.dphi_b


def phase_rhs(r: float, theta: float, omega: float, y: float, z: float, total: float) -> PhaseRates:
    """Phase velocities for ``|a| = r`` and power ``total``; requires ``0 < r^2 < total``."""
    r2 = r * r
    if not 0 < r2 < total:
        raise ValueError(f"phases are undefined unless 0 < r^2 < n (r^2 = {r2}, n = {total})")
    c2 = np.cos(2.0 * theta)
    nb = total - r2
    return PhaseRates(
        dphi_a=float(-omega - 2.0 * y * nb * c2 - z * nb),
        dphi_b=float(-omega - 2.0 * y * r2 * c2 - z * r2),
    )


def theta_rate(series: MeanFieldSeries, y: float, z: float) -> np.ndarray:
    """``d theta/dt`` along a series, from the closed expression."""
    n = series.total
    return -(n - 2.0 * series.r2) * (2.0 * y * np.cos(2.0 * series.theta) + z)


def amplitude_closed_form(total: float, y: float, theta_locked: float, t) -> np.ndarray:
    """``r^2(t) = n / (1 + exp(4 Y n sin(2 theta) t))`` for a locked phase."""
    t = np.asarray(t, dtype=np.float64)
    expo = 4.0 * y * total * np.sin(2.0 * theta_locked) * t
    with np.errstate(over="ignore"):
        return total / (1.0 + np.exp(expo))


@dataclass(frozen=True)
class StationaryBranch:
    """Stationary amplitudes ``a, b ~ e^{-i E t}``.

    ``thetas`` is ``None`` when every phase difference is allowed.
    """

    energy: float
    r: float
    thetas: tuple[float, ...] | None
    label: str


def stationary_solutions(omega: float, y: float, z: float, total: float) -> list[StationaryBranch]:
    """All stationary branches at power ``total``.

    Synchronized branches have ``r^2 = n/2`` and ``E = omega + Y n cos 2theta + Z n/2``
    with ``sin 2theta = 0`` whenever ``Y > 0``; the trivial branches put all
    power in one mode with ``E = omega``.
    """
    if not total > 0:
        raise ValueError("total power must be positive")
    half = float(np.sqrt(total / 2.0))
    shift = omega + z * total / 2.0
    out = []
    if y > 0:
        out.append(StationaryBranch(shift + y * total, half, (0.0, np.pi), "in-phase"))
        out.append(StationaryBranch(shift - y * total, half, (np.pi / 2, 3 * np.pi / 2), "anti-phase"))
    else:
        out.append(StationaryBranch(shift, half, None, "any-phase"))
    out.append(StationaryBranch(float(omega), 0.0, None, "trivial-b"))
    out.append(StationaryBranch(float(omega), float(np.sqrt(total)), None, "trivial-a"))
    return out


def stationary_residual(
    branch: StationaryBranch, omega: float, y: float, z: float, total: float, n_theta: int = 16
) -> float:
    """Largest ``|d/dt (a, b) + i E (a, b)|`` over the branch's phase set."""
    thetas = branch.thetas if branch.thetas is not None else np.linspace(0, 2 * np.pi, n_theta, endpoint=False)
    worst = 0.0
    for th in thetas:
        st = MeanFieldState.from_polar(total, branch.r**2, th, phi_b=0.3)
        da, db = mean_field_rhs(st, omega, y, z)
        res = max(abs(da + 1j * branch.energy * st.a0), abs(db + 1j * branch.energy * st.b0))
        worst = max(worst, res)
    return worst


def is_phase_locked(series: MeanFieldSeries, y: float, z: float, omega: float = 1.0, tol: float = 1e-6) -> bool:
    """``|d theta/dt| < tol * omega`` throughout the last ``10/omega`` of the series."""
    window = 10.0 / omega
    if series.times[-1] - series.times[0] < window:
        raise ValueError("series is shorter than the locking window")
    tail = series.times >= series.times[-1] - window
    return bool(np.all(np.abs(theta_rate(series, y, z)[tail]) < tol * omega))


@dataclass(frozen=True, eq=False)
class PhasePlane:
    theta: np.ndarray
    r2: np.ndarray
    dtheta: np.ndarray
    dr2: np.ndarray


def phase_plane(total: float, y: float, z: float, n_theta: int = 41, n_r2: int = 41) -> PhasePlane:
    """Vector field ``(d theta/dt, d r^2/dt)`` on ``[0, pi] x [0, n]``."""
    theta = np.linspace(0.0, np.pi, n_theta)
    r2 = np.linspace(0.0, total, n_r2)
    dtheta, dr2 = _kernels.phase_plane(theta, r2, float(total), float(y), float(z))
    return PhasePlane(theta, r2, dtheta, dr2)
