"""
Heat currents, integrated heat, linear-chain closed forms and parameter scans.

Sign convention: a positive current carries energy from a bath into the
dimer.  The current delivered by bath ``i`` is ``Tr[H D_i(rho)]``, evaluated
as ``Tr[h_i rho]`` with the adjoint-dissipator image ``h_i`` of ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import minimize_scalar

from .dynamics import Trajectory, doubling_time_grid, propagate, steady_state
from .fock import build_basis
from .hamiltonians import DimerParams, Interaction, build_hamiltonian
from .lindblad import BathSpec, Liouvillian, bose_occupation, build_liouvillian

__all__ = [
    "CurrentSeries",
    "current_observables",
    "heat_current_series",
    "integrated_heat",
    "LinearOneBath",
    "LinearTwoBath",
    "analytic_linear_one_bath",
    "analytic_linear_two_bath",
    "landauer_current",
    "Conductivity",
    "thermal_conductivity",
    "conductivity_formula",
    "conductivity_peak",
    "fit_decay_rate",
    "NessScan",
    "ness_current_scan",
    "HeatMap",
    "heat_map",
    "heat_transient",
    "default_time_grid",
]


# --- numerical currents ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurrentSeries:
    """Per-bath currents ``per_bath[i, k] = I_i(t_k)`` with totals and heat."""

    times: np.ndarray
    per_bath: np.ndarray
    total: np.ndarray
    net: np.ndarray | None
    heat: np.ndarray


def current_observables(liouvillian: Liouvillian) -> dict[str, np.ndarray]:
    """Observables ``heat_i`` whose expectation is the current from bath ``i``."""
    return {f"heat_{i}": liouvillian.heat_operator(i) for i in range(liouvillian.n_baths)}


def integrated_heat(times, current) -> np.ndarray:
    """Cumulative trapezoid ``Q(t) = int_0^t I``, with ``Q(0) = 0``."""
    times = np.asarray(times, dtype=np.float64)
    current = np.asarray(current, dtype=np.float64)
    if times.shape != current.shape:
        raise ValueError("times and current must have the same shape")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    return cumulative_trapezoid(current, times, initial=0.0)


def heat_current_series(liouvillian: Liouvillian, traj: Trajectory) -> CurrentSeries:
    """Currents along a trajectory.

    Uses the ``heat_i`` observables recorded during propagation when present
    (see :func:`current_observables`), otherwise the stored states.
    """
    if traj.basis != liouvillian.basis:
        from .errors import BasisMismatchError

        raise BasisMismatchError("trajectory and generator use different bases")
    rows = []
    for i in range(liouvillian.n_baths):
        key = f"heat_{i}"
        if key in traj.observables:
            rows.append(np.asarray(traj.observables[key]))
        elif traj.states is not None:
            h_i = liouvillian.heat_operator(i)
            rows.append(np.einsum("ij,tji->t", h_i, traj.states).real)
        else:
            raise ValueError(f"trajectory has neither states nor the {key!r} observable")
    per_bath = np.array(rows)
    total = per_bath.sum(axis=0)
    net = per_bath[0] - per_bath[1] if per_bath.shape[0] == 2 else None
    return CurrentSeries(traj.times, per_bath, total, net, integrated_heat(traj.times, total))


# --- closed forms for the linear dimer --------------------------------------


@dataclass(frozen=True)
class LinearOneBath:
    """Symmetric-mode occupation and current of the linear dimer, one bath.

    ``occupation(t) = nbar + (n0 - nbar) e^{-2 Gamma E t}``,
    ``current(t) = 2 Gamma E^2 (nbar - n0) e^{-2 Gamma E t}`` with ``E = omega + J``.
    """

    energy: float
    gamma: float
    nbar: float
    n0: float

    @property
    def rate(self) -> float:
        return 2.0 * self.gamma * self.energy

    @property
    def relaxation_time(self) -> float:
        return 1.0 / self.rate

    def occupation(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return self.nbar + (self.n0 - self.nbar) * np.exp(-self.rate * t)

    def current(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return 2.0 * self.gamma * self.energy**2 * (self.nbar - self.n0) * np.exp(-self.rate * t)


def analytic_linear_one_bath(
    omega: float, j: float, gamma: float, temperature: float, n0_sym: float = 0.0
) -> LinearOneBath:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    e = omega + j
    return LinearOneBath(e, gamma, bose_occupation(e, temperature), n0_sym)


@dataclass(frozen=True)
class LinearTwoBath:
    """Linear dimer between two baths.

    With ``Gamma_T = Gamma_1 + Gamma_2`` and
    ``Gamma_T n_eff = Gamma_1 n_1 + Gamma_2 n_2``:

        I_tot(t) = 2 E^2 Gamma_T (n_eff - n0) e^{-2 E Gamma_T t}
        I_net(t) = 2 E^2 [2 Gamma_eff (n_1 - n_2) + Gamma_diff (n_eff - n0) e^{-2 E Gamma_T t}]

    where ``Gamma_eff = Gamma_1 Gamma_2 / Gamma_T``, ``Gamma_diff = Gamma_1 - Gamma_2``.
    """

    energy: float
    gamma1: float
    gamma2: float
    nbar1: float
    nbar2: float
    n0: float

    @property
    def gamma_total(self) -> float:
        return self.gamma1 + self.gamma2

    @property
    def n_eff(self) -> float:
        return (self.gamma1 * self.nbar1 + self.gamma2 * self.nbar2) / self.gamma_total

    @property
    def rate(self) -> float:
        return 2.0 * self.energy * self.gamma_total

    def occupation(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return self.n_eff + (self.n0 - self.n_eff) * np.exp(-self.rate * t)

    def current(self, bath: int, t) -> np.ndarray:
        g, n = ((self.gamma1, self.nbar1), (self.gamma2, self.nbar2))[bath]
        return 2.0 * g * self.energy**2 * (n - self.occupation(t))

    def total_current(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        e2 = self.energy**2
        return 2.0 * e2 * self.gamma_total * (self.n_eff - self.n0) * np.exp(-self.rate * t)

    def net_current(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        diff = self.gamma1 - self.gamma2
        return 2.0 * self.energy**2 * (
            self.steady_factor + diff * (self.n_eff - self.n0) * np.exp(-self.rate * t)
        )

    @property
    def steady_factor(self) -> float:
        g_eff = self.gamma1 * self.gamma2 / self.gamma_total
        return 2.0 * g_eff * (self.nbar1 - self.nbar2)

    @property
    def steady_net_current(self) -> float:
        return 2.0 * self.energy**2 * self.steady_factor


def analytic_linear_two_bath(
    omega: float,
    j: float,
    gamma1: float,
    gamma2: float,
    t1: float,
    t2: float,
    n0_sym: float = 0.0,
) -> LinearTwoBath:
    if gamma1 < 0 or gamma2 < 0 or gamma1 + gamma2 == 0:
        raise ValueError("gammas must be nonnegative and not both zero")
    e = omega + j
    return LinearTwoBath(e, gamma1, gamma2, bose_occupation(e, t1), bose_occupation(e, t2), n0_sym)


def landauer_current(omega: float, j: float, gamma: float, t1: float, t2: float) -> float:
    """Steady net current for equal couplings: ``2 Gamma E^2 (n_1(E) - n_2(E))``."""
    e = omega + j
    return 2.0 * gamma * e**2 * (bose_occupation(e, t1) - bose_occupation(e, t2))


# --- thermal conductivity ----------------------------------------------------


def conductivity_formula(energy, gamma, temperature):
    """``16 Gamma E^3 / T^2 csch^2(E / 2T)``."""
    energy = np.asarray(energy, dtype=np.float64)
    temperature = np.asarray(temperature, dtype=np.float64)
    x = energy / (2.0 * temperature)
    with np.errstate(over="ignore"):
        return 16.0 * gamma * energy**3 / temperature**2 / np.sinh(x) ** 2


@dataclass(frozen=True)
class Conductivity:
    formula: float
    numerical: float

    @property
    def ratio(self) -> float:
        """``formula / numerical``; a constant when the shapes agree."""
        return self.formula / self.numerical


def thermal_conductivity(
    omega: float, j: float, gamma: float, temperature: float, rel_step: float = 1e-3
) -> Conductivity:
    """Closed-form conductivity and ``d I_net / d(T_1 - T_2)`` of :func:`landauer_current`.

    The derivative is a Richardson-extrapolated central difference around
    ``T_{1,2} = T +- dT/2``.
    """
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    e = omega + j

    def slope(h):
        return landauer_current(omega, j, gamma, temperature + h / 2, temperature - h / 2) / h

    h = rel_step * temperature
    numerical = (4.0 * slope(h / 2) - slope(h)) / 3.0
    return Conductivity(float(conductivity_formula(e, gamma, temperature)), float(numerical))


def conductivity_peak(temperature: float = 1.0) -> float:
    """``E/T`` maximizing :func:`conductivity_formula` at fixed ``T``."""
    res = minimize_scalar(
        lambda e: -conductivity_formula(e, 1.0, temperature),
        bounds=(0.1 * temperature, 20.0 * temperature),
        method="bounded",
        options={"xatol": 1e-10 * temperature},
    )
    return float(res.x / temperature)


def fit_decay_rate(times, values, floor: float = 1e-12) -> float:
    """Rate ``k`` of ``values ~ A e^{-k t}`` by least squares on ``log|values|``.

    Samples with ``|value| <= floor * max|value|`` are ignored.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.abs(np.asarray(values, dtype=np.float64))
    keep = values > floor * values.max()
    if keep.sum() < 2:
        raise ValueError("need at least two samples above the floor")
    slope, _ = np.polyfit(times[keep], np.log(values[keep]), 1)
    return float(-slope)


# --- scans -------------------------------------------------------------------


def _params(kind, strength: float, omega: float) -> DimerParams:
    kind = Interaction(kind)
    field = {Interaction.LINEAR: "j", Interaction.SFWM: "y", Interaction.XPM: "z"}.get(kind)
    if field is None:
        raise ValueError("scans need a single interaction kind")
    return DimerParams(omega=omega, kind=kind, **{field: float(strength)})


@dataclass(frozen=True, eq=False)
class NessScan:
    strengths: np.ndarray
    net: np.ndarray
    per_bath: np.ndarray
    degenerate: np.ndarray
    residual: np.ndarray

    @property
    def peak(self) -> float:
        return float(self.strengths[np.argmax(self.net)])


def ness_current_scan(
    kind,
    strengths: Sequence[float],
    temperature: float = 0.5,
    delta: float = 0.05,
    gamma: float = 0.01,
    n_max: int = 8,
    omega: float = 1.0,
    symmetric: bool = True,
) -> NessScan:
    """Steady net current across a strength grid.

    The baths sit at ``T (1 +- delta/2)``.  Conserved quantities make the
    steady state non-unique, so each point uses the state reached from the
    vacuum.
    """
    if not 0 < delta < 2:
        raise ValueError("delta must lie in (0, 2)")
    basis = build_basis(n_max)
    baths = (BathSpec(temperature * (1 + delta / 2), gamma), BathSpec(temperature * (1 - delta / 2), gamma))
    strengths = np.asarray(strengths, dtype=np.float64)
    per_bath = np.empty((strengths.size, 2))
    degenerate = np.empty(strengths.size, dtype=bool)
    residual = np.empty(strengths.size)
    vac = basis.vacuum()
    for k, s in enumerate(strengths):
        h = build_hamiltonian(basis, _params(kind, s, omega))
        liou = build_liouvillian(h, baths, symmetric=symmetric)
        ss = steady_state(liou, vac)
        for i in range(2):
            per_bath[k, i] = np.sum(liou.heat_operator(i) * ss.rho.T).real
        degenerate[k] = ss.degenerate
        residual[k] = ss.residual
    return NessScan(strengths, per_bath[:, 0] - per_bath[:, 1], per_bath, degenerate, residual)


def default_time_grid(gamma: float, omega: float = 1.0, horizon: float = 50.0) -> np.ndarray:
    """Grid to ``horizon / (Gamma omega)`` with initial step ``0.005 / Gamma``."""
    return doubling_time_grid(horizon / (gamma * omega), 0.005 / gamma)


def heat_transient(liouvillian: Liouvillian, times, rho0=None, *, method: str = "expm") -> CurrentSeries:
    """Propagate (vacuum by default) and return the current series."""
    if rho0 is None:
        rho0 = liouvillian.basis.vacuum()
    traj = propagate(
        liouvillian, rho0, times, method=method, observables=current_observables(liouvillian), keep_states=False
    )
    return heat_current_series(liouvillian, traj)


@dataclass(frozen=True, eq=False)
class HeatMap:
    """``heat[i, k]``: integrated heat at ``temperatures[i]``, ``strengths[k]``.

    ``heat_double`` is the same quantity at twice the horizon (convergence
    check); ``min_current`` is the smallest current seen along each transient.
    """

    temperatures: np.ndarray
    strengths: np.ndarray
    heat: np.ndarray
    heat_double: np.ndarray
    min_current: np.ndarray
    t_final: float


def heat_map(
    kind,
    temperatures: Sequence[float],
    strengths: Sequence[float],
    gamma: float = 0.01,
    n_max: int = 8,
    omega: float = 1.0,
    horizon: float = 50.0,
) -> HeatMap:
    """Integrated heat from the vacuum over a (temperature, strength) grid.

    Each strength reuses one secular decomposition across all temperatures.
    The transient runs to ``2 t_final`` so ``Q(t_final)`` and ``Q(2 t_final)``
    both come out of one propagation.
    """
    basis = build_basis(n_max)
    temperatures = np.asarray(temperatures, dtype=np.float64)
    strengths = np.asarray(strengths, dtype=np.float64)
    t_final = horizon / (gamma * omega)
    times = doubling_time_grid(2.0 * t_final, 0.005 / gamma)
    # make t_final itself a grid point
    times = np.union1d(times, [t_final])
    i_final = int(np.searchsorted(times, t_final))
    shape = (temperatures.size, strengths.size)
    heat = np.empty(shape)
    heat_double = np.empty(shape)
    min_current = np.empty(shape)
    for k, s in enumerate(strengths):
        h = build_hamiltonian(basis, _params(kind, s, omega))
        base = None
        for i, temp in enumerate(temperatures):
            bath = BathSpec(float(temp), gamma)
            base = build_liouvillian(h, bath) if base is None else base.with_baths([bath])
            series = heat_transient(base, times)
            heat[i, k] = series.heat[i_final]
            heat_double[i, k] = series.heat[-1]
            min_current[i, k] = series.total[: i_final + 1].min()
    return HeatMap(temperatures, strengths, heat, heat_double, min_current, t_final)
