"""
Scenario definitions for the command-line driver.

Each scenario declares a flat schema of typed, validated parameters and a
runner returning ``(header, rows, results)``: CSV columns, a 2-d array (or
list of row tuples) of values and a small dict of summary numbers for the
manifest.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import algebra, thermo
from .dynamics import doubling_time_grid, propagate, steady_state
from .errors import ConfigError
from .fock import build_basis, normal_mode_annihilators, total_number
from .hamiltonians import DimerParams, Interaction, build_hamiltonian, vacuum_overlap_scan
from .lindblad import BathSpec, build_liouvillian
from .observables import PositionGrid, delocalization_measure, integrate_pdf, position_pdf
from .semiclassical import MeanFieldState, integrate_mean_field, phase_plane, theta_rate

__all__ = ["Param", "Scenario", "SCENARIOS", "resolve_config"]


@dataclass(frozen=True)
class Param:
    kind: type
    default: Any
    check: Callable[[Any], bool] | None = None
    rule: str = ""
    choices: tuple | None = None


def _pos(rule="must be positive"):
    return dict(check=lambda v: v > 0, rule=rule)


def _nonneg():
    return dict(check=lambda v: v >= 0, rule="must be nonnegative")


COMMON = {
    "omega": Param(float, 1.0, **_pos()),
    "gamma": Param(float, 0.01, **_pos()),
    "n_max": Param(int, 8, check=lambda v: 1 <= v <= 20, rule="must lie in 1..20"),
}
KIND = {"kind": Param(str, "sfwm", choices=("sfwm", "xpm"))}
TWO_BATH = {
    "temperature": Param(float, 0.5, **_pos()),
    "delta": Param(float, 0.05, check=lambda v: 0 <= v < 2, rule="must lie in [0, 2)"),
}


@dataclass(frozen=True)
class Scenario:
    name: str
    schema: dict[str, Param]
    run: Callable[[dict], tuple[list[str], np.ndarray, dict]]
    description: str = ""


def _coerce(name: str, spec: Param, value):
    if spec.kind is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0"):
            return value.lower() in ("true", "1")
        raise ConfigError(name, f"expected a boolean, got {value!r}")
    if spec.kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ConfigError(name, f"expected an integer, got {value!r}")
        try:
            f = float(value)
        except ValueError:
            raise ConfigError(name, f"expected an integer, got {value!r}") from None
        if not f.is_integer():
            raise ConfigError(name, f"expected an integer, got {value!r}")
        value = int(f)
    elif spec.kind is float:
        if isinstance(value, bool):
            raise ConfigError(name, f"expected a number, got {value!r}")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(name, f"expected a number, got {value!r}") from None
        if not math.isfinite(value):
            raise ConfigError(name, "must be finite")
    elif spec.kind is str:
        if not isinstance(value, str):
            raise ConfigError(name, f"expected a string, got {value!r}")
    if spec.choices is not None and value not in spec.choices:
        raise ConfigError(name, f"must be one of {', '.join(map(str, spec.choices))}")
    if spec.check is not None and not spec.check(value):
        raise ConfigError(name, spec.rule or "invalid value")
    return value


def resolve_config(scenario: Scenario, values: dict) -> dict:
    """Merge ``values`` over defaults, rejecting unknown keys and invalid values."""
    cfg = {}
    for key in values:
        if key not in scenario.schema:
            raise ConfigError(key, f"unknown parameter for scenario {scenario.name!r}")
    for key, spec in scenario.schema.items():
        raw = values.get(key, spec.default)
        cfg[key] = None if raw is None else _coerce(key, spec, raw)
    return cfg


def _grid(lo: float, hi: float, step: float, name: str) -> np.ndarray:
    if hi < lo:
        raise ConfigError(f"{name}_max", f"must be >= {name}_min")
    count = int(round((hi - lo) / step)) + 1
    return np.round(np.linspace(lo, lo + step * (count - 1), count), 12)


def _params(kind: str, strength: float, omega: float) -> DimerParams:
    field = {"linear": "j", "sfwm": "y", "xpm": "z"}[kind]
    return DimerParams(omega=omega, kind=Interaction(kind), **{field: strength})


# --- linear oracle runs ------------------------------------------------------


def _run_linear_one_bath(cfg):
    basis = build_basis(cfg["n_max"])
    h = build_hamiltonian(basis, DimerParams(omega=cfg["omega"], j=cfg["j"]))
    liou = build_liouvillian(h, BathSpec(cfg["temperature"], cfg["gamma"]))
    ana = thermo.analytic_linear_one_bath(cfg["omega"], cfg["j"], cfg["gamma"], cfg["temperature"])
    t_final = cfg["t_final"] or 10.0 * ana.relaxation_time
    times = np.linspace(0.0, t_final, cfg["samples"])
    c, _ = normal_mode_annihilators(basis)
    obs = thermo.current_observables(liou)
    obs["occ"] = c.dag() @ c
    traj = propagate(liou, basis.vacuum(), times, method=cfg["method"], observables=obs, keep_states=False)
    series = thermo.heat_current_series(liou, traj)
    cols = [times, series.total, ana.current(times), traj.observables["occ"], ana.occupation(times)]
    rel = np.abs(series.total - ana.current(times)) / np.abs(ana.current(times))
    results = {
        "max_rel_current_error": float(rel.max()),
        "fitted_rate": thermo.fit_decay_rate(times, series.total),
        "analytic_rate": ana.rate,
    }
    return ["t", "I_numeric", "I_analytic", "occ_sym_numeric", "occ_sym_analytic"], np.column_stack(cols), results


def _two_temperatures(cfg):
    t1 = cfg["temperature1"] or cfg["temperature"] * (1 + cfg["delta"] / 2)
    t2 = cfg["temperature2"] or cfg["temperature"] * (1 - cfg["delta"] / 2)
    return t1, t2


def _run_linear_two_bath(cfg):
    basis = build_basis(cfg["n_max"])
    h = build_hamiltonian(basis, DimerParams(omega=cfg["omega"], j=cfg["j"]))
    t1, t2 = _two_temperatures(cfg)
    g1 = cfg["gamma1"] or cfg["gamma"]
    g2 = cfg["gamma2"] if cfg["gamma2"] is not None else cfg["gamma"]
    liou = build_liouvillian(h, [BathSpec(t1, g1), BathSpec(t2, g2)])
    ana = thermo.analytic_linear_two_bath(cfg["omega"], cfg["j"], g1, g2, t1, t2)
    t_final = cfg["t_final"] or 10.0 / ana.rate
    times = np.linspace(0.0, t_final, cfg["samples"])
    series = thermo.heat_transient(liou, times, method=cfg["method"])
    cols = [
        times,
        series.per_bath[0],
        series.per_bath[1],
        series.total,
        ana.total_current(times),
        series.net,
        ana.net_current(times),
    ]
    results = {
        "net_mean": float(series.net.mean()),
        "net_rel_stdev": float(series.net.std() / abs(series.net.mean())) if series.net.mean() else None,
        "steady_net_analytic": ana.steady_net_current,
    }
    header = ["t", "I_1", "I_2", "I_tot_numeric", "I_tot_analytic", "I_net_numeric", "I_net_analytic"]
    return header, np.column_stack(cols), results


# --- nonlinear transients ----------------------------------------------------


def _transient_times(cfg):
    t_final = cfg["t_final"] or cfg["horizon"] / (cfg["gamma"] * cfg["omega"])
    return doubling_time_grid(t_final, cfg["dt0"] or 0.005 / cfg["gamma"])


def _make_one_bath(kind):
    def run(cfg):
        basis = build_basis(cfg["n_max"])
        h = build_hamiltonian(basis, _params(kind, cfg["strength"], cfg["omega"]))
        liou = build_liouvillian(h, BathSpec(cfg["temperature"], cfg["gamma"]))
        times = _transient_times(cfg)
        obs = thermo.current_observables(liou)
        obs["N"] = total_number(basis)
        traj = propagate(liou, basis.vacuum(), times, observables=obs, keep_states=False)
        series = thermo.heat_current_series(liou, traj)
        results = {
            "Q_final": float(series.heat[-1]),
            "I_min": float(series.total.min()),
            "channels": len(liou.channels[0]),
            "dropped_zero_channels": liou.dropped_zero_channels,
        }
        cols = [times, series.total, series.heat, traj.observables["N"]]
        return ["t", "I", "Q", "N_total"], np.column_stack(cols), results

    return run


def _make_two_bath(kind):
    def run(cfg):
        basis = build_basis(cfg["n_max"])
        h = build_hamiltonian(basis, _params(kind, cfg["strength"], cfg["omega"]))
        t1, t2 = _two_temperatures(cfg)
        liou = build_liouvillian(h, [BathSpec(t1, cfg["gamma"]), BathSpec(t2, cfg["gamma"])])
        times = _transient_times(cfg)
        series = thermo.heat_transient(liou, times)
        ss = steady_state(liou, basis.vacuum())
        steady = [float(np.sum(liou.heat_operator(i) * ss.rho.T).real) for i in range(2)]
        results = {
            "I_net_final": float(series.net[-1]),
            "I_net_steady": steady[0] - steady[1],
            "I_net_range": float(np.ptp(series.net)),
        }
        cols = [times, series.per_bath[0], series.per_bath[1], series.total, series.net, series.heat]
        return ["t", "I_1", "I_2", "I_tot", "I_net", "Q"], np.column_stack(cols), results

    return run


# --- scans -------------------------------------------------------------------


def _run_overlap_scan(cfg):
    grid = _grid(cfg["y_min"], cfg["y_max"], cfg["y_step"], "y")
    scan = vacuum_overlap_scan(cfg["omega"], grid, cfg["n_max"])
    return ["Y", "overlap"], np.column_stack([scan.y, scan.overlap]), {"critical_Y": scan.critical}


def _heat_column(args):
    kind, temps, strength, gamma, n_max, omega, horizon = args
    return thermo.heat_map(kind, temps, [strength], gamma, n_max, omega, horizon)


def _run_heatmap(cfg):
    temps = _grid(cfg["t_min"], cfg["t_max"], cfg["t_step"], "t")
    strengths = _grid(cfg["s_min"], cfg["s_max"], cfg["s_step"], "s")
    jobs = [(cfg["kind"], temps, s, cfg["gamma"], cfg["n_max"], cfg["omega"], cfg["horizon"]) for s in strengths]
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            maps = list(pool.map(_heat_column, jobs))
    else:
        maps = [_heat_column(j) for j in jobs]
    rows = []
    for k, m in enumerate(maps):
        for i, temp in enumerate(temps):
            rows.append([temp, strengths[k], m.heat[i, 0], m.heat_double[i, 0], m.min_current[i, 0]])
    data = np.array(rows)
    results = {
        "Q_min": float(data[:, 2].min()),
        "cooling_points": int(np.sum(data[:, 2] < 0)),
        "t_final": maps[0].t_final,
    }
    return ["T", "strength", "Q_final", "Q_double", "I_min"], data, results


def _run_ness_scan(cfg):
    strengths = _grid(cfg["s_min"], cfg["s_max"], cfg["s_step"], "s")
    scan = thermo.ness_current_scan(
        cfg["kind"], strengths, cfg["temperature"], cfg["delta"], cfg["gamma"], cfg["n_max"], cfg["omega"]
    )
    data = np.column_stack([scan.strengths, scan.per_bath[:, 0], scan.per_bath[:, 1], scan.net])
    results = {"peak_strength": scan.peak, "peak_current": float(scan.net.max())}
    return ["strength", "I_1", "I_2", "I_net"], data, results


def _run_semiclassical(cfg):
    y, z, n = cfg["y"], cfg["z"], cfg["total"]
    if cfg["output"] == "phase-plane":
        plane = phase_plane(n, y, z, cfg["samples"], cfg["samples"])
        th, r2 = np.meshgrid(plane.theta, plane.r2, indexing="ij")
        data = np.column_stack([th.ravel(), r2.ravel(), plane.dtheta.ravel(), plane.dr2.ravel()])
        return ["theta", "r2", "dtheta_dt", "dr2_dt"], data, {}
    if not 0 <= cfg["r2"] <= n:
        raise ConfigError("r2", "must lie in [0, total]")
    state = MeanFieldState.from_polar(n, cfg["r2"], cfg["theta"])
    times = np.linspace(0.0, cfg["t_final"], cfg["samples"])
    s = integrate_mean_field(state, cfg["omega"], y, z, times)
    data = np.column_stack([times, s.a.real, s.a.imag, s.b.real, s.b.imag, s.r2, s.theta, theta_rate(s, y, z), s.total])
    results = {"max_power_drift": float(np.abs(s.total / n - 1).max())}
    return ["t", "a_re", "a_im", "b_re", "b_im", "r2", "theta", "dtheta_dt", "total"], data, results


def _run_position_pdf(cfg):
    basis = build_basis(cfg["n_max"])
    h = build_hamiltonian(basis, _params(cfg["kind"], cfg["strength"], cfg["omega"]))
    t1, t2 = _two_temperatures(cfg)
    liou = build_liouvillian(h, [BathSpec(t1, cfg["gamma"]), BathSpec(t2, cfg["gamma"])])
    ss = steady_state(liou, basis.vacuum())
    grid = PositionGrid(cfg["points"], cfg["x_max"])
    pdf = position_pdf(ss.rho, basis, grid)
    x1, x2 = np.meshgrid(grid.x, grid.x, indexing="ij")
    results = {"norm": integrate_pdf(pdf, grid), "ipr": delocalization_measure(pdf, grid)}
    return ["x1", "x2", "p"], np.column_stack([x1.ravel(), x2.ravel(), pdf.ravel()]), results


def _run_algebra(cfg):
    basis = build_basis(cfg["n_max"])
    su2 = algebra.build_su2(basis)
    rows = []
    for name, res in algebra.verify_su2_relations(su2).items():
        rows.extend((name, n, float(r)) for n, r in enumerate(res))
    for n, ev in enumerate(algebra.casimir_eigenvalues(su2)):
        rows.append(("X^2 - (n/2)(n/2+1)", n, float(np.abs(ev - (n / 2) * (n / 2 + 1)).max())))
    for n, r in enumerate(algebra.verify_deformed_commutator(algebra.build_deformed(basis))):
        rows.append(("[Y+,Y-] - P(Y0,Yz)", n, float(r)))
    even = [r for name, n, r in rows if not (name.startswith("[Y+") and n % 2)]
    results = {"max_residual": max(r for _, _, r in rows), "max_residual_excluding_odd_deformed": max(even)}
    return ["relation", "sector", "residual"], rows, results


def _strength(default):
    return {"strength": Param(float, default, **_nonneg())}


TRANSIENT = {
    "temperature": Param(float, 0.5, **_pos()),
    "t_final": Param(float, None, **_pos()),
    "horizon": Param(float, 50.0, **_pos()),
    "dt0": Param(float, None, **_pos()),
}
LINEAR = {
    "j": Param(float, 0.2, **_nonneg()),
    "temperature": Param(float, 0.5, **_pos()),
    "t_final": Param(float, None, **_pos()),
    "samples": Param(int, 401, check=lambda v: v >= 2, rule="must be >= 2"),
    "method": Param(str, "expm", choices=("expm", "rk")),
}
OPTIONAL_TEMPS = {
    "temperature1": Param(float, None, **_pos()),
    "temperature2": Param(float, None, **_pos()),
}


def _build_registry() -> dict[str, Scenario]:
    reg = [
        Scenario("linear-one-bath", {**COMMON, **LINEAR}, _run_linear_one_bath, "oracle: one bath, linear hopping"),
        Scenario(
            "linear-two-bath",
            {
                **COMMON,
                **LINEAR,
                **TWO_BATH,
                **OPTIONAL_TEMPS,
                "gamma1": Param(float, None, **_pos()),
                "gamma2": Param(float, None, **_nonneg()),
            },
            _run_linear_two_bath,
            "oracle: two baths, linear hopping",
        ),
        Scenario("sfwm-one-bath", {**COMMON, **TRANSIENT, **_strength(0.3)}, _make_one_bath("sfwm"), "SFWM transient"),
        Scenario("xpm-one-bath", {**COMMON, **TRANSIENT, **_strength(0.5)}, _make_one_bath("xpm"), "XPM transient"),
        Scenario(
            "sfwm-two-bath",
            {**COMMON, **TRANSIENT, **TWO_BATH, **OPTIONAL_TEMPS, **_strength(0.4)},
            _make_two_bath("sfwm"),
            "SFWM two-bath transient",
        ),
        Scenario(
            "xpm-two-bath",
            {**COMMON, **TRANSIENT, **TWO_BATH, **OPTIONAL_TEMPS, **_strength(0.2)},
            _make_two_bath("xpm"),
            "XPM two-bath transient",
        ),
        Scenario(
            "overlap-scan",
            {
                **COMMON,
                "y_min": Param(float, 0.0, **_nonneg()),
                "y_max": Param(float, 0.6, **_nonneg()),
                "y_step": Param(float, 0.0025, **_pos()),
            },
            _run_overlap_scan,
            "vacuum overlap of the SFWM ground state",
        ),
        Scenario(
            "heatmap-Q",
            {
                **COMMON,
                **KIND,
                "t_min": Param(float, 0.1, **_pos()),
                "t_max": Param(float, 1.0, **_pos()),
                "t_step": Param(float, 0.05, **_pos()),
                "s_min": Param(float, 0.0, **_nonneg()),
                "s_max": Param(float, 1.0, **_nonneg()),
                "s_step": Param(float, 0.05, **_pos()),
                "horizon": Param(float, 50.0, **_pos()),
                "workers": Param(int, 1, check=lambda v: v >= 1, rule="must be >= 1"),
            },
            _run_heatmap,
            "integrated heat over (T, strength)",
        ),
        Scenario(
            "ness-scan",
            {
                **COMMON,
                **KIND,
                **TWO_BATH,
                "s_min": Param(float, 0.0, **_nonneg()),
                "s_max": Param(float, 1.0, **_nonneg()),
                "s_step": Param(float, 0.05, **_pos()),
            },
            _run_ness_scan,
            "steady net current versus strength",
        ),
        Scenario(
            "semiclassical",
            {
                "omega": COMMON["omega"],
                "y": Param(float, 0.3, **_nonneg()),
                "z": Param(float, 0.0, **_nonneg()),
                "total": Param(float, 2.0, **_pos()),
                "r2": Param(float, 1.001, **_nonneg()),
                "theta": Param(float, math.pi / 4),
                "t_final": Param(float, 5.0, **_pos()),
                "samples": Param(int, 501, check=lambda v: v >= 2, rule="must be >= 2"),
                "output": Param(str, "trajectory", choices=("trajectory", "phase-plane")),
            },
            _run_semiclassical,
            "mean-field trajectory or phase-plane samples",
        ),
        Scenario(
            "position-pdf",
            {
                **COMMON,
                **KIND,
                **TWO_BATH,
                **OPTIONAL_TEMPS,
                **_strength(1.0),
                "points": Param(int, 201, check=lambda v: v >= 2, rule="must be >= 2"),
                "x_max": Param(float, 8.0, **_pos()),
            },
            _run_position_pdf,
            "position density of the steady state",
        ),
        Scenario("algebra-verify", {"n_max": COMMON["n_max"]}, _run_algebra, "su(2) and deformed-algebra residuals"),
    ]
    return {s.name: s for s in reg}


SCENARIOS = _build_registry()
