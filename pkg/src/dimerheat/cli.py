"""
Command-line driver::

    dimerheat <scenario> [--config FILE] [--out DIR] [--set key=value ...]

Writes ``<out>/<scenario>.csv`` and ``<out>/<scenario>.manifest.json``.
Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _kernels
from .errors import ConfigError, ToleranceError
from .scenarios import SCENARIOS, resolve_config

__all__ = ["main", "run", "parse_overrides"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3


def parse_overrides(pairs: list[str]) -> dict:
    """``["a=1", "b=x"]`` to ``{"a": 1, "b": "x"}``; values parse as JSON when possible."""
    out = {}
    for item in pairs:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(item, "overrides must look like key=value")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def _format(value) -> str:
    if isinstance(value, (str, bool, int, np.integer)) and not isinstance(value, float):
        return str(value)
    return "%.16e" % float(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def run(scenario: str, values: dict, out_dir: Path) -> dict:
    """Run one scenario and write its files; returns the manifest."""
    if scenario not in SCENARIOS:
        raise ConfigError("scenario", f"unknown scenario {scenario!r}")
    sc = SCENARIOS[scenario]
    cfg = resolve_config(sc, values)
    start = time.perf_counter()
    header, rows, results = sc.run(cfg)
    wall = time.perf_counter() - start
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{scenario}.csv"
    write_csv(csv_path, header, rows)
    manifest = {
        "scenario": scenario,
        "config": cfg,
        "version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "wall_time_s": wall,
        "columns": header,
        "data_file": csv_path.name,
        "results": results,
    }
    manifest = _jsonable(manifest)
    with open(out_dir / f"{scenario}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimerheat",
        description="Heat transport in a bosonic dimer coupled to thermal baths.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("scenario", choices=sorted(SCENARIOS), help="scenario to run")
    parser.add_argument("--config", help="JSON file with flat parameter keys")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one parameter; repeatable",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = load_config(args.config)
        values.update(parse_overrides(args.overrides))
        manifest = run(args.scenario, values, Path(args.out))
    except ConfigError as exc:
        print(f"dimerheat: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceError as exc:
        print(f"dimerheat: {args.scenario}: tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except ValueError as exc:
        # parameter combinations rejected by the physics layer
        print(f"dimerheat: {args.scenario}: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(manifest["results"], sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
