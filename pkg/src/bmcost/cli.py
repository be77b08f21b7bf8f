"""Command-line entry point.

Exit codes: 0 success, 1 numerical failure (a check or acceptance threshold
was missed, or a construction failed), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .control import cost_sweep, write_curve_json
from .errors import BMCostError, RegimeWarning
from .moment import biorth_matrix, build_family
from .multiplier import build_multiplier_particular
from .sampled import Grid
from .selftest import default_checks, run_checks

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
COMMANDS = ("selftest", "multiplier", "family", "sweep")
DEFAULT_TOLERANCES = {"leakage": 1e-3, "biorth": 1e-3}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = "selftest"
    T: list = field(default_factory=lambda: [0.5])
    epsilon: float = 0.2
    K: int = 15
    variant: str = "eps"
    grid_points: Optional[int] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    out: Optional[str] = None
    format: str = "json"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    tol_all: Optional[float] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not 0 < self.epsilon < 1:
            raise UsageError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.T:
            raise UsageError("empty T list")
        if any(not (T > 0 and math.isfinite(T)) for T in self.T):
            raise UsageError("T values must be positive")
        if self.K < 1:
            raise UsageError("K must be >= 1")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.variant not in ("eps", "plain"):
            raise UsageError("variant must be eps or plain")
        if self.grid_points is not None:
            n = self.grid_points
            if n < 2 or n & (n - 1):
                raise UsageError(f"grid points must be a power of two, got {n}")
        given = [v is not None for v in (self.grid_points, self.x_min, self.x_max)]
        if any(given) and not all(given):
            raise UsageError("--grid-points, --x-min and --x-max go together")
        if self.x_min is not None and self.x_max <= self.x_min:
            raise UsageError("x-max must exceed x-min")
        for k, v in list(self.tolerances.items()) + [("all", self.tol_all)]:
            if v is not None and not v > 0:
                raise UsageError(f"tolerance {k} must be positive")

    def tol(self, name: str) -> float:
        if self.tol_all is not None:
            return self.tol_all
        return self.tolerances.get(name, DEFAULT_TOLERANCES.get(name, 0.0))

    def grid(self) -> Optional[Grid]:
        if self.grid_points is None:
            return None
        n = self.grid_points
        return Grid(self.x_min, (self.x_max - self.x_min) / n, n)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bmcost", description="Effective multipliers and control costs.")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--T", help="final time; comma-separated decreasing list for sweep")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--variant", choices=("eps", "plain"))
    p.add_argument("--grid-points", type=int)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON file; flags override its entries")
    p.add_argument("--tol-all", type=float, help="override every tolerance")
    return p


def _split_tolerances(argv: Sequence[str]) -> tuple[list, dict]:
    rest, tols = [], {}
    i = 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--tol-") and not a.startswith("--tol-all"):
            name, _, val = a[6:].partition("=")
            if not val:
                if i + 1 >= len(argv):
                    raise UsageError(f"{a} needs a value")
                val = argv[i + 1]
                i += 1
            try:
                tols[name.replace("-", "_")] = float(val)
            except ValueError:
                raise UsageError(f"bad tolerance value {val!r} for {name}") from None
        else:
            rest.append(a)
        i += 1
    return rest, tols


def _parse_T(v) -> list:
    if isinstance(v, (int, float)):
        return [float(v)]
    if isinstance(v, list):
        return [float(x) for x in v]
    parts = [s for s in str(v).split(",") if s.strip()]
    try:
        return [float(s) for s in parts]
    except ValueError:
        raise UsageError(f"bad T list {v!r}") from None


def load_config(argv: Sequence[str]) -> RunConfig:
    argv, tols = _split_tolerances(list(argv))
    ns = _parser().parse_args(argv)
    cfg = RunConfig()
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        grid = data.pop("grid", {}) or {}
        output = data.pop("output", {}) or {}
        cfg.tolerances.update(data.pop("tolerances", {}) or {})
        for key, val in data.items():
            if not hasattr(cfg, key):
                raise UsageError(f"unknown config key {key!r}")
            setattr(cfg, key, _parse_T(val) if key == "T" else val)
        cfg.grid_points = grid.get("points", cfg.grid_points)
        cfg.x_min = grid.get("x_min", cfg.x_min)
        cfg.x_max = grid.get("x_max", cfg.x_max)
        cfg.out = output.get("path", cfg.out)
        cfg.format = output.get("format", cfg.format)
    for key in ("command", "epsilon", "K", "variant", "grid_points", "x_min", "x_max", "out",
                "format", "seed", "tol_all"):
        val = getattr(ns, key)
        if val is not None:
            setattr(cfg, key, val)
    if ns.T is not None:
        cfg.T = _parse_T(ns.T)
    cfg.tolerances.update(tols)
    cfg.validate()
    return cfg


def _dump(obj, cfg: RunConfig) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1, default=_default) + "\n"
    _write(text, cfg)


def _write(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(type(o))


def run_selftest(cfg: RunConfig) -> int:
    results = run_checks(default_checks(), cfg.tolerances, cfg.tol_all)
    for r in results:
        print(r.line(), "-", r.description)
    report = {"checks": [{"name": r.name, "error": r.error, "tol": r.tol, "passed": r.passed,
                          "description": r.description} for r in results],
              "passed": all(r.passed for r in results)}
    if cfg.out:
        _dump(report, cfg)
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def _multiplier(cfg: RunConfig, T: float):
    return build_multiplier_particular(T, cfg.epsilon, cfg.variant, grid=cfg.grid())


def run_multiplier(cfg: RunConfig) -> int:
    T = cfg.T[0]
    res = _multiplier(cfg, T)
    out = res.to_json()
    out.update({"T": T, "epsilon": cfg.epsilon, "variant": cfg.variant})
    if cfg.format == "csv":
        x = res.spectrum.x
        a = np.abs(res.spectrum.values)
        lines = ["x,abs_spectrum"] + [f"{xi:.16e},{ai:.16e}" for xi, ai in zip(x, a)]
        _write("\n".join(lines) + "\n", cfg)
    else:
        _dump(out, cfg)
    ok = res.support_leakage <= cfg.tol("leakage") and res.upper_ok and res.lower_constant > 0
    return EXIT_OK if ok else EXIT_NUMERIC


def run_family(cfg: RunConfig) -> int:
    T = cfg.T[0]
    mult = _multiplier(cfg, T)
    fam = build_family(T, cfg.epsilon, cfg.K, mult)
    _, dev = biorth_matrix(fam)
    if cfg.format == "csv":
        _write(fam.to_csv(), cfg)
    else:
        payload = fam.to_json()
        payload["biorth_dev"] = dev
        _dump(payload, cfg)
    return EXIT_OK if dev <= cfg.tol("biorth") else EXIT_NUMERIC


def run_sweep(cfg: RunConfig) -> int:
    csv_path = cfg.out if cfg.format == "csv" else None
    try:
        curve = cost_sweep(cfg.T, cfg.epsilon, cfg.K, csv_path=csv_path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.format == "json":
        if cfg.out:
            write_curve_json(curve, cfg.out)
        else:
            _dump(curve.to_json(), cfg)
    elif not cfg.out:
        from .control import CSV_COLUMNS
        lines = [",".join(CSV_COLUMNS)] + [",".join(r.csv_fields()) for r in curve.rows]
        _write("\n".join(lines) + "\n", cfg)
    return EXIT_NUMERIC if any(r.error for r in curve.rows) else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = load_config(argv)
    except UsageError as exc:
        print(f"bmcost: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return EXIT_USAGE if exc.code else EXIT_OK
    runner = {"selftest": run_selftest, "multiplier": run_multiplier,
              "family": run_family, "sweep": run_sweep}[cfg.command]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            return runner(cfg)
    except UsageError as exc:
        print(f"bmcost: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BMCostError as exc:
        print(f"bmcost: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
