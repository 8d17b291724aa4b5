"""Command line front end.

    ellbilliards build  --config run.json --out out/
    ellbilliards verify --config run.json --out out/ [--samples 50] [--seed 0]
    ellbilliards grid   --config run.json --out out/
    ellbilliards sweep  --config run.json --out out/ [--samples 50]

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import serialize
from .billiard import (
    BilliardConfig,
    build_billiard,
    geometric_orbit,
    grid_points,
)
from .confocal import ConfocalFamily
from .exceptions import ConfigError, DomainError, GeometryError, IntegrationError
from .invariants import DEFAULT_TOLERANCES, InvariantReport, check_all, sweep_motion, FAIL, PASS
from .svg import grid_svg

log = logging.getLogger(__name__)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_FIELDS = {"a_c", "b_c", "N", "tau", "delta_u", "u0", "count", "outputs", "tolerances", "perturb_vertex"}
_OUTPUTS = {"csv", "json", "svg"}


@dataclass
class RunConfig:
    """Validated contents of a run configuration file."""

    a_c: float
    b_c: float
    N: Optional[int] = None
    tau: Optional[int] = None
    delta_u: Optional[float] = None
    u0: float = 0.0
    samples: Optional[int] = None
    count: Optional[int] = None
    outputs: set = field(default_factory=lambda: {"json"})
    tolerances: dict = field(default_factory=dict)
    # diagnostic hook: {"index": i (1-based), "offset": [dx, dy]}
    perturb_vertex: Optional[dict] = None

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = sorted(set(raw) - _FIELDS)
        if unknown:
            raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
        for name in ("a_c", "b_c"):
            if name not in raw:
                raise ConfigError(f"missing field: {name}")
        has_period = "N" in raw or "tau" in raw
        if has_period and not ("N" in raw and "tau" in raw):
            raise ConfigError("missing field: " + ("tau" if "N" in raw else "N"))
        if not has_period and "delta_u" not in raw:
            raise ConfigError("missing field: N/tau or delta_u")

        cfg = cls(a_c=_number(raw, "a_c"), b_c=_number(raw, "b_c"))
        if has_period:
            cfg.N, cfg.tau = _integer(raw, "N"), _integer(raw, "tau")
        if "delta_u" in raw:
            cfg.delta_u = _number(raw, "delta_u")
        u0 = raw.get("u0", 0.0)
        if isinstance(u0, dict):
            extra = set(u0) - {"start", "count"}
            if extra:
                raise ConfigError(f"unknown field(s) in u0: {', '.join(sorted(extra))}")
            cfg.u0 = _number(u0, "start") if "start" in u0 else 0.0
            if "count" in u0:
                cfg.samples = _integer(u0, "count")
        elif "u0" in raw:
            cfg.u0 = _number(raw, "u0")
        if "count" in raw:
            cfg.count = _integer(raw, "count")
        if "outputs" in raw:
            outs = raw["outputs"]
            if not isinstance(outs, list) or not set(outs) <= _OUTPUTS:
                raise ConfigError(f"outputs must be a list drawn from {sorted(_OUTPUTS)}")
            cfg.outputs = set(outs)
        if "tolerances" in raw:
            cfg.tolerances = _tolerances(raw["tolerances"])
        if "perturb_vertex" in raw:
            pv = raw["perturb_vertex"]
            if not (isinstance(pv, dict) and "index" in pv and "offset" in pv):
                raise ConfigError("perturb_vertex needs 'index' and 'offset'")
            cfg.perturb_vertex = pv
        return cfg

    def billiard_config(self) -> BilliardConfig:
        fam = ConfocalFamily(self.a_c, self.b_c)
        if self.N is not None:
            cfg = BilliardConfig.periodic(fam, self.N, self.tau, self.u0)
            if self.delta_u is not None and abs(self.delta_u - cfg.delta_u) > 1e-12:
                raise ConfigError("delta_u disagrees with 2*tau*K/N")
            return cfg
        return BilliardConfig(fam, self.delta_u, self.u0)


def _number(raw, name) -> float:
    value = raw[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"field {name} must be a finite number")
    return float(value)


def _integer(raw, name) -> int:
    value = raw[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field {name} must be an integer")
    return value


def _tolerances(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("tolerances must be an object")
    out = {}
    for name, value in raw.items():
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance: {name}")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError(f"tolerance {name} must be a positive number")
        out[name] = float(value)
    return out


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return RunConfig.from_dict(raw)


def _apply_overrides(run: RunConfig, args) -> RunConfig:
    if args.tolerance:
        parsed = {}
        for item in args.tolerance:
            name, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--tolerance expects name=value, got {item!r}")
            try:
                parsed[name] = float(value)
            except ValueError as exc:
                raise ConfigError(f"bad tolerance value {value!r}") from exc
        run.tolerances = {**run.tolerances, **_tolerances(parsed)}
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("--samples must be >= 1")
        run.samples = args.samples
    return run


def _perturb(bil, hook):
    idx = hook["index"] - 1
    if not 0 <= idx < bil.count:
        raise ConfigError("perturb_vertex index out of range")
    vertices = bil.vertices.copy()
    vertices[idx] += np.asarray(hook["offset"], dtype=float)
    return replace(bil, vertices=vertices)


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    log.info("wrote %s", out / name)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_build(run: RunConfig, cfg: BilliardConfig, out: Path, args) -> int:
    count = run.count if run.count is not None else cfg.N
    if count is None:
        raise ConfigError("missing field: count (required without N/tau)")
    bil = build_billiard(cfg, count)
    if run.perturb_vertex:
        bil = _perturb(bil, run.perturb_vertex)
    if "json" in run.outputs:
        _write(out, "billiard.json", serialize.dumps(serialize.billiard_to_dict(bil)))
    if "csv" in run.outputs:
        rows = ["index,u,t,x,y"] + [
            f"{i + 1},{float(bil.vertex_u[i])!r},{float(bil.vertex_t[i])!r},"
            f"{float(bil.vertices[i, 0])!r},{float(bil.vertices[i, 1])!r}"
            for i in range(bil.count)
        ]
        _write(out, "billiard.csv", "\n".join(rows) + "\n")
    if "svg" in run.outputs:
        if not bil.is_closed:
            raise ConfigError("svg output needs a periodic configuration")
        _write(out, "billiard.svg", grid_svg(grid_points(bil, 0)))
    return EXIT_OK


def _cross_oracle_report(cfg: BilliardConfig, tol: float) -> InvariantReport:
    bil = build_billiard(cfg)
    verts, _ = geometric_orbit(bil.vertices[0], bil.ellipse, cfg.fam, bil.count)
    res = float(np.max(np.hypot(*(verts - bil.vertices).T)))
    return InvariantReport("reflection_vs_canonical", 0.0, [res], res, tol, PASS if res <= tol else FAIL)


def _porism_report(cfg: BilliardConfig, rng, trials: int, tol: float) -> InvariantReport:
    starts = rng.uniform(0.0, 4.0 * cfg.fam.K, size=trials)
    res = [build_billiard(cfg.with_u0(float(u))).closure_residual() for u in starts]
    worst = max(res)
    return InvariantReport("porism_random_starts", 0.0, res, worst, tol, PASS if worst <= tol else FAIL)


def cmd_verify(run: RunConfig, cfg: BilliardConfig, out: Path, args) -> int:
    if not cfg.is_periodic:
        raise ConfigError("verify needs N and tau")
    tols = run.tolerances
    bil = build_billiard(cfg)
    if run.perturb_vertex:
        bil = _perturb(bil, run.perturb_vertex)
    reports = check_all(bil, tols)
    samples = run.samples or 1
    if samples > 1:
        sweep_reports, _ = sweep_motion(cfg, samples, tols)
        for rep in sweep_reports:
            rep.name = f"sweep:{rep.name}"
        reports += sweep_reports
    closure_tol = {**DEFAULT_TOLERANCES, **tols}["closure"]
    reports.append(_cross_oracle_report(cfg, closure_tol))
    reports.append(_porism_report(cfg, np.random.default_rng(args.seed), 10, closure_tol))
    passed = all(r.passed for r in reports)
    _write(out, "report.json", serialize.dumps(serialize.reports_to_dict(reports, passed)))
    for r in reports:
        log.info("%-45s %s (%.3g)", r.name, r.status, r.max_residual)
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_grid(run: RunConfig, cfg: BilliardConfig, out: Path, args) -> int:
    if not cfg.is_periodic:
        raise ConfigError("grid needs N and tau")
    grid = grid_points(build_billiard(cfg))
    _write(out, "grid.json", serialize.dumps(serialize.grid_to_dict(grid)))
    _write(out, "grid.svg", grid_svg(grid))
    return EXIT_OK


def cmd_sweep(run: RunConfig, cfg: BilliardConfig, out: Path, args) -> int:
    if not cfg.is_periodic:
        raise ConfigError("sweep needs N and tau")
    _, rows = sweep_motion(cfg, run.samples or 50, run.tolerances)
    _write(out, "sweep.csv", serialize.sweep_csv(rows))
    return EXIT_OK


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "grid": cmd_grid, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellbilliards", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tolerance", action="append", metavar="NAME=VALUE",
                       help=f"override a tolerance ({', '.join(DEFAULT_TOLERANCES)})")
        p.add_argument("--samples", type=int, help="number of start parameters in sweeps")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    try:
        run = _apply_overrides(load_config(args.config), args)
        cfg = run.billiard_config()
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](run, cfg, Path(args.out), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeometryError, IntegrationError, DomainError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
