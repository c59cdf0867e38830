"""Command-line entry point: ``truncelb {check,solve,regions,multiplier}``.

Exit codes: 0 success, 1 domain error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ConfigError, RunConfig
from .errors import ModelError, NoBifurcation, ParameterError
from .model import ShockSpec, d_bar, d_bar0, elb_inflation_threshold, p_bar, validate_params
from .multiplier import (
    Context,
    admissible_mixed,
    multiplier_series,
    series_csv,
    series_summary,
    summary_json,
)
from .paths import path_csv, realize_path, solve_hypothetical_path
from .regions import region_csv, region_map, threshold_curves

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    target = out / name
    with open(target, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return target


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _p_bar(cfg: RunConfig) -> float | None:
    try:
        return p_bar(cfg.params)
    except NoBifurcation:
        return None


def cmd_check(cfg: RunConfig, out: Path) -> int:
    report = validate_params(cfg.params)
    pb = _p_bar(cfg)
    for line in report.messages:
        print(line)
    print(f"p_bar = {'none' if pb is None else format(pb, '.17g')}")
    print(f"d_bar0 = {d_bar0(cfg.params):.17g}")
    print(f"pi_floor = {elb_inflation_threshold(cfg.params):.17g}")
    payload = report.to_dict()
    payload.update(p_bar=pb, d_bar0=d_bar0(cfg.params), pi_floor=elb_inflation_threshold(cfg.params))
    payload["config"] = cfg.resolved()
    _write(out, "check.json", _dump(payload))
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    if cfg.shock is None:
        raise ConfigError("shock: required by 'solve'")
    path = solve_hypothetical_path(cfg.params, cfg.shock)
    _write(out, "path.csv", path_csv(path.states))
    sidecar = {
        "kind": path.kind.value,
        "switch_k": path.switch_k,
        "p_bar": _p_bar(cfg),
        "d_bar": d_bar(cfg.params, cfg.shock.p),
        "d_bar0": d_bar0(cfg.params),
        "pi_floor": elb_inflation_threshold(cfg.params),
        "config": cfg.resolved(),
    }
    if cfg.exit_period is not None:
        realized = realize_path(path, cfg.exit_period)
        _write(out, "realized.csv", path_csv(realized))
        sidecar["exit_period"] = cfg.exit_period
    _write(out, "path.json", _dump(sidecar))
    print(f"{path.kind.value} path, switch_k={path.switch_k}, impact pi={path.impact.pi:.6g}")
    return EXIT_OK


def cmd_regions(cfg: RunConfig, out: Path) -> int:
    g = cfg.grid
    d_hi = cfg.params.d_max if g.d_max is None else g.d_max
    p_axis = np.linspace(g.p_min, g.p_max, g.n_p)
    d_axis = np.linspace(g.d_min, d_hi, g.n_d)
    grid = region_map(cfg.params, p_axis, d_axis, cfg.mode, workers=cfg.workers)
    _write(out, "regions.csv", region_csv(grid))
    names, counts = np.unique(grid.names().ravel(), return_counts=True)
    payload = threshold_curves(cfg.params, grid.p_axis)
    payload["labels"] = {str(n): int(c) for n, c in zip(names, counts)}
    payload["config"] = cfg.resolved()
    _write(out, "thresholds.json", _dump(payload))
    print(f"{cfg.mode} map: " + ", ".join(f"{n}={c}" for n, c in zip(names, counts)))
    return EXIT_OK


def cmd_multiplier(cfg: RunConfig, out: Path) -> int:
    spec = cfg.multiplier
    context = Context(spec.context)
    if spec.p is None:
        raise ConfigError("multiplier.p: required by 'multiplier'")
    if context is Context.MIXED:
        if spec.d is None:
            raise ConfigError("multiplier.d: required for the Mixed context")
        problem = admissible_mixed(cfg.params, spec.d, spec.p)
        if problem:
            print(f"inadmissible shock for the Mixed context: {problem}", file=sys.stderr)
            return EXIT_DOMAIN
    series = multiplier_series(cfg.params, context, spec.p, spec.ell_max, spec.d)
    _write(out, "series.csv", series_csv(series))
    summary = series_summary(series, cfg.params)
    summary["config"] = cfg.resolved()

    if spec.sweep:
        _write(out, "sweep.csv", _sweep_csv(cfg, spec.sweep))
    _write(out, "summary.json", summary_json(summary))
    print(f"{context.value} multiplier, ell_bar={series.ell_bar}, ell_plus={series.ell_plus}")
    return EXIT_OK


def _sweep_csv(cfg: RunConfig, sweep: dict) -> str:
    """ell_bar and ell_plus over a (p, d) grid of Mixed shocks."""
    ps, ds = sweep.get("p", []), sweep.get("d", [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "d", "admissible", "ell_bar", "ell_plus"])
    for d in ds:
        for p in ps:
            ok = admissible_mixed(cfg.params, d, p) is None
            if ok:
                series = multiplier_series(cfg.params, Context.MIXED, p, cfg.ell_cap, d)
                lb, lp = series.ell_bar, series.ell_plus
            else:
                lb = lp = None
            writer.writerow([f"{p:.17g}", f"{d:.17g}", int(ok), "" if lb is None else lb, "" if lp is None else lp])
    return buf.getvalue()


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "regions": cmd_regions, "multiplier": cmd_multiplier}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="truncelb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")
        p.add_argument("--mode", choices=("msv", "truncated"))
        p.add_argument("--exit-period", type=int)
        p.add_argument("--ell", type=int, help="shock horizon (solve) or series length (multiplier)")
        p.add_argument("--ell-cap", type=int)
        p.add_argument("--grid", help="grid size as PxD, e.g. 200x200")
        p.add_argument("--p", type=float, help="shock persistence")
        p.add_argument("--d", type=float, help="shock size")
        p.add_argument("--context", choices=("PN", "PL", "Mixed"))
        p.add_argument("--workers", type=int)
    return parser


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Flags override the file."""
    if args.mode is not None:
        cfg.mode = args.mode
    if args.exit_period is not None:
        cfg.exit_period = args.exit_period
    if args.ell_cap is not None:
        cfg.ell_cap = args.ell_cap
    if args.workers is not None:
        cfg.workers = args.workers
    if args.grid is not None:
        try:
            n_p, n_d = (int(v) for v in args.grid.lower().split("x"))
        except ValueError as exc:
            raise ConfigError(f"--grid: expected PxD, got {args.grid!r}") from exc
        cfg.grid = replace(cfg.grid, n_p=n_p, n_d=n_d)

    if args.command == "multiplier":
        m = cfg.multiplier
        cfg.multiplier = replace(
            m,
            context=args.context or m.context,
            p=m.p if args.p is None else args.p,
            d=m.d if args.d is None else args.d,
            ell_max=m.ell_max if args.ell is None else args.ell,
        )
    elif any(v is not None for v in (args.p, args.d, args.ell)):
        base = cfg.shock
        d = args.d if args.d is not None else (base.d if base else None)
        p = args.p if args.p is not None else (base.p if base else None)
        ell = args.ell if args.ell is not None else (base.ell if base else None)
        if d is None or p is None or ell is None:
            raise ConfigError("shock: --d, --p and --ell are all needed without a shock block")
        try:
            cfg.shock = ShockSpec(d, p, ell)
        except ParameterError as exc:
            raise ConfigError(f"shock.{exc}") from exc
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig.from_dict({})
        cfg = _apply_flags(cfg, args)
        if args.command == "solve" and cfg.exit_period is not None and cfg.shock is not None:
            if not 1 <= cfg.exit_period <= cfg.shock.ell:
                raise ConfigError(f"exit_period: must lie in [1, {cfg.shock.ell}]")
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
