"""Command line entry point: ``firmbank {run,analyze,oracle,sweep}``.

Exit codes: 0 success, 2 configuration error, 3 bank failure ended the run early,
4 I/O error.
"""
from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import analytics as an
from .config import ConfigError, parse_config
from .engine import run as simulate
from .model import ModelParams, ParamError, validate_params
from .outputs import OutputError, emit_outputs, fit_report, read_sizes, read_timeseries

EXIT_OK, EXIT_CONFIG, EXIT_BANK_FAILURE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("firmbank")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def load_params(args) -> ModelParams:
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    p = parse_config(text)
    overrides = {}
    for flag, key in (
        ("seed", "seed"),
        ("snapshots", "snapshots"),
        ("regime", "economy_mode"),
        ("info_mode", "info_mode"),
        ("horizon", "horizon"),
        ("n_firms", "n_firms"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    return validate_params(p.replace(**overrides)) if overrides else validate_params(p)


def _add_model_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="key = value parameter file")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--snapshots", type=_int_list, help="comma-separated periods, e.g. 100,200,300")
    sp.add_argument("--regime", choices=["growing", "stationary", "random_growth"])
    sp.add_argument("--info-mode", dest="info_mode", choices=["perfect", "imperfect"])
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--n-firms", dest="n_firms", type=int)
    sp.add_argument("--tail-fraction", dest="tail_fraction", type=float, default=0.1)


def run_cell(p: ModelParams, out_dir, tail_fraction: float = 0.1) -> str:
    """Simulate, fit and write one run; returns its terminal condition."""
    started = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
    result = simulate(p)
    fits = fit_report(result.snapshots, result.history, tail_fraction)
    emit_outputs(result, fits, out_dir, started=started)
    return result.terminal


def cmd_run(args) -> int:
    p = load_params(args)
    terminal = run_cell(p, args.out_dir, args.tail_fraction)
    print(f"{terminal}: outputs in {args.out_dir}")
    return EXIT_BANK_FAILURE if terminal == "bank_failure" else EXIT_OK


def cmd_analyze(args) -> int:
    snaps = read_sizes(args.out_dir)
    try:
        history = read_timeseries(args.out_dir)
    except FileNotFoundError:
        history = []
    report = fit_report(snaps, history, args.tail_fraction)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    p = load_params(args)
    sol = an.solve_equilibrium_rate(p.phi, p.sigma, p.alpha, p.omega)
    print(f"xi = {sol.xi:.6g}")
    print(f"r_star = {sol.r_star:.6g}")
    print(f"r_approx = {sol.r_approx:.6g}")
    print(f"approx_error = {abs(sol.r_star - sol.r_approx):.3g}")
    print(f"firm_growth_rate = {sol.firm_growth_rate:.10g}")
    print(f"bank_growth_rate = {sol.bank_growth_rate:.10g}")
    return EXIT_OK


def _parse_value(key: str, raw: str):
    # reuse the config parser so sweep values obey the same conversions
    return getattr(parse_config(f"{key} = {raw}"), key)


def cmd_sweep(args) -> int:
    base = load_params(args)
    cells = []
    for raw in args.values.split(","):
        raw = raw.strip()
        try:
            value = _parse_value(args.param, raw)
        except ConfigError as exc:
            raise ConfigError(f"sweep value {raw!r}: {exc}") from None
        p = validate_params(base.replace(**{args.param: value}))
        cells.append((raw, p, Path(args.out_dir) / f"{args.param}={raw}"))

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            terminals = list(pool.map(run_cell, [c[1] for c in cells], [c[2] for c in cells],
                                      [args.tail_fraction] * len(cells)))
    else:
        terminals = [run_cell(p, d, args.tail_fraction) for _, p, d in cells]

    index = {
        "param": args.param,
        "cells": [{"value": raw, "dir": d.name, "terminal": t} for (raw, _, d), t in zip(cells, terminals)],
    }
    Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    (Path(args.out_dir) / "sweep.json").write_text(json.dumps(index, indent=2) + "\n")
    for cell in index["cells"]:
        print(f"{args.param}={cell['value']}: {cell['terminal']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="firmbank", description="Firm-bank credit dynamics simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="simulate one configuration")
    _add_model_flags(sp)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("analyze", help="fit size distributions from emitted snapshots")
    sp.add_argument("--out-dir", required=True, help="directory written by `run`")
    sp.add_argument("--tail-fraction", dest="tail_fraction", type=float, default=0.1)
    sp.add_argument("--output", help="write the report here instead of stdout")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("oracle", help="print the representative-agent solution")
    _add_model_flags(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("sweep", help="grid over one parameter")
    _add_model_flags(sp)
    sp.add_argument("--param", required=True)
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParamError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OutputError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
