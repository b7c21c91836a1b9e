"""Command-line interface.

Verbs::

    spinfid simulate CONFIG [--output PATH] [--seed N] [--n-realizations N]
    spinfid preset NAME [--output PATH] [--seed N] [--n-realizations N]
    spinfid preset --list
    spinfid sweep (--config PATH | --preset NAME) --param {m,width}
                  --values V1,V2,... [--output PATH]
    spinfid validate

Exit codes: 0 success, 2 configuration or usage error, 3 numeric
invariant violation (including failed validation checks), 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import ConfigError, RunConfig, config_hash, parse_config_file
from .csvio import CsvFormatError, write_csv
from .experiments import (
    DEFAULT_SEED,
    PRESET_NAMES,
    SWEEP_PARAMS,
    NumericInvariantError,
    preset_config,
    run_experiment,
    run_preset,
    sweep_residuals,
)
from .validate import run_validation

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_IO = 4


def _add_run_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", help="output CSV path (overrides the config)")
    parser.add_argument("--seed", type=int, help="ensemble seed override")
    parser.add_argument("--n-realizations", type=int, help="ensemble size override")
    parser.add_argument("--workers", type=int, help="worker thread count override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinfid",
        description="Simulate and analyze free-induction decay of small coupled spin systems.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_sim = sub.add_parser("simulate", help="run one simulation from a config file")
    p_sim.add_argument("config", help="path to an INI-style run configuration")
    _add_run_overrides(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_pre = sub.add_parser("preset", help="run a named stock scenario")
    p_pre.add_argument("name", nargs="?", choices=PRESET_NAMES, help="preset name")
    p_pre.add_argument("--list", action="store_true", help="list preset names and exit")
    _add_run_overrides(p_pre)
    p_pre.set_defaults(func=_cmd_preset)

    p_sweep = sub.add_parser("sweep", help="residuals against a swept parameter")
    source = p_sweep.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="base run configuration file")
    source.add_argument("--preset", choices=PRESET_NAMES, help="base preset name")
    p_sweep.add_argument("--param", choices=SWEEP_PARAMS, required=True, help="parameter to sweep")
    p_sweep.add_argument("--values", required=True, help="comma-separated non-negative values")
    _add_run_overrides(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_val = sub.add_parser("validate", help="run the fast self-consistency battery")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.output is not None:
        config = replace(config, output=args.output)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.n_realizations is not None:
        config = replace(config, n_realizations=args.n_realizations)
    return config


def _describe(trace) -> str:
    return (
        f"{trace.grid.n_points} points to {trace.grid.t_max} s, "
        f"{trace.n_realizations} realizations, seed {trace.seed}, "
        f"mperp[0] = {trace.mperp[0]:.6g}, mperp[-1] = {trace.mperp[-1]:.6g}"
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _apply_overrides(parse_config_file(args.config), args)
    result = run_experiment(config, workers=args.workers)
    print(f"simulated: {_describe(result.trace)}")
    if result.path is not None:
        print(f"wrote {result.path}")
    return EXIT_OK


def _cmd_preset(args: argparse.Namespace) -> int:
    if args.list:
        for name in PRESET_NAMES:
            print(name)
        return EXIT_OK
    if args.name is None:
        raise ConfigError("preset: a name is required unless --list is given")
    result = run_preset(
        args.name,
        seed=args.seed if args.seed is not None else DEFAULT_SEED,
        n_realizations=args.n_realizations,
        output=args.output,
        workers=args.workers,
    )
    if result.table is not None:
        header = list(result.table)
        print(",".join(header))
        for row in zip(*result.table.values()):
            print(",".join(format(value, ".6g") for value in row))
    for path in result.paths:
        print(f"wrote {path}")
    return EXIT_OK


def _parse_values(raw: str) -> np.ndarray:
    try:
        values = np.array([float(piece) for piece in raw.split(",") if piece.strip()])
    except ValueError:
        raise ConfigError(f"--values: expected comma-separated numbers, got {raw!r}") from None
    if values.size == 0:
        raise ConfigError("--values: need at least one value")
    return values


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.config is not None:
        base = parse_config_file(args.config)
    else:
        base = preset_config(args.preset)
    base = replace(_apply_overrides(base, args), output=None)
    values = _parse_values(args.values)
    table = sweep_residuals(base, values, param=args.param, workers=args.workers)
    out = args.output if args.output is not None else f"sweep_{args.param}.csv"
    write_csv(
        out,
        list(table),
        list(table.values()),
        metadata={
            "seed": base.seed,
            "n_realizations": base.n_realizations,
            "polarization": base.system.polarization,
            "config_hash": config_hash(base),
        },
    )
    print(",".join(table))
    for row in zip(*table.values()):
        print(",".join(format(value, ".6g") for value in row))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    results = run_validation()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}: {result.detail}")
    failed = sum(not result.passed for result in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_INVARIANT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CsvFormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericInvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
