#!/usr/bin/env python3
"""Run every bundled scenario (or a chosen subset) and write its CSV files.

Example
-------
    python3 scripts/run_figures.py --output-dir out/
    python3 scripts/run_figures.py fig2-thermal fig2-pps --n-realizations 1000
"""

from __future__ import annotations

import argparse
import os

from spinfid.experiments import DEFAULT_SEED, PRESET_NAMES, run_preset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "names", nargs="*", choices=[[], *PRESET_NAMES], default=[],
        help="scenarios to run (default: all of them)",
    )
    parser.add_argument("--output-dir", default=".", help="directory for the CSV files")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument(
        "--n-realizations", type=int, default=None,
        help="override the per-scenario ensemble size (handy for quick looks)",
    )
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()

    os.makedirs(args.output_dir, exist_ok=True)
    for name in args.names or PRESET_NAMES:
        result = run_preset(
            name,
            seed=args.seed,
            n_realizations=args.n_realizations,
            output=os.path.join(args.output_dir, f"{name}.csv"),
            workers=args.workers,
        )
        for path in result.paths:
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
