#!/usr/bin/env python3
"""Run every figure-reproduction sweep and drop the CSV tables in one directory."""

import argparse
import sys
import time
from pathlib import Path

from mcomsim.cli import FIGURES, reproduce
from mcomsim.params import DEFAULTS, load_config
from mcomsim.sweep import emit_csv, run_sweep


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="figures", help="output directory for the CSV tables")
    parser.add_argument("--config", help="JSON config overriding the published defaults")
    parser.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    parser.add_argument("--only", nargs="*", choices=FIGURES, help="subset of figures to run")
    args = parser.parse_args()

    base = load_config(args.config) if args.config else DEFAULTS
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for figure in args.only or FIGURES:
        t0 = time.time()
        table = run_sweep(reproduce(figure, base), workers=args.workers)
        destination = outdir / f"{figure}.csv"
        emit_csv(table, destination)
        stable = sum(row.stable for row in table.rows)
        print(f"{figure}: {len(table.rows)} points, {stable} stable, {time.time() - t0:.1f}s -> {destination}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
