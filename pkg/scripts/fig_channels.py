#!/usr/bin/env python3
"""Decoder comparison across collusion strategies at a fixed code length.

For each strategy, runs the Monte Carlo harness with all three decoders on
the same seeds and writes one ROC overlay SVG plus the score and ROC CSVs.
Defaults follow the reference setup (m=300, c=6, n=1000, c_max=10); R is
desk-scale and adjustable.

Usage:
    python3 scripts/fig_channels.py --out out/channels --R 2000 --jobs 4
"""

import argparse
import sys
from pathlib import Path

from traitortrace import ExperimentConfig, estimate_roc, run_monte_carlo
from traitortrace.plotting import roc_figure


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=300)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--c", type=int, default=6)
    ap.add_argument("--cmax", type=int, default=10)
    ap.add_argument("--R", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument(
        "--strategies",
        default="minority,majority,uniform,coinflip,wca",
        help="comma-separated strategy list",
    )
    ap.add_argument("--out", default="out/channels")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for strategy in args.strategies.split(","):
        cfg = ExperimentConfig(
            m=args.m,
            n=args.n,
            c_true=args.c,
            c_max=args.cmax,
            strategy=strategy,
            realizations=args.R,
            seed=args.seed,
        )
        print(f"[{strategy}] running R={args.R} ...", file=sys.stderr)
        table = run_monte_carlo(cfg, jobs=args.jobs, cache_dir=out / "wca_cache", progress=True)
        table.to_csv(out / f"scores_{strategy}.csv")
        curves = []
        for d in cfg.decoders:
            roc = estimate_roc(table, d)
            roc.to_csv(out / f"roc_{strategy}_{d}.csv")
            curves.append((d, roc))
            print(f"[{strategy}] auc[{d}] = {roc.auc:.4f}")
        roc_figure(
            curves,
            out / f"roc_{strategy}.svg",
            title=f"m={args.m}, c={args.c}, n={args.n}, {strategy}",
        )
    print(f"artifacts in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
