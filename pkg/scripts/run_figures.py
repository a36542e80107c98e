#!/usr/bin/env python3
"""Run several figure presets in one go and report where each CSV landed.

    python scripts/run_figures.py --out results fig2 fig4
    python scripts/run_figures.py --out results --all --trials 200000
"""
import argparse
import logging
import sys
import time

from swiptsim.harness import PRESETS, TrialsPolicy, run_figure
from swiptsim.harness.presets import DESK_TRIALS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("presets", nargs="*", metavar="PRESET", help=", ".join(PRESETS))
    ap.add_argument("--all", action="store_true", help="run every preset")
    ap.add_argument("--out", required=True)
    ap.add_argument("--trials", type=int, default=DESK_TRIALS.max_trials, help="maximum trials per point")
    ap.add_argument("--min-errors", type=int, default=DESK_TRIALS.min_errors)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    names = list(PRESETS) if args.all else args.presets
    unknown = [n for n in names if n not in PRESETS]
    if not names or unknown:
        ap.error(f"choose presets from {', '.join(PRESETS)}" + (f" (unknown: {unknown})" if unknown else ""))
    trials = TrialsPolicy(args.trials, args.min_errors, min(DESK_TRIALS.batch, args.trials))

    failed = 0
    for name in names:
        t0 = time.perf_counter()
        paths, failures = run_figure(name, args.out, workers=args.workers, trials=trials)
        failed += failures
        logging.info("%s: %d curves, %d failed points, %.0fs", name, len(paths), failures,
                     time.perf_counter() - t0)
        for p in paths:
            print(p)
    return 3 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
