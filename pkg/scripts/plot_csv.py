#!/usr/bin/env python3
"""Plot SER curves from one or more sweep CSVs.

The x axis is picked from the sweep axis recorded in each file's header
(snr, rho, alpha, position or M).  Needs matplotlib, which the package itself
does not depend on.

    python scripts/plot_csv.py results/fig4_*.csv -o fig4.png
"""
import argparse
import sys
from pathlib import Path

from swiptsim.harness import read_csv

X_COLUMN = {"snr": "snr_db", "rho": "rho", "alpha": "alpha", "M": "M"}


def sweep_axis(path: Path) -> str:
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if line.startswith("# axis "):
                return line.split()[2]
    return "snr"


def x_values(rows, axis):
    if axis == "position":
        return [float(r["d0r_list"].split(";")[0]) / float(r["d0d"]) for r in rows]
    return [float(r[X_COLUMN[axis]]) for r in rows]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv", nargs="+", type=Path)
    ap.add_argument("-o", "--out", type=Path, help="image file (default: show a window)")
    args = ap.parse_args(argv)
    try:
        import matplotlib
        if args.out:
            matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("plot_csv.py needs matplotlib (pip install matplotlib)", file=sys.stderr)
        return 2

    fig, ax = plt.subplots(figsize=(6, 4.5))
    axis = None
    for path in args.csv:
        axis = sweep_axis(path)
        rows = [r for r in read_csv(path) if int(r["trials"]) > 0 and float(r["ser"]) > 0]
        if not rows:
            continue
        ax.semilogy(x_values(rows, axis), [float(r["ser"]) for r in rows], marker="o", label=path.stem)
    ax.set_xlabel({"snr": "SNR (dB)", "position": "D0r / D0d"}.get(axis, axis))
    ax.set_ylabel("SER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    if args.out:
        fig.savefig(args.out, dpi=150)
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
