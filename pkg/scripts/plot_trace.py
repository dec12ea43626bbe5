#!/usr/bin/env python3
"""Plot traces written by ``nosmc simulate``.

Usage:
  python scripts/plot_trace.py out/example41.csv
  python scripts/plot_trace.py out/example41.csv out/example42.csv -o fig.png
  python scripts/plot_trace.py out/uav-mission_x.csv --tracking

Needs matplotlib (not a dependency of the package itself).
"""
import argparse
from pathlib import Path

import matplotlib.pyplot as plt

from nosmc.sim import read_csv


def plot_errors(axes, cols, label):
    t = cols["t"]
    axes[0].plot(t, cols["e1"], label=label)
    axes[1].plot(t, cols["e2"], label=label)
    axes[2].plot(t, cols["u"], label=label, linewidth=0.6)
    for ax, name in zip(axes, ("e1", "e2", "u")):
        ax.set_ylabel(name)
        ax.grid(True, alpha=0.3)


def plot_tracking(ax, cols, label):
    ax.plot(cols["t"], cols["xd"], "k--", linewidth=0.8, label=f"{label} reference")
    ax.plot(cols["t"], cols["x1"], label=f"{label} output")
    ax.set_ylabel("position")
    ax.grid(True, alpha=0.3)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="+", type=Path)
    ap.add_argument("-o", "--output", type=Path, help="save instead of showing")
    ap.add_argument("--tracking", action="store_true", help="plot x1 against xd (per-channel CSVs)")
    args = ap.parse_args(argv)

    if args.tracking:
        fig, ax = plt.subplots(figsize=(8, 4))
        for path in args.csv:
            plot_tracking(ax, read_csv(path), path.stem)
        ax.set_xlabel("t [s]")
        ax.legend()
    else:
        fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 7))
        for path in args.csv:
            plot_errors(axes, read_csv(path), path.stem)
        axes[-1].set_xlabel("t [s]")
        axes[0].legend()
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
