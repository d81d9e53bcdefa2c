#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Plot solution CSV files written by ``shallow-water-afc``.

Draws the free surface with the bathymetry in the upper panel and the
discharge in the lower panel. Several solution files (e.g. LOW, MCL and
MCL-SDE at the same time) can be overlaid; ``--exact`` adds the exact
profile as a dashed line.

Usage:
    python scripts/plot_solution.py results/wet-dam-break_*_t0p3.csv \\
        --exact results/wet-dam-break_exact_t0p3.csv -o dam_break.png
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from shallow_water_afc.core import SolverConfig  # noqa: E402
from shallow_water_afc.utils import read_frame  # noqa: E402


def _label(path: Path) -> str:
    try:
        return SolverConfig.from_artifact(path).scheme.scheme
    except Exception:
        return path.stem


def plot(
    solutions: List[Path],
    exact: Optional[Path] = None,
    output: Optional[Path] = None,
) -> Path:
    """
    Plot free surface and discharge of one or more solution files.

    Returns:
        Path of the written image
    """
    fig, (ax0, ax1) = plt.subplots(
        nrows=2, ncols=1, figsize=(7, 6), sharex=True, tight_layout=True
    )
    first = read_frame(solutions[0])
    ax0.fill_between(first["x"], first["b"], first["b"].min(), color="0.8")
    ax0.plot(first["x"], first["b"], color="0.4", lw=1, label="b")

    for path in solutions:
        frame = read_frame(path)
        label = _label(path)
        ax0.plot(frame["x"], frame["H"], lw=1.2, label=label)
        ax1.plot(frame["x"], frame["hv"], lw=1.2, label=label)

    if exact is not None:
        ref = read_frame(exact)
        ax0.plot(ref["x"], ref["H"], "k--", lw=1, label="exact")
        ax1.plot(ref["x"], ref["hv"], "k--", lw=1, label="exact")

    ax0.set_ylabel("h + b")
    ax1.set_ylabel("hv")
    ax1.set_xlabel("x")
    ax0.legend()

    output = output or solutions[0].with_suffix(".png")
    fig.savefig(output, dpi=200)
    plt.close(fig)
    return output


def main() -> int:
    """Parse arguments and write the figure."""
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("solutions", nargs="+", type=Path)
    parser.add_argument("--exact", type=Path, help="Exact profile CSV")
    parser.add_argument("-o", "--output", type=Path, help="Output image")
    args = parser.parse_args()

    missing = [p for p in args.solutions if not p.exists()]
    if missing:
        print(f"[ERROR] 文件不存在: {missing[0]}", file=sys.stderr)
        return 1

    path = plot(args.solutions, args.exact, args.output)
    print(f"[OK] 图像已保存: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
