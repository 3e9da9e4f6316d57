#!/usr/bin/env python3
"""Render the sweep CSVs written by `fedpir sweep` as PNG plots.

Usage: plot_sweeps.py [--dir DIR] [--out DIR] [figure ...]
Reads figN.csv from --dir (default .) and writes figN.png next to --out.
"""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

# Which CSV column each figure plots, and whether the y axis is logarithmic.
FIGURES = {
    3: ("total_cost", "communication cost (s*c symbols)", False),
    4: ("sharing_rate", "secret sharing rate", False),
    5: ("total_cost", "communication cost (s*c symbols)", True),
    6: ("pir_rate", "retrieval rate", False),
    7: ("pir_rate", "retrieval rate", False),
}

STYLES = {
    "ours": dict(marker="o", color="tab:blue"),
    "baseline": dict(marker="s", color="tab:orange"),
    "star": dict(marker="^", color="tab:green"),
}


def plot_figure(num: int, csv_path: Path, out_path: Path) -> None:
    column, ylabel, logy = FIGURES[num]
    df = pd.read_csv(csv_path, comment="#")
    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, group in df.groupby("scheme"):
        group = group.sort_values("rho")
        style = STYLES.get(scheme, {})
        if len(group) == 1:
            ax.scatter(group["rho"], group[column], label=scheme, zorder=3, **style)
        else:
            ax.plot(group["rho"], group[column], label=scheme, markersize=4, **style)
    if logy:
        ax.set_yscale("log")
    first = df.iloc[0]
    ax.set_title(f"n={first['n']}, T={first['T']}, z_s={first['z_s']}, z_q={first['z_q']}")
    ax.set_xlabel("rho (clients per objective)")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    print(f"{csv_path.name} -> {out_path}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("figures", nargs="*", type=int, default=[],
                        help="figure numbers (default: every figN.csv found)")
    parser.add_argument("--dir", default=".", help="directory with the CSVs")
    parser.add_argument("--out", default=None, help="output directory (default: --dir)")
    args = parser.parse_args()

    src = Path(args.dir)
    dst = Path(args.out) if args.out else src
    dst.mkdir(parents=True, exist_ok=True)

    figures = args.figures or [n for n in sorted(FIGURES) if (src / f"fig{n}.csv").exists()]
    if not figures:
        print(f"no fig*.csv files in {src}", file=sys.stderr)
        return 1
    for num in figures:
        if num not in FIGURES:
            print(f"unknown figure {num} (expected 3..7)", file=sys.stderr)
            return 1
        csv_path = src / f"fig{num}.csv"
        if not csv_path.exists():
            print(f"missing {csv_path}", file=sys.stderr)
            return 1
        plot_figure(num, csv_path, dst / f"fig{num}.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
