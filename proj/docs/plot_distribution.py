#!/usr/bin/env python3
"""Plot Pr(j) from `qpf dist` output.

    qpf dist --L 4 --r 10 --out dist.csv
    python3 docs/plot_distribution.py dist.csv dist.png
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(in_path, out_path):
    with open(in_path) as f:
        title = f.readline().lstrip("# ").strip()
        rows = list(csv.DictReader(f))
    j = [int(r["j"]) for r in rows]
    p = [float(r["probability"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(j, p, width=1.0)
    ax.set_xlabel("j")
    ax.set_ylabel("Pr(j)")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(*sys.argv[1:])
