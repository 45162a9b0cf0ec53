#!/usr/bin/env python3
"""Plot log2 s against L from a sweep CSV, with the fitted lines from `qpf fit`.

    qpf sweep --Lmin 3 --Lmax 14 --dmax-list 1,2,3 --out sweep.csv
    qpf fit --in sweep.csv --out fit.json
    python3 docs/plot_scaling.py sweep.csv fit.json scaling.png
"""
import csv
import json
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(sweep_path, fit_path, out_path):
    rows = {}
    with open(sweep_path) as f:
        for row in csv.DictReader(line for line in f if not line.startswith("#")):
            if row["s"] in ("", "nan"):
                continue
            rows.setdefault(int(row["d_max"]), []).append((int(row["L"]), float(row["s"])))
    with open(fit_path) as f:
        fits = {fit["d_max"]: fit for fit in json.load(f)}

    fig, ax = plt.subplots(figsize=(6, 4))
    for d, pts in sorted(rows.items()):
        pts.sort()
        L = [p[0] for p in pts]
        line, = ax.plot(L, [math.log2(p[1]) for p in pts], "o", label=f"d_max={d}")
        fit = fits.get(d)
        if fit and fit["t"] != "inf":
            ax.plot(L, [math.log2(fit["c"]) - x / fit["t"] for x in L], "-", color=line.get_color(),
                    label=f"fit t={fit['t']:.3g}")
    ax.set_xlabel("L")
    ax.set_ylabel("log2 s")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)


if __name__ == "__main__":
    if len(sys.argv) != 4:
        sys.exit(__doc__)
    main(*sys.argv[1:])
