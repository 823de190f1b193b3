#!/usr/bin/env python3
"""Redraw the standard figures from the CSVs alone (no library calls).

Usage: python scripts/plot_figures.py [figure_data_dir] [plot_dir]
Run scripts/make_figure_data.py first.  Requires matplotlib.
"""

import csv
import math
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def grouped(rows, key):
    groups = defaultdict(list)
    for row in rows:
        groups[row[key]].append(row)
    return groups


def main(data_dir, plot_dir):
    os.makedirs(plot_dir, exist_ok=True)

    fig, ax = plt.subplots()
    for alpha, rows in grouped(read(f"{data_dir}/quantum_qb.csv"), "alpha").items():
        ax.plot([math.log2(float(r["N"])) for r in rows],
                [float(r["Q_B"]) for r in rows], "o-", label=f"|a|={alpha}")
    ax.set_xlabel("log2 N"), ax.set_ylabel("Q_B"), ax.legend()
    ax.set_title("Quantum sub-binomiality")
    fig.savefig(f"{plot_dir}/quantum_qb.png", dpi=120)

    fig, ax = plt.subplots()
    for name in ("beta03", "beta04", "beta07"):
        rows = read(f"{data_dir}/classical_click_{name}.csv")
        # depth-1 sweep: each detector saw source/2
        ax.plot([float(r["source"]) / 2 for r in rows],
                [float(r["p_click"]) for r in rows], "o-", label=name)
    ax.set_xlabel("I / I_th"), ax.set_ylabel("Pr(on|I)"), ax.legend()
    ax.set_title("Classical click probability")
    fig.savefig(f"{plot_dir}/classical_click.png", dpi=120)

    for measure, fname in (("Q_B", "classical_qb"), ("CP", "classical_cp")):
        fig, ax = plt.subplots()
        for source, rows in grouped(read(f"{data_dir}/{fname}.csv"), "source").items():
            ax.plot([math.log2(float(r["N"])) for r in rows],
                    [float(r[measure]) for r in rows], "o-", label=f"I={source}")
        ax.set_xlabel("log2 N"), ax.set_ylabel(measure), ax.legend()
        ax.set_title(f"Classical {measure}")
        fig.savefig(f"{plot_dir}/{fname}.png", dpi=120)

    fig, ax = plt.subplots()
    for alpha, rows in grouped(read(f"{data_dir}/quantum_cp.csv"), "alpha").items():
        ax.plot([math.log2(float(r["N"])) for r in rows],
                [float(r["CP"]) for r in rows], "o-", label=f"|a|={alpha}")
    ax.set_xlabel("log2 N"), ax.set_ylabel("CP"), ax.legend()
    ax.set_title("Quantum coincident probability")
    fig.savefig(f"{plot_dir}/quantum_cp.png", dpi=120)

    print("plots written to", plot_dir)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "figure_data",
         sys.argv[2] if len(sys.argv) > 2 else "figure_plots")
