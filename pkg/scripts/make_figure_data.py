#!/usr/bin/env python3
"""Emit the standard figure datasets as CSVs via the sweep CLI.

Datasets (written to the output directory, default ./figure_data):
  quantum_qb.csv        quantum Q_B vs depth for amplitudes 1, 1.5, 2 and 50
  quantum_cp.csv        same sweep; the CP / CP_inf columns show saturation
  classical_click.csv   single-detector click probability vs intensity for
                        beta 0.3, 0.4, 0.7 (depth-1 sweep: each detector sees
                        source/2, so plot p_click against source/2)
  classical_qb.csv      classical Q_B dip-and-return for I = 25, 50, 100
  classical_cp.csv      classical CP cliff for the same intensities
  appendix_a.csv        N*Pr(on|N) decay for an exponential source, mean 50
"""

import sys

from clickmux.cli import main

DEPTHS = [str(m) for m in range(1, 11)]


def run(out_dir: str) -> None:
    jobs = [
        ["quantum-sweep", "--alphas", "1", "1.5", "2", "50",
         "--depths", *DEPTHS, "--out", f"{out_dir}/quantum_qb.csv"],
        ["quantum-sweep", "--alphas", "1", "1.5", "2", "50",
         "--depths", *DEPTHS, "--out", f"{out_dir}/quantum_cp.csv"],
        ["classical-sweep",
         "--intensities", *(f"{2 * v:g}" for v in
                            (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0)),
         "--beta", "0.3", "--depths", "1",
         "--out", f"{out_dir}/classical_click_beta03.csv"],
        ["classical-sweep",
         "--intensities", *(f"{2 * v:g}" for v in
                            (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0)),
         "--beta", "0.4", "--depths", "1",
         "--out", f"{out_dir}/classical_click_beta04.csv"],
        ["classical-sweep",
         "--intensities", *(f"{2 * v:g}" for v in
                            (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0)),
         "--beta", "0.7", "--depths", "1",
         "--out", f"{out_dir}/classical_click_beta07.csv"],
        ["classical-sweep", "--intensities", "25", "50", "100", "--beta", "0.5",
         "--depths", *DEPTHS, "--out", f"{out_dir}/classical_qb.csv"],
        ["classical-sweep", "--intensities", "25", "50", "100", "--beta", "0.5",
         "--depths", *DEPTHS, "--out", f"{out_dir}/classical_cp.csv"],
        ["appendix-a", "--source", "exp:50", "--beta", "0.5",
         "--depths", *(str(m) for m in range(1, 15)),
         "--out", f"{out_dir}/appendix_a.csv"],
    ]
    for job in jobs:
        code = main(job)
        if code != 0:
            raise SystemExit(code)
        print("wrote", job[job.index("--out") + 1])


if __name__ == "__main__":
    import os

    out_dir = sys.argv[1] if len(sys.argv) > 1 else "figure_data"
    os.makedirs(out_dir, exist_ok=True)
    run(out_dir)
