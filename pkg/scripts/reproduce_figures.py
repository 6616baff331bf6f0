"""Write the CSV data behind every figure and summarise the dynamics envelopes.

    python3 scripts/reproduce_figures.py [--out-dir figures] [--dt 5e-5]
"""

import argparse
import math

import numpy as np

from mifde import figures
from mifde.cli import main as cli
from mifde.io import read_csv
from mifde.stability import theorem13_bound


def summarise_boundaries(out_dir):
    for fid, fig in (("fig2", figures.FIG2), ("fig3", figures.FIG3)):
        _, rows = read_csv(f"{out_dir}/{fid}_boundary.csv")
        ang = rows[:, 4]
        bound = math.atan(theorem13_bound(float(fig.alpha), float(fig.beta))) / math.pi
        i = int(np.argmin(ang))
        print(f"{fid}: orders ({fig.alpha}, {fig.beta}) min angle {ang[i]:.6f} pi at d={rows[i, 2]:.4f}"
              f" (bound {bound:.6f} pi), midpoint {fig.midpoint:.4f} pi")


def summarise_dynamics(out_dir, fid):
    for case in figures.fig4_cases():
        if fid == "fig5" and "boundary" in case.name:
            continue
        _, d = read_csv(f"{out_dir}/{fid}_{case.name}.csv")
        parts = []
        for i in (1, 2):
            decay = figures.peak_to_peak_decay(d[:, i])
            parts.append(f"y{i} decay {decay:+.2%} final |y| {abs(d[-1, i]):.3e}")
        print(f"{fid} {case.name}: " + "; ".join(parts))


def summarise_fig6(out_dir):
    for case in figures.fig6_cases():
        _, d = read_csv(f"{out_dir}/fig6_{case.name}.csv")
        early = d[:, 0] <= 2.0
        gap = np.abs(d[early, 1] - d[early, 2]).max()
        print(f"fig6 {case.name}: max |y1-y2| on t<=2 {gap:.4f}, y(10) = ({d[-1, 1]:.4f}, {d[-1, 2]:.4f})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--dt", type=float, help="override the L1 step of fig4/fig5")
    args = ap.parse_args()
    for fid in ("fig2", "fig3", "fig4", "fig5", "fig6"):
        argv = ["figure", fid, "--out-dir", args.out_dir]
        if args.dt and fid in ("fig4", "fig5"):
            argv += ["--dt", str(args.dt)]
        if cli(argv) != 0:
            raise SystemExit(f"{fid} failed")
    summarise_boundaries(args.out_dir)
    summarise_dynamics(args.out_dir, "fig4")
    summarise_dynamics(args.out_dir, "fig5")
    summarise_fig6(args.out_dir)
