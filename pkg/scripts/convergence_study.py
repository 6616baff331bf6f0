"""Convergence of the three solvers on small test problems.

    python3 scripts/convergence_study.py
"""

from fractions import Fraction as F

import numpy as np

from mifde.l1 import step_solve
from mifde.series import solve_series
from mifde.special_functions import ml_value
from mifde.spectral import decompose, decompose_commensurate, solve_spectral
from mifde.stability import rational_index_stable
from mifde.systems import MixedSystem, MultiIndexSystem


def l1_order_table():
    print("L1 error at t=1 for D^a y = -y, y(0)=1 (order 1: the solution has a t^a singularity at 0)")
    for alpha in (0.3, 0.5, 0.8):
        ref = ml_value(alpha, 1, -1.0).real
        prev = None
        for n in (50, 100, 200, 400, 800):
            err = abs(step_solve(MultiIndexSystem([[-1.0]], [alpha], [1.0]), 1 / n, n).states[-1, 0] - ref)
            rate = "" if prev is None else f"  observed order {np.log2(prev / err):.3f}"
            print(f"  alpha={alpha} h=1/{n:<4d} err {err:.3e}{rate}")
            prev = err


def series_depth_table():
    print("Series pyramid depth against tolerance, orders (1/3, 2/3), t=2")
    sys_ = MixedSystem([[-1.0, 0.5], [-0.4, -0.8]], F(1, 3), F(2, 3), [1.0, -0.5])
    ref = solve_series(sys_, [2.0], tol=1e-16).states[0]
    for tol in (1e-4, 1e-8, 1e-12):
        tr = solve_series(sys_, [2.0], tol=tol)
        print(f"  tol {tol:.0e} pyramid depth {tr.meta['depth']} err {np.abs(tr.states[0] - ref).max():.2e}")


def solver_agreement(count=20, seed=7):
    print(f"Agreement on {count} random stable systems, orders (1/3, 2/3), t in [0, 1]")
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 1, 21)
    gaps = {"l1 h=1e-3": 0.0, "spectral general": 0.0, "spectral commensurate": 0.0}
    done = 0
    while done < count:
        A = rng.normal(size=(2, 2))
        if rational_index_stable(A, [F(1, 3), F(2, 3)]).margin <= 0.05:
            continue
        sys_ = MixedSystem(A, F(1, 3), F(2, 3), rng.uniform(-1, 1, 2))
        ref = solve_series(sys_, t).states
        gaps["l1 h=1e-3"] = max(gaps["l1 h=1e-3"], np.abs(step_solve(sys_.to_multi_index(), 1e-3, 1000).states[::50] - ref).max())
        gaps["spectral general"] = max(gaps["spectral general"], np.abs(solve_spectral(decompose(sys_), t).states - ref).max())
        gaps["spectral commensurate"] = max(
            gaps["spectral commensurate"], np.abs(solve_spectral(decompose_commensurate(sys_, 2), t).states - ref).max()
        )
        done += 1
    for k, v in gaps.items():
        print(f"  series vs {k}: max {v:.2e}")


if __name__ == "__main__":
    l1_order_table()
    series_depth_table()
    solver_agreement()
