"""``mifde`` command line: Mittag-Leffler values, solvers, stability, figure data.

Exit codes: 0 success, 2 input/domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from mifde import figures
from mifde.errors import DomainError, MethodInapplicable, MifdeError, NumericalError
from mifde.io import SystemFile, write_csv
from mifde.l1 import step_solve
from mifde.series import DEFAULT_TOL, MAX_LEVELS, solve_series
from mifde.special_functions import MLParams, ml
from mifde.spectral import decompose, decompose_commensurate, solve_spectral
from mifde.stability import boundary_at_d, boundary_curve, matignon_stable, rational_index_stable
from mifde.systems import parse_order

log = logging.getLogger("mifde")

DEFAULT_DT = 1e-3
DEFAULT_SAMPLES = 100


def _fmt(v: complex) -> str:
    v = complex(v)
    return repr(v.real) if v.imag == 0 else repr(v)


def cmd_mlf(args) -> int:
    rep = ml(MLParams(args.alpha, args.beta, args.gamma), complex(args.z.replace(" ", "")), tol=args.tol)
    print(_fmt(rep.value))
    print(f"# terms={rep.terms_used} max_term={rep.max_term_magnitude:.6e} "
          f"error_estimate={rep.error_estimate:.3e} precision_warning={rep.precision_warning}")
    return 0


def _grid(t_end: float, step: float) -> np.ndarray:
    n = int(round(t_end / step))
    return step * np.arange(n + 1)


def solve_file(sf: SystemFile, method: str, *, dt=None, tol=None, depth=None, stride: int = 1):
    """Trajectory for a system file by the named method."""
    tol = tol if tol is not None else (sf.tol if sf.tol is not None else DEFAULT_TOL)
    step = dt if dt is not None else sf.dt
    if method == "l1":
        step = step if step is not None else DEFAULT_DT
        tr = step_solve(sf.multi_index(), step, int(round(sf.t_end / step)))
        tr.times, tr.states = tr.times[::stride], tr.states[::stride]
        return tr
    times = _grid(sf.t_end, step)[::stride] if step is not None else np.linspace(0, sf.t_end, DEFAULT_SAMPLES + 1)
    if method == "series":
        depth = depth if depth is not None else (sf.depth if sf.depth is not None else MAX_LEVELS)
        return solve_series(sf.mixed(), times, tol=tol, max_levels=depth)
    if method == "spectral":
        system = sf.mixed()
        if system.m != 2:
            raise MethodInapplicable("spectral method needs exactly two scalar components")
        if system.alpha == system.beta:
            raise MethodInapplicable("spectral method needs two distinct orders")
        lo, hi = sorted((system.alpha, system.beta))
        ratio = hi / lo
        form = decompose_commensurate(system, int(ratio)) if ratio.denominator == 1 else decompose(system)
        return solve_spectral(form, times)
    raise DomainError(f"unknown method {method!r}")


def cmd_solve(args) -> int:
    sf = SystemFile.read(args.file)
    tr = solve_file(sf, args.method, dt=args.dt, tol=args.tol, depth=args.depth, stride=args.stride)
    header = ["t"] + [f"y{i + 1}" for i in range(tr.states.shape[1])]
    write_csv(args.out, header, np.column_stack([tr.times, tr.states]))
    return 0


def cmd_stability(args) -> int:
    if args.mode == "check":
        if not args.file:
            raise DomainError("check mode needs a system file")
        sf = SystemFile.read(args.file)
        fr = sf.fractions()
        if len(set(fr)) == 1:
            v = matignon_stable(sf.A, float(fr[0]))
        else:
            v = rational_index_stable(sf.A, fr)
        print(f"{v.status} margin={v.margin!r}")
        if v.excluded.size:
            print(f"# {v.excluded.size} root(s) at the origin excluded")
        return 0
    if args.alpha is None or args.beta is None:
        raise DomainError("boundary mode needs --alpha and --beta")
    alpha, beta = float(parse_order(args.alpha)), float(parse_order(args.beta))
    if alpha == beta:
        raise DomainError("boundary mode needs two distinct orders")
    xs = np.geomspace(args.x_min, args.x_max, args.samples)
    samples = boundary_curve(alpha, beta, xs)
    samples += [boundary_at_d(alpha, beta, d) for d in args.at_d or []]
    samples.sort(key=lambda s: s.d)
    write_csv(args.out, ["x", "r", "d", "theta", "angle"], [[s.x, s.r, s.d, s.theta, s.angle] for s in samples])
    return 0


def _write_traj(path: Path, tr, stride: int):
    write_csv(path, ["t", "y1", "y2"], np.column_stack([tr.times[::stride], tr.states[::stride]]))


def cmd_figure(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fid = args.id
    if fid in ("fig2", "fig3"):
        fig = figures.FIG2 if fid == "fig2" else figures.FIG3
        rows = figures.boundary_rows(fig.alpha, fig.beta)
        write_csv(out / f"{fid}_boundary.csv", ["x", "r", "d", "theta", "angle"], rows)
        d = rows[:, 2]
        write_csv(out / f"{fid}_midpoint.csv", ["d", "angle"], [[d[0], fig.midpoint], [d[-1], fig.midpoint]])
    elif fid in ("fig4", "fig5"):
        h = args.dt or figures.FIG4_STEP
        stride = max(1, int(round(args.out_dt / h)))
        for case in figures.fig4_cases():
            if fid == "fig5" and "decaying" not in case.name:
                continue
            log.info("solving %s (h=%g)", case.name, h)
            _write_traj(out / f"{fid}_{case.name}.csv", case.solve(h, figures.FIG4_T_END), stride)
    elif fid == "fig6":
        h = args.dt or figures.FIG6_STEP
        stride = max(1, int(round(args.out_dt / h)))
        for case in figures.fig6_cases():
            _write_traj(out / f"fig6_{case.name}.csv", case.solve(h, figures.FIG6_T_END), stride)
    else:
        raise DomainError(f"unknown figure {fid!r}")
    print(f"wrote {fid} data to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mifde", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mlf", help="evaluate E^gamma_{alpha,beta}(z)")
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--beta", type=float, default=1.0)
    m.add_argument("--gamma", type=int, default=1)
    m.add_argument("--z", required=True, help="real or complex, e.g. -1 or 1+2j")
    m.add_argument("--tol", type=float, default=1e-16)
    m.set_defaults(func=cmd_mlf)

    s = sub.add_parser("solve", help="solve a system file, CSV t,y1..ym")
    s.add_argument("file")
    s.add_argument("--method", choices=["series", "l1", "spectral"], default="l1")
    s.add_argument("--dt", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--depth", type=int, help="maximum series levels")
    s.add_argument("--stride", type=int, default=1, help="write every k-th grid point")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_solve)

    st = sub.add_parser("stability", help="stability verdict or boundary curve")
    st.add_argument("mode", choices=["check", "boundary"])
    st.add_argument("file", nargs="?")
    st.add_argument("--alpha")
    st.add_argument("--beta")
    st.add_argument("--x-min", type=float, default=1e-3)
    st.add_argument("--x-max", type=float, default=1e3)
    st.add_argument("--samples", type=int, default=201)
    st.add_argument("--at-d", type=float, action="append", help="add the exact boundary sample at this d")
    st.add_argument("--out", default="-")
    st.set_defaults(func=cmd_stability)

    f = sub.add_parser("figure", help="write the CSV data behind a figure")
    f.add_argument("id", choices=["fig2", "fig3", "fig4", "fig5", "fig6"])
    f.add_argument("--out-dir", "--out", dest="out_dir", default="figures")
    f.add_argument("--dt", type=float, help="L1 step for trajectory figures")
    f.add_argument("--out-dt", type=float, default=1e-2, help="spacing of written trajectory rows")
    f.set_defaults(func=cmd_figure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    warnings.simplefilter("default")
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except MifdeError as exc:  # pragma: no cover - every subclass is one of the above
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
