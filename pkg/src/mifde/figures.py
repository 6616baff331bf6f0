"""Datasets behind the stability-boundary and dynamics figures, plus envelope metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from mifde.l1 import step_solve
from mifde.stability import boundary_at_d, boundary_curve, boundary_closed_form
from mifde.systems import MultiIndexSystem, Trajectory

X_RANGE = (1e-4, 1e4)
X_SAMPLES = 2001

FIG4_T_END = 40.0
FIG4_STEP = 5e-5
FIG6_T_END = 10.0
FIG6_STEP = 1e-3
FIG6_ORDERS = ((0.85, 0.95), (0.5, 0.95), (0.2, 0.05), (0.15, 0.95))


@dataclass(frozen=True)
class BoundaryFigure:
    alpha: Fraction
    beta: Fraction

    @property
    def midpoint(self) -> float:
        """Angle (units of pi) halfway between the two single-order sector edges."""
        return float(self.alpha + self.beta) / 4


FIG2 = BoundaryFigure(Fraction(1, 2), Fraction(1))
FIG3 = BoundaryFigure(Fraction(1, 3), Fraction(2, 3))


def boundary_rows(alpha, beta, x_grid=None) -> np.ndarray:
    """Rows ``x, r, d, theta, angle`` sorted by ``d``."""
    if x_grid is None:
        x_grid = np.geomspace(*X_RANGE, X_SAMPLES)
    return np.array([[s.x, s.r, s.d, s.theta, s.angle] for s in boundary_curve(float(alpha), float(beta), x_grid)])


def rotation_matrix(d: float, theta: float) -> np.ndarray:
    """``[[d, -theta], [theta, d]]``, eigenvalues ``d +- i theta``."""
    return np.array([[d, -theta], [theta, d]])


def symmetric_matrix(d: float, theta: float) -> np.ndarray:
    """``[[d, theta], [theta, d]]``, eigenvalues ``d +- theta``."""
    return np.array([[d, theta], [theta, d]])


def boundary_theta(fig: BoundaryFigure, d: float = 1.0) -> float:
    a, b = max(fig.alpha, fig.beta), min(fig.alpha, fig.beta)
    if a == 2 * b:
        return d * boundary_closed_form(float(a), float(b), d)
    return boundary_at_d(float(a), float(b), d).theta


@dataclass
class DynamicsCase:
    name: str
    orders: tuple
    A: np.ndarray
    y0: tuple = (1.0, 1.0)
    meta: dict = field(default_factory=dict)

    def solve(self, h: float, t_end: float) -> Trajectory:
        sys_ = MultiIndexSystem(self.A, [float(o) for o in self.orders], self.y0)
        tr = step_solve(sys_, h, int(round(t_end / h)))
        tr.meta.update(self.meta, case=self.name)
        return tr


def fig4_cases(d: float = 1.0, bump: float = 0.3) -> list[DynamicsCase]:
    out = []
    for fig, tag in ((FIG2, "a12"), (FIG3, "a13")):
        th = boundary_theta(fig, d)
        for kind, theta in (("boundary", th), ("decaying", th + bump)):
            out.append(
                DynamicsCase(
                    f"{tag}_{kind}", (fig.alpha, fig.beta), rotation_matrix(d, theta), meta={"theta": theta, "d": d}
                )
            )
    return out


def fig6_cases(d: float = -1.0, theta: float = 0.5) -> list[DynamicsCase]:
    return [
        DynamicsCase(f"a{a:g}_b{b:g}".replace(".", "p"), (a, b), symmetric_matrix(d, theta), meta={"d": d, "theta": theta})
        for a, b in FIG6_ORDERS
    ]


# --- envelope metrics ---------------------------------------------------------------


def local_maxima(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    return np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1


def local_minima(y: np.ndarray) -> np.ndarray:
    return local_maxima(-np.asarray(y))


def swing_amplitudes(y: np.ndarray) -> np.ndarray:
    """Peak minus the next trough, for each peak that has a later trough."""
    y = np.asarray(y)
    mx, mn = local_maxima(y), local_minima(y)
    out = []
    for p in mx:
        later = mn[mn > p]
        if later.size:
            out.append(y[p] - y[later[0]])
    return np.array(out)


def peak_to_peak_decay(y: np.ndarray) -> float:
    """Relative drop of the swing from the first full oscillation to the last: ``1 - last/first``.

    A full oscillation is trough, peak, next trough; a peak before the first
    trough is start-up transient and is skipped.
    """
    y = np.asarray(y)
    mn = local_minima(y)
    amps = swing_amplitudes(y[mn[0]:]) if mn.size else np.array([])
    if amps.size < 2:
        return math.nan
    return float(1.0 - amps[-1] / amps[0])


def peaks(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    return y[local_maxima(y)]
