"""Asymptotic stability of linear fractional systems.

Three root tests (single-order sector test, rational multi-order test,
two-term scalar criterion) and the stability boundary of the 2x2 rotation
family ``A = [[d, -theta], [theta, d]]`` with block orders ``alpha``, ``beta``.

The boundary is parameterized by ``x = r^(alpha - beta)`` where ``s = i r``
is the boundary root:

    (theta/d)^2 = K ((x^2 + 1)/x - 2 cos((alpha+beta) pi/2)),
    d = x^(alpha/(alpha-beta)) sin((alpha+beta) pi/2) / (x sin(alpha pi/2) + sin(beta pi/2)),

with ``K = sin(alpha pi/2) sin(beta pi/2) / sin^2((alpha+beta) pi/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from mifde.errors import DegenerateOrders, DimensionMismatch, DomainError
from mifde.polynomials import characteristic_polynomial, find_roots
from mifde.systems import parse_order

MARGINAL_TOL = 1e-9
ZERO_ROOT_TOL = 1e-10
RATIO_DENOMINATOR_CAP = 1000


@dataclass(frozen=True, eq=False)
class StabilityVerdict:
    """Sector-test outcome.

    ``margin`` is ``min |arg lam| - sector`` in radians. Margins within
    ``MARGINAL_TOL`` of zero are reported as marginal and count as not stable.
    """

    margin: float
    witnesses: np.ndarray  # roots (or eigenvalues) used in the verdict
    sector: float
    excluded: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def status(self) -> str:
        if abs(self.margin) <= MARGINAL_TOL:
            return "marginal"
        return "stable" if self.margin > 0 else "unstable"

    @property
    def stable(self) -> bool:
        return self.status == "stable"

    @property
    def arguments(self) -> np.ndarray:
        return np.abs(np.angle(self.witnesses))


def _verdict(roots, sector, excluded=None) -> StabilityVerdict:
    roots = np.asarray(roots, dtype=complex)
    margin = float(np.min(np.abs(np.angle(roots))) - sector) if roots.size else math.inf
    if excluded is None:
        excluded = np.zeros(0, dtype=complex)
    return StabilityVerdict(margin, roots, sector, np.asarray(excluded, dtype=complex))


def _square(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    return A


def matignon_stable(A, alpha: float) -> StabilityVerdict:
    """Single-order test: every eigenvalue must satisfy ``|arg lam| > alpha pi/2``."""
    A = _square(A)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"order {alpha} outside (0, 1]")
    return _verdict(np.linalg.eigvals(A), alpha * math.pi / 2)


def rational_index_stable(A, orders: Sequence) -> StabilityVerdict:
    """Multi-order test on ``p(lam) = Det(diag(lam^(M a_i)) - A)``.

    With ``M`` the common denominator of the orders, every root needs
    ``|arg lam| > pi / (2M)``. Roots with ``|lam| < 1e-10`` have no defined
    argument; they are left out of the margin and listed in ``excluded``.
    """
    A = _square(A)
    fr = [parse_order(o) for o in orders]
    p, M = characteristic_polynomial(A, fr)
    roots = find_roots(p).roots
    small = np.abs(roots) < ZERO_ROOT_TOL
    return _verdict(roots[~small], math.pi / (2 * M), roots[small])


def _check_two_term(alpha: float, beta: float) -> None:
    if not (alpha > beta > 0):
        raise DomainError(f"need alpha > beta > 0, got alpha={alpha}, beta={beta}")
    ratio = alpha / beta
    if abs(float(Fraction(ratio).limit_denominator(RATIO_DENOMINATOR_CAP)) - ratio) > 1e-12 * ratio:
        raise DomainError(f"alpha/beta = {ratio} is not a rational with denominator <= {RATIO_DENOMINATOR_CAP}")


def two_term_threshold(b: float, alpha: float, beta: float) -> float:
    """Critical ``a`` for ``D^alpha y + a D^beta y + b y = 0``; stable above it."""
    _check_two_term(alpha, beta)
    if b <= 0:
        raise DomainError(f"threshold defined for b > 0, got {b}")
    g = alpha - beta
    den = math.sin(beta * math.pi / 2) ** (beta / alpha) * math.sin(g * math.pi / 2) ** (g / alpha)
    return -math.sin(alpha * math.pi / 2) * b ** (g / alpha) / den


def two_term_stable(a: float, b: float, alpha: float, beta: float) -> bool:
    """Closed-form stability of ``D^alpha y + a D^beta y + b y = 0``.

    Returns False for ``a`` within ``MARGINAL_TOL`` of the threshold (the
    roots sit on the sector edge there).
    """
    _check_two_term(alpha, beta)
    if not (beta < 2 and alpha - beta < 2):
        return False
    if b <= 0:
        return False
    return a > two_term_threshold(b, alpha, beta) + MARGINAL_TOL


def companion_embedding(a: float, b: float, alpha, beta) -> tuple[np.ndarray, list[Fraction]]:
    """Two-component system equivalent to ``D^alpha y + a D^beta y + b y = 0``.

    State ``(y, D^beta y)`` with orders ``(beta, alpha - beta)``; its
    characteristic polynomial is ``lam^(M alpha) + a lam^(M beta) + b``.
    """
    fa, fb = parse_order(alpha), parse_order(beta)
    if not fa > fb:
        raise DomainError(f"need alpha > beta, got {fa}, {fb}")
    return np.array([[0.0, 1.0], [-b, -a]]), [fb, fa - fb]


def block_sector_condition(B2, beta: float) -> bool:
    """Second-block requirement ``|arg sigma(B_2)| >= beta pi/2`` (all eigenvalues).

    Keeps ``s^beta I - B_2`` nonsingular on the boundary ray, the
    precondition for reducing the boundary to a first-block determinant.
    """
    ev = np.linalg.eigvals(_square(B2))
    return bool(np.all(np.abs(np.angle(ev)) >= beta * math.pi / 2 - MARGINAL_TOL))


# --- rotation-family boundary ---------------------------------------------------


@dataclass(frozen=True)
class BoundarySample:
    x: float
    r: float
    d: float
    theta_over_d: float

    @property
    def theta(self) -> float:
        return self.d * self.theta_over_d

    @property
    def angle(self) -> float:
        """``arctan(theta/d) / pi``, in (0, 1/2)."""
        return math.atan(self.theta_over_d) / math.pi


def _ordered(alpha: float, beta: float) -> tuple[float, float]:
    alpha, beta = float(alpha), float(beta)
    for o in (alpha, beta):
        if not (0.0 < o <= 1.0):
            raise DomainError(f"order {o} outside (0, 1]")
    if alpha == beta:
        raise DegenerateOrders(
            f"alpha = beta = {alpha}: boundary is the constant angle alpha/2",
            math.tan(alpha * math.pi / 2),
        )
    return (alpha, beta) if alpha > beta else (beta, alpha)


def _ratio_sq(x, alpha, beta):
    sa, sb = math.sin(alpha * math.pi / 2), math.sin(beta * math.pi / 2)
    sab = math.sin((alpha + beta) * math.pi / 2)
    K = sa * sb / sab**2
    return K * ((x * x + 1.0) / x - 2.0 * math.cos((alpha + beta) * math.pi / 2))


def _d_of_x(x, alpha, beta):
    sa, sb = math.sin(alpha * math.pi / 2), math.sin(beta * math.pi / 2)
    sab = math.sin((alpha + beta) * math.pi / 2)
    return x ** (alpha / (alpha - beta)) * sab / (x * sa + sb)


def boundary_sample(alpha: float, beta: float, x: float) -> BoundarySample:
    alpha, beta = _ordered(alpha, beta)
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    return BoundarySample(
        x=float(x),
        r=float(x) ** (1.0 / (alpha - beta)),
        d=_d_of_x(x, alpha, beta),
        theta_over_d=math.sqrt(_ratio_sq(x, alpha, beta)),
    )


def boundary_curve(alpha: float, beta: float, x_grid) -> list[BoundarySample]:
    """Boundary samples at each ``x``, sorted by ``d``. Orders may come in either order."""
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if np.any(xs <= 0) or not np.all(np.isfinite(xs)):
        raise DomainError("x grid must be positive and finite")
    samples = [boundary_sample(alpha, beta, float(x)) for x in xs]
    return sorted(samples, key=lambda s: s.d)


def boundary_at_d(alpha: float, beta: float, d: float) -> BoundarySample:
    """Boundary sample with the given ``d > 0``; ``d(x)`` is increasing so the root is unique."""
    a, b = _ordered(alpha, beta)
    if not d > 0:
        raise DomainError(f"d must be positive, got {d}")
    f = lambda lx: math.log(_d_of_x(math.exp(lx), a, b)) - math.log(d)
    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2
    while f(hi) < 0:
        hi *= 2
    lx = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return boundary_sample(a, b, math.exp(lx))


def boundary_closed_form(alpha: float, beta: float, d: float) -> float:
    """Explicit ``theta/d`` on the boundary when ``alpha = 2 beta`` (+ branch)."""
    a, b = float(alpha), float(beta)
    if not math.isclose(a, 2 * b, rel_tol=0, abs_tol=1e-12):
        raise DomainError(f"closed form needs alpha = 2 beta, got alpha={a}, beta={b}")
    if not (0 < b <= 0.5):
        raise DomainError(f"beta must lie in (0, 1/2], got {b}")
    if not d > 0:
        raise DomainError(f"d must be positive, got {d}")
    if b == 0.5:
        return math.sqrt((1 + d) * (1 + math.sqrt(1 + 2 / d)))
    if math.isclose(b, 1 / 3, rel_tol=0, abs_tol=1e-15):
        return math.sqrt(3 / 8) * math.sqrt((1 + d / 2) * math.sqrt(1 + 8 / (3 * d)) + d / 2 - 1)
    s1, s2, s3 = (math.sin(k * b * math.pi / 2) for k in (1, 2, 3))
    d_beta = d * s1 / s3
    root = math.sqrt(1 + 4 / d * s1 * s3 / s2**2)
    inner = d_beta - 1 + (1 + d_beta) * root - 2 * math.cos(3 * b * math.pi / 2) / math.cos(b * math.pi / 2)
    return math.sqrt(0.5 * (s2 / s3) ** 2 * inner)


def theorem13_bound(alpha: float, beta: float) -> float:
    """Infimum of ``theta/d`` over the boundary, ``sqrt(sin(a pi/2) sin(b pi/2)) / cos((a+b) pi/4)``.

    Returns ``inf`` when ``alpha + beta = 2``.
    """
    a, b = float(alpha), float(beta)
    for o in (a, b):
        if not (0.0 < o <= 1.0):
            raise DomainError(f"order {o} outside (0, 1]")
    if a + b == 2.0:
        return math.inf
    return math.sqrt(math.sin(a * math.pi / 2) * math.sin(b * math.pi / 2)) / math.cos((a + b) * math.pi / 4)


def bound_location(alpha: float, beta: float) -> float:
    """``d`` at which the boundary attains the bound (``x = 1``)."""
    a, b = _ordered(alpha, beta)
    return _d_of_x(1.0, a, b)
