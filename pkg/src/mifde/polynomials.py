"""Complex polynomials, roots, residues and mixed-order characteristic polynomials.

Coefficients are stored in ascending powers throughout (``c[k]`` multiplies
``z**k``), unlike ``numpy.polyval``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from mifde.errors import (
    DegenerateInput,
    DegreeViolation,
    DimensionMismatch,
    DomainError,
    NonConvergence,
    RepeatedRoots,
)

ROOT_TOL = 1e-10
MAX_SWEEPS = 500
STEP_TOL = 1e-14
SEPARATION_TOL = 1e-8
INTERP_RADIUS = 1.5
MULTIPLICITY_TOL = float(np.sqrt(np.finfo(float).eps))


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    coefficients: np.ndarray

    def __init__(self, coefficients):
        c = np.atleast_1d(np.asarray(coefficients, dtype=complex)).copy()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    def __call__(self, z):
        # Horner, ascending storage
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            acc = acc * z + c
        return acc

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial([0.0])
        k = np.arange(1, self.degree + 1)
        return ComplexPolynomial(self.coefficients[1:] * k)

    def __mul__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return ComplexPolynomial(np.convolve(self.coefficients, other.coefficients))

    @classmethod
    def from_roots(cls, roots, leading: complex = 1.0) -> "ComplexPolynomial":
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @classmethod
    def monomial_sum(cls, terms: Sequence[tuple[int, complex]]) -> "ComplexPolynomial":
        """Build from ``(power, coefficient)`` pairs; repeated powers are added."""
        terms = list(terms)
        deg = max(p for p, _ in terms) if terms else 0
        c = np.zeros(deg + 1, dtype=complex)
        for p, v in terms:
            if p < 0:
                raise DomainError(f"negative power {p}")
            c[p] += v
        return cls(c)


@dataclass(frozen=True, eq=False)
class RootSet:
    roots: np.ndarray
    residual_bound: float


def cauchy_bound(p: ComplexPolynomial) -> float:
    c = p.coefficients
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1]))) if p.degree else 0.0


def _scale(p: ComplexPolynomial, z) -> np.ndarray:
    # sum |c_k| |z|^k: the natural size against which |p(z)| is judged
    return ComplexPolynomial(np.abs(p.coefficients))(np.abs(z)).real


def find_roots(p: ComplexPolynomial, tol: float = ROOT_TOL) -> RootSet:
    """All complex roots by Aberth-Ehrlich simultaneous iteration.

    Start points are equally spaced on the Cauchy-bound circle with a fixed
    angular offset, so the result is deterministic. Each root gets one Newton
    polishing step at the end.

    Raises:
        DegenerateInput: zero polynomial or degree 0.
        NonConvergence: sweeps exhausted or residuals above ``tol`` relative to
            the coefficient scale; ``exc.best`` holds the last iterate.
    """
    if p.is_zero:
        raise DegenerateInput("zero polynomial has no well-defined roots")
    n = p.degree
    if n < 1:
        raise DegenerateInput("constant polynomial has no roots")
    c = p.coefficients / p.leading
    mono = ComplexPolynomial(c)
    dmono = mono.derivative()

    if n == 1:
        z = np.array([-c[0]])
    else:
        radius = cauchy_bound(mono)
        z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
        converged = False
        for _ in range(MAX_SWEEPS):
            pv = mono(z)
            dv = dmono(z)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = pv / dv
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                step = ratio / (1.0 - ratio * inv.sum(axis=1))
            step = np.where(pv == 0, 0.0, step)
            if not np.all(np.isfinite(step)):
                step = np.where(np.isfinite(step), step, 0.0)
            z = z - step
            if np.max(np.abs(step) / np.maximum(1.0, np.abs(z))) < STEP_TOL:
                converged = True
                break
        if not converged:
            best = RootSet(z, float(np.max(np.abs(p(z)))))
            raise NonConvergence(f"Aberth iteration did not settle in {MAX_SWEEPS} sweeps", best)

    dv = dmono(z)
    safe = dv != 0
    z = np.where(safe, z - mono(z) / np.where(safe, dv, 1.0), z)

    resid = np.abs(p(z))
    result = RootSet(z, float(resid.max()))
    if np.any(resid > tol * _scale(p, z)):
        raise NonConvergence("root residuals exceed tolerance", result)
    return result


def order_lcm(orders: Sequence[Fraction]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(o).denominator for o in orders), 1)


def characteristic_polynomial(A, orders: Sequence[Fraction]) -> tuple[ComplexPolynomial, int]:
    """``Det(diag(lam^(M a_1), ..., lam^(M a_m)) - A)`` and the common denominator ``M``.

    The determinant is sampled at ``deg + 1`` points on a circle of radius
    1.5 and interpolated; on equispaced circle points the Vandermonde solve
    is an inverse DFT.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    orders = [Fraction(o) for o in orders]
    m = len(orders)
    if A.shape != (m, m):
        raise DimensionMismatch(f"A has shape {A.shape} but {m} orders were given")
    for o in orders:
        if not (0 < o <= 1):
            raise DomainError(f"order {o} outside (0, 1]")
    M = order_lcm(orders)
    powers = np.array([int(o * M) for o in orders])
    deg = int(powers.sum())

    npts = deg + 1
    pts = INTERP_RADIUS * np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.array([np.linalg.det(np.diag(z**powers) - A) for z in pts])
    coeffs = (np.fft.fft(vals) / npts / INTERP_RADIUS ** np.arange(npts)).real
    coeffs[-1] = 1.0  # exact: the monomial diagonal product is monic
    return ComplexPolynomial(coeffs), M


@dataclass(frozen=True, eq=False)
class PartialFractions:
    """``numerators[i](z) / D(z) = sum_j residues[i, j] / (z - poles[j])``."""

    poles: np.ndarray
    residues: np.ndarray

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.residues[:, :, None] / (z.ravel()[None, None, :] - self.poles[None, :, None])).sum(
            axis=1
        ).reshape((self.residues.shape[0],) + z.shape)


def check_simple(roots: np.ndarray, tol: float = SEPARATION_TOL) -> None:
    if len(roots) < 2:
        return
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    if d.min() <= tol:
        raise RepeatedRoots(f"roots closer than {tol} (min separation {d.min():.3e})")


def partial_fractions(
    numerators: Sequence[ComplexPolynomial],
    denominator: ComplexPolynomial,
    roots: RootSet | None = None,
) -> PartialFractions:
    """Residues ``p_i(lam_j) / D'(lam_j)`` over the simple roots of ``D``."""
    if denominator.degree < 1:
        raise DegreeViolation("denominator must have degree >= 1")
    for p in numerators:
        if not p.is_zero and p.degree >= denominator.degree:
            raise DegreeViolation(f"numerator degree {p.degree} >= denominator degree {denominator.degree}")
    lam = (roots or find_roots(denominator)).roots
    check_simple(lam)
    dD = denominator.derivative()
    dprime = dD(lam)
    # a double root splits into a pair ~sqrt(eps) apart, which can slip past
    # the separation test; D' vanishing to that level catches it
    flat = np.abs(dprime) <= MULTIPLICITY_TOL * _scale(dD, lam)
    if np.any(flat):
        raise RepeatedRoots(f"D' vanishes at {np.count_nonzero(flat)} root(s): root is not simple")
    res = np.array([p(lam) / dprime for p in numerators])
    return PartialFractions(lam, res.reshape(len(numerators), len(lam)))
