"""Closed-form solutions of scalar two-block systems with rational orders.

With ``X(s) = s^(alpha-1) p_i(w) / Det(w)`` in a variable ``w = s^a`` and
the partial fractions ``p_i/Det = sum_j A_j^(i) / (w - lam_j)``, inverting
the Laplace pair ``t^(b-1) E_{a,b}(lam t^a) <-> s^(a-b) / (s^a - lam)``
gives

    y_i(t) = sum_j A_j^(i) t^(b-1) E_{a,b}(lam_j t^a),    b = 1 - alpha + a.

For ``b < 1`` the kernel is singular at 0; it is evaluated in the shifted form

    t^(b-1) E_{a,b}(lam t^a) = lam^r E_a(lam t^a) + sum_{k<r} lam^k t^(a(k-r)) / Gamma(a(k-r) + 1)

with ``r = (1 - b)/a``. Summed over poles, the singular part carries the
moments ``sum_j A_j lam_j^k``, ``k < r``, which vanish for every
decomposition built here (the numerator degree is low enough), so the
solution is a plain combination of ``E_a`` terms and is regular at 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from mifde.errors import ConjugacyViolation, DomainError, MethodInapplicable, PrecisionLossWarning, ZeroRoot
from mifde.polynomials import ComplexPolynomial, find_roots, partial_fractions
from mifde.special_functions import MLParams, ml
from mifde.systems import MixedSystem, Trajectory, check_time_grid, parse_order

CONJUGACY_TOL = 1e-8
SHIFT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """``y(t) = Re sum_j residues[:, j] t^(ml_beta-1) E_{ml_alpha, ml_beta}(poles[j] t^ml_alpha)``.

    ``moments`` holds ``sum_j residues[:, j] poles[j]^k`` for the ``k`` that
    feed the singular part of the kernel; ``None`` means compute them from
    poles and residues. ``swapped`` records that the components were
    relabeled to put the smaller order first; ``residues`` are stored in the
    caller's component order.
    """

    poles: np.ndarray
    residues: np.ndarray  # (2, N)
    ml_alpha: float
    ml_beta: float
    swapped: bool = False
    numerators: tuple = field(default=(), repr=False)
    denominator: Optional[ComplexPolynomial] = field(default=None, repr=False)
    moments: Optional[np.ndarray] = None

    @property
    def shift(self) -> int:
        """``r`` with ``ml_beta + r ml_alpha = 1``."""
        r = (1.0 - self.ml_beta) / self.ml_alpha
        k = round(r)
        if k < 0 or abs(r - k) > SHIFT_TOL * max(1.0, abs(r)):
            raise DomainError(f"(1 - ml_beta)/ml_alpha = {r} is not a nonnegative integer")
        return int(k)

    def singular_moments(self) -> np.ndarray:
        r = self.shift
        if self.moments is not None:
            return self.moments
        powers = self.poles[None, :] ** np.arange(r)[:, None]  # (r, N)
        return powers @ self.residues.T  # (r, 2)


def _prepare(system: MixedSystem):
    if system.m != 2 or system.m1 != 1:
        raise MethodInapplicable("closed form needs two scalar blocks (m1 = m2 = 1)")
    if not system.is_rational():
        alpha, beta = parse_order(system.alpha), parse_order(system.beta)
    else:
        alpha, beta = Fraction(system.alpha), Fraction(system.beta)
    A, y0 = system.A, system.y0
    swapped = alpha > beta
    if swapped:
        P = np.array([[0, 1], [1, 0]])
        A, y0 = P @ A @ P, y0[::-1]
        alpha, beta = beta, alpha
    (a1, a2), (b1, b2) = A
    DA = a1 * b2 - a2 * b1
    if DA == 0.0:
        raise ZeroRoot("Det(A) = 0 puts a root at the origin; not supported")
    return alpha, beta, (a1, a2, b1, b2), DA, y0, swapped


def _finish(num1, num2, Det, ml_alpha, ml_beta, swapped) -> SpectralForm:
    roots = find_roots(Det)
    pf = partial_fractions([num1, num2], Det, roots)
    res = pf.residues[::-1] if swapped else pf.residues
    nums = (num2, num1) if swapped else (num1, num2)
    # numerator degree <= N - 1 - shift makes the singular moments vanish identically
    shift = round((1 - ml_beta) / ml_alpha)
    return SpectralForm(
        pf.poles, res, float(ml_alpha), float(ml_beta), swapped, nums, Det,
        np.zeros((shift, 2), dtype=complex),
    )


def decompose(system: MixedSystem) -> SpectralForm:
    """Spectral form in ``z = s^(1/(nq))`` for ``alpha = m/n <= beta = p/q``.

    ``Det(z) = z^(mq+np) - a_1 z^np - b_2 z^mq + Det(A)``. Orders are
    relabeled internally when ``alpha > beta``.
    """
    alpha, beta, (a1, a2, b1, b2), DA, y0, swapped = _prepare(system)
    m, n = alpha.numerator, alpha.denominator
    p, q = beta.numerator, beta.denominator
    N, hi, lo = m * q + n * p, n * p, m * q
    Det = ComplexPolynomial.monomial_sum([(N, 1.0), (hi, -a1), (lo, -b2), (0, DA)])
    x1, x2 = y0
    num1 = ComplexPolynomial.monomial_sum([(hi, x1), (hi - lo, a2 * x2), (0, -b2 * x1)])
    num2 = ComplexPolynomial.monomial_sum([(hi, x2), (hi - lo, -a1 * x2), (0, b1 * x1)])
    ml_alpha = Fraction(1, n * q)
    return _finish(num1, num2, Det, ml_alpha, 1 - alpha + ml_alpha, swapped)


def decompose_commensurate(system: MixedSystem, K: int) -> SpectralForm:
    """Spectral form in ``w = s^alpha`` when ``beta = K alpha`` (``K+1`` poles)."""
    if int(K) != K or K < 1:
        raise DomainError(f"K must be a positive integer, got {K}")
    alpha, beta, (a1, a2, b1, b2), DA, y0, swapped = _prepare(system)
    if beta != K * alpha:
        raise MethodInapplicable(f"orders {alpha}, {beta} do not satisfy beta = {K} alpha")
    x1, x2 = y0
    Det = ComplexPolynomial.monomial_sum([(K + 1, 1.0), (K, -a1), (1, -b2), (0, DA)])
    num1 = ComplexPolynomial.monomial_sum([(K, x1), (K - 1, a2 * x2), (0, -b2 * x1)])
    num2 = ComplexPolynomial.monomial_sum([(K, x2), (K - 1, -a1 * x2), (0, b1 * x1)])
    return _finish(num1, num2, Det, alpha, 1, swapped)


def _kernel_terms(form: SpectralForm, t: float) -> np.ndarray:
    """Complex per-pole contributions (2, N), regular part only."""
    r = form.shift
    params = MLParams(form.ml_alpha, 1.0, 1)
    scale = t**form.ml_alpha
    vals = np.empty(len(form.poles), dtype=complex)
    lossy = False
    for j, lam in enumerate(form.poles):
        rep = ml(params, lam * scale)
        lossy |= rep.precision_warning
        vals[j] = lam**r * rep.value
    if lossy:
        warnings.warn(f"Mittag-Leffler evaluation lost precision at t={t}", PrecisionLossWarning, stacklevel=3)
    return form.residues * vals[None, :]


def eval_spectral(form: SpectralForm, t: float, *, tol: float = CONJUGACY_TOL) -> np.ndarray:
    """Real trajectory value at ``t``; raises ConjugacyViolation if the imaginary part is not negligible."""
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    terms = _kernel_terms(form, t)
    y = terms.sum(axis=1)
    mom = form.singular_moments()
    r = form.shift
    if r and np.any(mom != 0):
        if t == 0.0:
            raise DomainError("kernel is singular at t = 0 for this form")
        a = form.ml_alpha
        for k in range(r):
            e = a * (k - r)
            y = y + mom[k] * math.exp(e * math.log(t) - math.lgamma(e + 1.0))
    size = float(np.max(np.abs(y.real)))
    floor = float(np.abs(terms).sum()) * 1e-14
    if float(np.max(np.abs(y.imag))) > tol * max(size, floor):
        raise ConjugacyViolation(
            f"imaginary residual {np.max(np.abs(y.imag)):.3e} vs |y| = {size:.3e} at t={t}"
        )
    return y.real


def imaginary_residual(form: SpectralForm, t: float) -> float:
    """``max |Im y(t)| / max |Re y(t)|`` before projection."""
    y = _kernel_terms(form, t).sum(axis=1)
    return float(np.max(np.abs(y.imag)) / max(np.max(np.abs(y.real)), np.finfo(float).tiny))


def solve_spectral(form: SpectralForm, times) -> Trajectory:
    t = check_time_grid(times)
    states = np.array([eval_spectral(form, tk) for tk in t])
    return Trajectory(t, states, {"solver": "spectral", "poles": len(form.poles)})
