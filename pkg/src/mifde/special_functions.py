"""Mittag-Leffler functions by direct power series.

Terms are assembled in log space, ``exp(k log|z| + log((g)_k / k!) - log|Gamma(a k + b)|)``
times the unit phase ``(z/|z|)**k``, and accumulated with Neumaier
compensated summation. This is adequate for moderate ``|z|``; there is no
asymptotic or contour-integral branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import binom, gammaln, gammasgn, rgamma

from mifde.errors import DomainError, NoConvergence, OverflowDomain

SERIES_BOUND = 50.0
MAX_TERMS = 10_000
DEFAULT_TOL = 1e-16
CANCELLATION_LIMIT = 1e12
MAX_MATRIX_DIM = 64

_LOG_MAX = math.log(np.finfo(float).max)
_EPS = float(np.finfo(float).eps)
_DIRECT_LOG_LIMIT = 600.0
_GAMMA_DIRECT_MAX = 170.0


@dataclass(frozen=True)
class MLParams:
    """Parameters of E^gamma_{alpha,beta}: sum (gamma)_k z^k / (Gamma(alpha k + beta) k!)."""

    alpha: float
    beta: float = 1.0
    gamma: int = 1

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise DomainError(f"beta must be finite, got {self.beta}")
        if int(self.gamma) != self.gamma or self.gamma < 1:
            raise DomainError(f"gamma must be a positive integer, got {self.gamma}")


@dataclass(frozen=True)
class EvalReport:
    value: complex
    terms_used: int
    max_term_magnitude: float
    error_estimate: float = 0.0

    @property
    def precision_warning(self) -> bool:
        """True when cancellation has eaten the result.

        Either the largest term exceeds ``|value|`` by more than 1e12, or the
        rounding estimate (terms carry relative error ~ eps * |log term|)
        is as large as the value itself.
        """
        mag = abs(self.value)
        if mag == 0.0:
            return self.max_term_magnitude > 0.0
        return self.max_term_magnitude / mag > CANCELLATION_LIMIT or self.error_estimate >= mag


def _log_coeff(k: int, params: MLParams, log_r: float) -> tuple[float, float]:
    # (log magnitude, sign) of (g)_k r^k / (k! Gamma(a k + b))
    arg = params.alpha * k + params.beta
    sgn = float(gammasgn(arg))
    if sgn == 0.0 or not math.isfinite(gammaln(arg)):
        return -math.inf, 0.0
    log_poch = 0.0
    if params.gamma != 1:
        log_poch = float(gammaln(params.gamma + k) - gammaln(params.gamma) - gammaln(k + 1))
    return k * log_r + log_poch - float(gammaln(arg)), sgn


def _coeff(k: int, params: MLParams, r: float, log_r: float) -> tuple[float, float, float]:
    """(magnitude, sign) of the k-th term, plus its log magnitude for the overflow check.

    Directly as ``r^k * rgamma(a k + b) * binom(g + k - 1, k)`` when that
    cannot overflow (relative error a few ulp); otherwise through log space,
    whose relative error grows like ``eps * |log term|``.
    """
    logm, sgn = _log_coeff(k, params, log_r)
    if sgn == 0.0:
        return 0.0, 0.0, logm
    if logm > _LOG_MAX:
        return math.inf, sgn, logm
    arg = params.alpha * k + params.beta
    if abs(logm) < _DIRECT_LOG_LIMIT and arg < _GAMMA_DIRECT_MAX and abs(k * log_r) < _DIRECT_LOG_LIMIT:
        mag = r**k * float(rgamma(arg))
        if params.gamma != 1:
            mag *= float(binom(params.gamma + k - 1, k))
        return abs(mag), sgn, logm
    return math.exp(logm), sgn, logm


def _may_stop(k: int, params: MLParams) -> bool:
    # Gamma is non-monotone below argument ~1.46; don't trust small terms there
    return params.alpha * k + params.beta > 2.0


def ml(
    params: MLParams,
    z: complex,
    *,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
    bound: float = SERIES_BOUND,
) -> EvalReport:
    """Evaluate the three-parameter Mittag-Leffler function at a scalar.

    Summation stops once three consecutive terms fall below
    ``tol * |partial sum|``.

    Raises:
        DomainError: ``|z|`` exceeds ``bound``.
        NoConvergence: ``max_terms`` reached.
        OverflowDomain: a term does not fit in double precision.
    """
    z = complex(z)
    r = abs(z)
    if not math.isfinite(r) or r > bound:
        raise DomainError(f"|z| = {r} exceeds the series bound {bound}")

    if r == 0.0:
        log0, sgn0 = _log_coeff(0, params, 0.0)
        v = sgn0 * math.exp(log0) if sgn0 else 0.0
        return EvalReport(complex(v), 1, abs(v))

    log_r = math.log(r)
    unit = z / r
    phase = 1.0 + 0.0j
    s = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    max_mag = 0.0
    err = 0.0
    small = 0
    for k in range(max_terms):
        mag, sgn, logm = _coeff(k, params, r, log_r)
        if logm > _LOG_MAX:
            raise OverflowDomain(f"term {k} overflows (log magnitude {logm:.1f})")
        term = sgn * mag * phase
        phase *= unit
        max_mag = max(max_mag, mag)
        if mag:
            err += _EPS * mag * (abs(logm) + k + 1)

        # Neumaier, componentwise
        t_re, t_im = s.real + term.real, s.imag + term.imag
        c_re = (s.real - t_re) + term.real if abs(s.real) >= abs(term.real) else (term.real - t_re) + s.real
        c_im = (s.imag - t_im) + term.imag if abs(s.imag) >= abs(term.imag) else (term.imag - t_im) + s.imag
        if not (math.isfinite(t_re) and math.isfinite(t_im)):
            raise OverflowDomain(f"partial sum overflows at term {k}")
        s = complex(t_re, t_im)
        comp += complex(c_re, c_im)

        if mag <= tol * abs(s + comp) and _may_stop(k, params):
            small += 1
            if small == 3:
                return EvalReport(s + comp, k + 1, max_mag, err)
        else:
            small = 0
    raise NoConvergence(f"Mittag-Leffler series did not converge in {max_terms} terms (z={z})")


def ml_value(alpha: float, beta: float, z: complex, gamma: int = 1, **kw) -> complex:
    """Shorthand returning only the value of :func:`ml`."""
    return ml(MLParams(alpha, beta, gamma), z, **kw).value


def ml_matrix(
    alpha: float,
    M,
    *,
    tol: float = DEFAULT_TOL,
    max_terms: int = MAX_TERMS,
    max_dim: int = MAX_MATRIX_DIM,
) -> np.ndarray:
    """Matrix Mittag-Leffler function E_alpha(M) = sum_j M^j / Gamma(1 + j alpha).

    The power is carried as ``(M/rho)^j`` with ``rho = ||M||_1`` so the
    running product stays bounded; the scalar factor ``rho^j / Gamma`` is
    formed in log space, mirroring :func:`ml`.
    """
    params = MLParams(alpha, 1.0, 1)
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[0]
    if M.shape != (n, n):
        raise DomainError(f"matrix must be square, got shape {M.shape}")
    if n > max_dim:
        raise DomainError(f"dimension {n} exceeds cap {max_dim}")

    eye = np.eye(n, dtype=complex)
    rho = float(np.abs(M).sum(axis=0).max()) if n else 0.0
    if rho == 0.0:
        return eye

    log_r = math.log(rho)
    # componentwise: numpy's complex/real division is not exact (x/x != 1)
    unit = M.real / rho + 1j * (M.imag / rho)
    power = eye.copy()
    s = np.zeros_like(eye)
    comp = np.zeros_like(eye)
    small = 0
    for k in range(max_terms):
        mag, sgn, logm = _coeff(k, params, rho, log_r)
        if logm > _LOG_MAX:
            raise OverflowDomain(f"term {k} overflows (log magnitude {logm:.1f})")
        term = (sgn * mag) * power
        power = power @ unit

        with np.errstate(over="ignore", invalid="ignore"):
            t = s + term
        if not np.all(np.isfinite(t)):
            raise OverflowDomain(f"partial sum overflows at term {k}")
        big = np.abs(s) >= np.abs(term)
        comp += np.where(big, (s - t) + term, (term - t) + s)
        s = t

        if np.abs(term).max() <= tol * np.abs(s + comp).max() and _may_stop(k, params):
            small += 1
            if small == 3:
                return s + comp
        else:
            small = 0
    raise NoConvergence(f"matrix Mittag-Leffler series did not converge in {max_terms} terms")
