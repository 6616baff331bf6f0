"""Power/Gamma series solution of two-block mixed-order linear systems.

The homogeneous solution is ``y(t) = P(t) y0`` with

    P(t) = sum_n sum_{k=0..n} C[n][k] * t^e / Gamma(1 + e),   e = (n-k) alpha + k beta,

where ``C[n][k]`` is column block ``k`` of the level-``n`` coefficient matrix.
Top rows of ``C[n][k]`` are the first-block coefficients, bottom rows the
second-block ones. Each level comes from the previous one by a single left
multiplication with ``A`` (see :meth:`CoefficientPyramid.extend`).
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy.special import gammaln

from mifde.errors import DomainError, NoConvergence, PrecisionLossWarning, QuadratureUnderResolved
from mifde.systems import MixedSystem, Trajectory, check_time_grid

MAX_LEVELS = 300
DEFAULT_TOL = 1e-15
PRECISION_LIMIT = 1e12


class CoefficientPyramid:
    """Levels 0..depth of the coefficient recursion for a fixed ``A`` and block split.

    ``levels[n]`` has shape ``(n + 1, m, m)``; ``levels[n][k]`` is column block
    ``k`` of ``L_n``. For ``n >= 1`` the first-block rows of block ``n`` and the
    second-block rows of block 0 are structurally zero.

    Not safe to extend from several threads at once; read-only use is.
    """

    def __init__(self, A, m1: int):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.m1 = m1
        self.levels: list[np.ndarray] = [np.eye(self.m)[None, :, :]]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def extend(self, depth: int) -> None:
        m1 = self.m1
        while self.depth < depth:
            prev = self.levels[-1]
            n = prev.shape[0]  # new level index
            prod = np.einsum("ij,kjl->kil", self.A, prev)  # A L_{n-1}, block by block
            new = np.zeros((n + 1, self.m, self.m))
            new[:n, :m1] = prod[:, :m1]
            new[1:, m1:] = prod[:, m1:]
            self.levels.append(new)

    def alpha_blocks(self, n: int) -> np.ndarray:
        """First-block coefficients alpha_{n,1..n}, shape (n, m1, m)."""
        return self.levels[n][:n, : self.m1]

    def beta_blocks(self, n: int) -> np.ndarray:
        """Second-block coefficients beta_{n,1..n}, shape (n, m2, m)."""
        return self.levels[n][1:, self.m1 :]

    def L(self, n: int) -> np.ndarray:
        """``L_n`` as an ``m x m(n+1)`` matrix."""
        return np.concatenate(list(self.levels[n]), axis=1)


def build_pyramid(system: MixedSystem, depth: int) -> CoefficientPyramid:
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")
    pyr = CoefficientPyramid(system.A, system.m1)
    pyr.extend(depth)
    return pyr


def _exponents(n: int, alpha: float, beta: float) -> np.ndarray:
    k = np.arange(n + 1)
    return (n - k) * alpha + k * beta


def _level_weights(n: int, alpha: float, beta: float, log_t: float) -> np.ndarray:
    e = _exponents(n, alpha, beta)
    return np.exp(e * log_t - gammaln(1.0 + e))


def eval_P(
    pyramid: CoefficientPyramid,
    system: MixedSystem,
    t: float,
    tol: float = DEFAULT_TOL,
    max_levels: int = MAX_LEVELS,
) -> np.ndarray:
    """Fundamental matrix ``P(t)`` with ``P(0) = I``.

    Stops after three consecutive levels each below ``tol * ||P||_max``,
    extending ``pyramid`` as needed up to ``max_levels``.
    """
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    alpha, beta = float(system.alpha), float(system.beta)
    P = np.eye(pyramid.m)
    if t == 0.0:
        return P
    log_t = math.log(t)
    small = 0
    biggest = 0.0
    for n in range(1, max_levels + 1):
        if pyramid.depth < n:
            pyramid.extend(min(max_levels, max(n, 2 * pyramid.depth)))
        contrib = np.tensordot(_level_weights(n, alpha, beta, log_t), pyramid.levels[n], axes=1)
        P += contrib
        size = np.abs(contrib).max()
        biggest = max(biggest, size)
        if size <= tol * np.abs(P).max():
            small += 1
            if small == 3:
                if biggest > PRECISION_LIMIT * np.abs(P).max():
                    warnings.warn(
                        f"series at t={t} cancels: largest level {biggest:.2e} vs result "
                        f"{np.abs(P).max():.2e}",
                        PrecisionLossWarning,
                        stacklevel=2,
                    )
                return P
        else:
            small = 0
    raise NoConvergence(f"series for P(t={t}) not converged after {max_levels} levels")


def solve_series(
    system: MixedSystem, times, tol: float = DEFAULT_TOL, pyramid=None, max_levels: int = MAX_LEVELS
) -> Trajectory:
    """``y(t_k) = P(t_k) y0`` on the given grid.

    For initial data given at ``t0`` rather than 0, pass ``times - t0``.
    """
    t = check_time_grid(times)
    pyr = pyramid if pyramid is not None else CoefficientPyramid(system.A, system.m1)
    states = np.array([eval_P(pyr, system, tk, tol, max_levels) @ system.y0 for tk in t])
    return Trajectory(t, states, {"solver": "series", "depth": pyr.depth, "tol": tol})


def product_weights(gamma: float, n_sub: int, t: float) -> np.ndarray:
    """Weights ``w`` with ``I^gamma f(t) ~ w @ f(s_j)``, ``s_j = j t / n_sub``.

    Exact for ``f`` piecewise linear on the grid (fractional trapezoid rule).
    """
    if gamma <= 0:
        raise DomainError(f"integration order must be positive, got {gamma}")
    N = n_sub
    g1 = gamma + 1.0
    u = (N - np.arange(N + 1)) / N  # (t - s_j) / t
    d = 1.0 / N
    w = np.empty(N + 1)
    w[0] = (1.0 - d) ** g1 - (1.0 - g1 * d)
    uj = u[1:N]
    w[1:N] = (uj + d) ** g1 - 2.0 * uj**g1 + np.clip(uj - d, 0.0, None) ** g1
    w[N] = d**g1
    # h^gamma (N-j)^{g1} / Gamma(gamma+2) == t^gamma * N * u^{g1} / Gamma(gamma+2)
    return w * N * math.exp(gamma * math.log(t) - math.lgamma(gamma + 2.0)) if t > 0 else 0.0 * w


def _forced_part(pyr, system, F_samples, t, n_sub, tol, max_levels):
    m1 = system.m1
    alpha, beta = float(system.alpha), float(system.beta)
    F1, F2 = F_samples[:, :m1], F_samples[:, m1:]
    y = np.zeros(system.m)
    small = 0
    for n in range(0, max_levels + 1):
        if pyr.depth < n:
            pyr.extend(min(max_levels, max(n, 2 * pyr.depth)))
        contrib = np.zeros(system.m)
        for k, e in enumerate(_exponents(n, alpha, beta)):
            C = pyr.levels[n][k]
            contrib += C[:, :m1] @ (product_weights(e + alpha, n_sub, t) @ F1)
            if F2.shape[1]:
                contrib += C[:, m1:] @ (product_weights(e + beta, n_sub, t) @ F2)
        y += contrib
        if np.abs(contrib).max() <= tol * np.abs(y).max():
            small += 1
            if small == 3:
                return y
        else:
            small = 0
    raise NoConvergence(f"forced series at t={t} not converged after {max_levels} levels")


def solve_series_forced(
    system: MixedSystem,
    forcing: Callable[[float], np.ndarray],
    times,
    substeps: int = 512,
    tol: float = 1e-8,
    max_levels: int = MAX_LEVELS,
) -> Trajectory:
    """Solution with a time-dependent source ``F(t)``.

    ``y(t) = P(t) y0 + int_0^t G(t - s) F(s) ds`` where ``G`` is ``P`` with the
    first-block columns carried to exponent ``e + alpha - 1`` over
    ``Gamma(e + alpha)`` (second block likewise with ``beta``). Term by term
    this is a sum of fractional integrals ``I^(e+alpha) F_1`` and
    ``I^(e+beta) F_2``; each is done by product integration against the
    piecewise-linear interpolant of ``F`` on ``substeps`` intervals.

    A :class:`QuadratureUnderResolved` warning is issued when doubling
    ``substeps`` moves the result by more than ``10 * tol``.
    """
    if substeps < 8:
        raise DomainError(f"substeps must be >= 8, got {substeps}")
    t = check_time_grid(times)
    pyr = CoefficientPyramid(system.A, system.m1)
    homog = solve_series(system, t, tol=min(tol, DEFAULT_TOL * 10), pyramid=pyr)

    def sample(tk, n):
        s = np.linspace(0.0, tk, n + 1)
        return np.array([np.atleast_1d(np.asarray(forcing(si), dtype=float)) for si in s])

    states = homog.states.copy()
    worst = 0.0
    for i, tk in enumerate(t):
        if tk == 0.0:
            continue
        coarse = _forced_part(pyr, system, sample(tk, substeps), tk, substeps, tol, max_levels)
        fine = _forced_part(pyr, system, sample(tk, 2 * substeps), tk, 2 * substeps, tol, max_levels)
        worst = max(worst, float(np.abs(fine - coarse).max()))
        states[i] += coarse
    if worst > 10 * tol:
        warnings.warn(
            f"doubling substeps changed the forced term by {worst:.2e} (> 10*tol)",
            QuadratureUnderResolved,
            stacklevel=2,
        )
    return Trajectory(t, states, {"solver": "series_forced", "substeps": substeps, "tol": tol})
