"""L1 finite-difference stepping for mixed-order linear systems.

Discrete Caputo derivative on a uniform grid of spacing ``h``:

    D^a y_n ~ c_a * sum_{j=1..n} w_j (y_{n-j+1} - y_{n-j}),
    w_j = j^(1-a) - (j-1)^(1-a),   c_a = 1 / (Gamma(2-a) h^a).

At ``a = 1`` only ``w_1 = 1`` survives and the stepper is backward Euler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal
from numba import njit

from mifde.errors import DomainError, NonUniformGrid, SingularMatrix
from mifde.systems import MultiIndexSystem, Trajectory

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class L1Weights:
    order: float
    h: float
    w: np.ndarray  # w[0] = 0 (padding), w[j] for j >= 1

    @property
    def scale(self) -> float:
        return 1.0 / (math.gamma(2.0 - self.order) * self.h**self.order)


def l1_weights(order: float, h: float, n: int) -> L1Weights:
    if not (0.0 < order <= 1.0):
        raise DomainError(f"order {order} outside (0, 1]")
    if h <= 0:
        raise DomainError(f"step must be positive, got {h}")
    w = np.zeros(n + 1)
    if n >= 1:
        if order == 1.0:
            w[1] = 1.0
        else:
            p = np.arange(n + 1, dtype=float) ** (1.0 - order)
            w[1:] = np.diff(p)
    return L1Weights(order, h, w)


LEAF = 256


@njit(cache=True)
def _lu_solve_inplace(lu, piv, b):
    m = b.shape[0]
    for i in range(m):
        p = piv[i]
        if p != i:
            tmp = b[i]
            b[i] = b[p]
            b[p] = tmp
    for i in range(m):
        for j in range(i):
            b[i] -= lu[i, j] * b[j]
    for i in range(m - 1, -1, -1):
        for j in range(i + 1, m):
            b[i] -= lu[i, j] * b[j]
        b[i] /= lu[i, i]


@njit(cache=True)
def _advance(y, dy, W, c, acc, lu, piv, F, lo, hi):
    # steps lo..hi-1; acc[n] already holds sum_{k<lo} W[n-k+1] dy[k]
    m = y.shape[1]
    rhs = np.empty(m)
    for n in range(lo, hi):
        for i in range(m):
            s = acc[n, i]
            for k in range(lo, n):
                s += W[n - k + 1, i] * dy[k, i]
            rhs[i] = c[i] * (y[n - 1, i] - s) + F[n, i]
        _lu_solve_inplace(lu, piv, rhs)
        for i in range(m):
            y[n, i] = rhs[i]
            dy[n, i] = rhs[i] - y[n - 1, i]


def step_solve(system: MultiIndexSystem, h: float, n_steps: int) -> Trajectory:
    """Implicit L1 solve on ``t_n = n h``, ``n = 0..n_steps``.

    Each step solves ``(C - A) y_n = C y_{n-1} - history + F(t_n)`` with
    ``C = diag(c_i)``; the matrix is LU-factored once.

    The full history is kept (no memory truncation). The history sums are
    an online convolution, evaluated by divide and conquer: once the first
    half of a range is solved, its effect on the second half is added with
    one FFT convolution. Cost is O(N log^2 N) instead of O(N^2).
    """
    if h <= 0:
        raise DomainError(f"step must be positive, got {h}")
    if n_steps < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps}")
    m = system.A.shape[0]
    N = n_steps
    orders = system.orders

    W = np.empty((N + 2, m))
    c = np.empty(m)
    for a in np.unique(orders):
        wts = l1_weights(float(a), h, N + 1)
        idx = orders == a
        W[:, idx] = wts.w[:, None]
        c[idx] = wts.scale

    K = np.diag(c) - system.A
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond > 1.0 / _EPS:
        raise SingularMatrix(f"C - A is singular to working precision (cond={cond:.3e})", cond)
    lu, piv = scipy.linalg.lu_factor(K)
    piv = piv.astype(np.int64)

    times = h * np.arange(N + 1)
    F = np.zeros((N + 1, m))
    if system.forcing is not None:
        for n in range(1, N + 1):
            F[n] = np.asarray(system.forcing(times[n]), dtype=float)

    y = np.zeros((N + 1, m))
    y[0] = system.y0
    dy = np.zeros((N + 1, m))  # dy[k] = y_k - y_{k-1}
    acc = np.zeros((N + 1, m))

    def solve(lo, hi):
        if hi - lo <= LEAF:
            _advance(y, dy, W, c, acc, lu, piv, F, lo, hi)
            return
        mid = (lo + hi) // 2
        solve(lo, mid)
        # n in [mid, hi), k in [lo, mid): W[n-k+1] dy[k]
        conv = scipy.signal.fftconvolve(W[: hi - lo + 1], dy[lo:mid], axes=0)
        acc[mid:hi] += conv[mid - lo + 1 : hi - lo + 1]
        solve(mid, hi)

    solve(1, N + 1)
    return Trajectory(times, y, {"solver": "l1", "h": h, "n_steps": n_steps})


def _uniform_step(times: np.ndarray, h: float | None) -> float:
    steps = np.diff(times)
    if steps.size == 0:
        raise DomainError("need at least two samples")
    step = float(steps.mean()) if h is None else float(h)
    if np.max(np.abs(steps - step)) > 1e-9 * max(step, 1.0):
        raise NonUniformGrid("samples are not on a uniform grid with the given spacing")
    return step


def caputo_apply(samples: Trajectory, order: float, h: float | None = None) -> np.ndarray:
    """L1 Caputo derivative of sampled data at ``t_1 .. t_N`` (row ``n-1`` is node ``n``)."""
    step = _uniform_step(samples.times, h)
    y = np.atleast_2d(samples.states.T).T
    N = y.shape[0] - 1
    W = l1_weights(order, step, N)
    dy = np.diff(y, axis=0)  # dy[k-1] = y_k - y_{k-1}
    out = np.column_stack([np.convolve(W.w[1:], dy[:, i])[:N] for i in range(y.shape[1])])
    return W.scale * out


def fractional_integral(values, order: float, h: float) -> np.ndarray:
    """Product-rectangle Riemann-Liouville integral of right-endpoint samples.

    ``values[n-1]`` is ``f(t_n)``; returns ``I^order f`` at ``t_1 .. t_N``.
    """
    f = np.asarray(values, dtype=float)
    f2 = f.reshape(f.shape[0], -1)
    N = f2.shape[0]
    k = np.arange(N + 1, dtype=float) ** order
    b = np.diff(k) * h**order / math.gamma(order + 1.0)  # b[j] pairs with f_{n-j}
    out = np.column_stack([np.convolve(b, f2[:, i])[:N] for i in range(f2.shape[1])])
    return out.reshape(f.shape)
