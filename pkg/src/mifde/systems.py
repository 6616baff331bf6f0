"""Problem containers shared by the solvers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from mifde.errors import DimensionMismatch, DomainError, InexactOrderWarning

Order = Union[Fraction, float]

DENOMINATOR_CAP = 1000


def parse_order(value, *, cap: int = DENOMINATOR_CAP) -> Fraction:
    """Exact rational order from ``"m/n"``, a decimal string, an int or a float.

    Decimals go through continued-fraction approximation with denominator
    ``<= cap``; a warning is issued when that changes the value.
    """
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, str) and "/" in value:
        num, den = value.split("/", 1)
        try:
            frac = Fraction(int(num.strip()), int(den.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse order {value!r}") from exc
    else:
        try:
            exact = Fraction(value) if isinstance(value, str) else Fraction(float(value))
        except (ValueError, TypeError) as exc:
            raise DomainError(f"cannot parse order {value!r}") from exc
        frac = exact.limit_denominator(cap)
        target = float(value) if not isinstance(value, str) else exact
        if frac != target and float(frac) != float(target):
            warnings.warn(
                f"order {value!r} approximated by {frac} (denominator cap {cap})",
                InexactOrderWarning,
                stacklevel=2,
            )
    if not (0 < frac <= 1):
        raise DomainError(f"order {frac} outside (0, 1]")
    return frac


def _check_order(o) -> float:
    v = float(o)
    if not (0.0 < v <= 1.0) or math.isnan(v):
        raise DomainError(f"order {o} outside (0, 1]")
    return v


@dataclass
class MixedSystem:
    """Two-block system D^alpha y_1 = A_1 y_1 + A_2 y_2, D^beta y_2 = B_1 y_1 + B_2 y_2.

    ``m1`` is the size of the first block; the second block takes the rest
    of the state (it may be empty).
    """

    A: np.ndarray
    alpha: Order
    beta: Order
    y0: np.ndarray
    m1: int = 1

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        m = self.A.shape[0]
        if self.A.shape != (m, m):
            raise DimensionMismatch(f"A must be square, got {self.A.shape}")
        if self.y0.shape != (m,):
            raise DimensionMismatch(f"y0 has length {self.y0.size}, A is {m}x{m}")
        if not (0 < self.m1 <= m):
            raise DimensionMismatch(f"block size m1={self.m1} incompatible with m={m}")
        _check_order(self.alpha)
        _check_order(self.beta)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def m2(self) -> int:
        return self.m - self.m1

    @property
    def blocks(self):
        """(A_1, A_2, B_1, B_2)."""
        k = self.m1
        return self.A[:k, :k], self.A[:k, k:], self.A[k:, :k], self.A[k:, k:]

    @property
    def component_orders(self) -> list:
        return [self.alpha] * self.m1 + [self.beta] * self.m2

    def is_rational(self) -> bool:
        return isinstance(self.alpha, Fraction) and isinstance(self.beta, Fraction)

    def with_y0(self, y0) -> "MixedSystem":
        return MixedSystem(self.A, self.alpha, self.beta, y0, self.m1)

    def to_multi_index(self, forcing=None) -> "MultiIndexSystem":
        return MultiIndexSystem(self.A, [float(o) for o in self.component_orders], self.y0, forcing)


@dataclass
class MultiIndexSystem:
    """General system D^{alpha_i} y_i = (A y)_i + F_i(t), one order per scalar component."""

    A: np.ndarray
    orders: Sequence[float]
    y0: np.ndarray
    forcing: Optional[Callable[[float], np.ndarray]] = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        self.orders = np.array([_check_order(o) for o in self.orders], dtype=float)
        m = self.A.shape[0]
        if self.A.shape != (m, m):
            raise DimensionMismatch(f"A must be square, got {self.A.shape}")
        if self.orders.shape != (m,) or self.y0.shape != (m,):
            raise DimensionMismatch(
                f"need {m} orders and initial values, got {self.orders.size} and {self.y0.size}"
            )


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states)
        if self.states.ndim != 2 or self.states.shape[0] != self.times.shape[0]:
            raise DimensionMismatch(
                f"states shape {self.states.shape} does not match {self.times.size} times"
            )


def check_time_grid(times) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise DomainError("times must be nonnegative and strictly increasing")
    return t
