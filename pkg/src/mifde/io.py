"""JSON system files and CSV output."""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from mifde.errors import DimensionMismatch, DomainError, MethodInapplicable
from mifde.systems import MixedSystem, MultiIndexSystem, parse_order

CSV_FORMAT = "%.17g"


@dataclass
class SystemFile:
    """One JSON document: per-component orders (strings), ``A`` row-major, ``y0``, and solver settings."""

    orders: list[str]
    A: list[list[float]]
    y0: list[float]
    t_end: float
    dt: Optional[float] = None
    depth: Optional[int] = None
    tol: Optional[float] = None

    def __post_init__(self):
        self.orders = [str(o) for o in self.orders]
        m = len(self.y0)
        if m == 0:
            raise DimensionMismatch("y0 is empty")
        if len(self.orders) != m:
            raise DimensionMismatch(f"{len(self.orders)} orders for {m} components")
        if len(self.A) != m or any(len(row) != m for row in self.A):
            raise DimensionMismatch(f"A must be {m}x{m}")
        if not self.t_end > 0:
            raise DomainError(f"t_end must be positive, got {self.t_end}")
        if self.dt is not None and not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        for o in self.orders:
            parse_order(o)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemFile":
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise DomainError(f"unknown fields in system file: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise DomainError(f"bad system file: {exc}") from exc

    @classmethod
    def read(cls, path) -> "SystemFile":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data)

    def write(self, path) -> None:
        data = {k: v for k, v in asdict(self).items() if v is not None}
        Path(path).write_text(json.dumps(data, indent=2) + "\n")

    def fractions(self) -> list[Fraction]:
        return [parse_order(o) for o in self.orders]

    def multi_index(self, forcing=None) -> MultiIndexSystem:
        return MultiIndexSystem(self.A, [float(f) for f in self.fractions()], self.y0, forcing)

    def mixed(self) -> MixedSystem:
        """Two-block view; components must be grouped as a run of one order then a run of another."""
        fr = self.fractions()
        m1 = 1
        while m1 < len(fr) and fr[m1] == fr[0]:
            m1 += 1
        if any(f != fr[-1] for f in fr[m1:]):
            raise MethodInapplicable(f"orders {self.orders} do not form two contiguous blocks")
        beta = fr[m1] if m1 < len(fr) else fr[0]
        return MixedSystem(self.A, fr[0], beta, self.y0, m1)


def write_csv(path, header: Sequence[str], rows) -> None:
    """Rows of floats at 17 significant digits; ``path`` of None or '-' means stdout."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([CSV_FORMAT % v for v in r])
    finally:
        if out is not sys.stdout:
            out.close()


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(v) for v in row] for row in r])
    return header, data
