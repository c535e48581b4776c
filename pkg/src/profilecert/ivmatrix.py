"""Dense interval matrices at multi-precision, and the norm bounds the
validator needs.

These are used for modest sizes (quadrature verification, small oracles).
Large validated linear algebra goes through :mod:`profilecert.fastmat`.
"""

from __future__ import annotations

from typing import List, Sequence

from .intervals import Interval, iv_sum


class IntervalMatrix:
    """Rectangular dense matrix of :class:`Interval` entries."""

    __slots__ = ("rows", "cols", "entries", "prec")

    def __init__(self, entries: Sequence[Sequence[Interval]], prec: int):
        self.entries: List[List[Interval]] = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        self.prec = prec
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged interval matrix")

    @classmethod
    def zeros(cls, rows: int, cols: int, prec: int) -> "IntervalMatrix":
        z = Interval.zero(prec)
        return cls([[z] * cols for _ in range(rows)], prec)

    @classmethod
    def identity(cls, n: int, prec: int) -> "IntervalMatrix":
        m = cls.zeros(n, n, prec)
        one = Interval.one(prec)
        for i in range(n):
            m.entries[i][i] = one
        return m

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def transpose(self) -> "IntervalMatrix":
        return IntervalMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.prec)


def iv_matmul(a: IntervalMatrix, b: IntervalMatrix) -> IntervalMatrix:
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    prec = max(a.prec, b.prec)
    out = IntervalMatrix.zeros(a.rows, b.cols, prec)
    bt = b.transpose()
    for i in range(a.rows):
        arow = a.entries[i]
        for j in range(b.cols):
            bcol = bt.entries[j]
            out.entries[i][j] = iv_sum(
                (arow[k] * bcol[k] for k in range(a.cols)), prec)
    return out


def iv_matvec(a: IntervalMatrix, v: Sequence[Interval]) -> List[Interval]:
    if a.cols != len(v):
        raise ValueError("shape mismatch in matvec")
    return [iv_sum((a.entries[i][k] * v[k] for k in range(a.cols)), a.prec)
            for i in range(a.rows)]


def iv_vec_norm2(v: Sequence[Interval], prec: int) -> Interval:
    return iv_sum((x.sq() for x in v), prec).sqrt()


def iv_two_norm_bound(m: IntervalMatrix) -> Interval:
    """Upper bound of the spectral norm via ‖M‖₂ ≤ √(‖M‖₁ ‖M‖∞)."""
    prec = m.prec
    zero = Interval.zero(prec)
    col_sums = [zero] * m.cols
    row_max = zero
    for i in range(m.rows):
        row_sum = zero
        for j in range(m.cols):
            a = abs(m.entries[i][j])
            row_sum = row_sum + a
            col_sums[j] = col_sums[j] + a
        if row_sum.hi > row_max.hi:
            row_max = row_sum
    col_max = zero
    for c in col_sums:
        if c.hi > col_max.hi:
            col_max = c
    bound = (Interval.from_endpoints(col_max.hi, col_max.hi, prec)
             * Interval.from_endpoints(row_max.hi, row_max.hi, prec)).sqrt()
    return Interval.from_endpoints(0, bound.hi, prec)
