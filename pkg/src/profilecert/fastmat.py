"""Rigorous float64 interval linear algebra.

Entries are stored as inf/sup arrays.  Elementwise operations run in
round-to-nearest and are widened outward by one ulp via ``np.nextafter``,
which dominates the half-ulp nearest-rounding error.  Matrix products use
the midpoint-radius scheme: the midpoint product is done by BLAS and its
accumulated rounding error is absorbed with the standard gamma_k bound
plus an underflow slack, so containment holds without switching the FPU
rounding mode.

This is the fast path for the big validation matrices; scalar work that is
cancellation-sensitive stays in :mod:`profilecert.intervals`.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence

import numpy as np

from .intervals import Interval

_U = 2.0 ** -53          # unit roundoff, binary64
_ETA = 5e-308            # underflow slack per accumulated entry

_NEG = np.float64(-np.inf)
_POS = np.float64(np.inf)


def _dn(x):
    return np.nextafter(x, _NEG)


def _up(x):
    return np.nextafter(x, _POS)


class FArray:
    """Interval ndarray with float64 inf/sup bounds."""

    __slots__ = ("inf", "sup")

    def __init__(self, inf: np.ndarray, sup: np.ndarray):
        inf = np.asarray(inf, dtype=np.float64)
        sup = np.asarray(sup, dtype=np.float64)
        if inf.shape != sup.shape:
            raise ValueError("inf/sup shape mismatch")
        self.inf = inf
        self.sup = sup

    # -- constructors -------------------------------------------------

    @classmethod
    def from_point(cls, a) -> "FArray":
        a = np.asarray(a, dtype=np.float64)
        return cls(a.copy(), a.copy())

    @classmethod
    def zeros(cls, shape) -> "FArray":
        return cls(np.zeros(shape), np.zeros(shape))

    @classmethod
    def from_intervals(cls, ivs: Sequence[Interval], shape=None) -> "FArray":
        # float(mpfr) rounds to nearest: widen one ulp outward to be safe.
        inf = np.array([_dn(np.float64(float(v.lo))) for v in ivs])
        sup = np.array([_up(np.float64(float(v.hi))) for v in ivs])
        if shape is not None:
            inf = inf.reshape(shape)
            sup = sup.reshape(shape)
        return cls(inf, sup)

    def to_intervals(self, prec: int) -> List[Interval]:
        return [Interval.from_endpoints(lo, hi, prec)
                for lo, hi in zip(self.inf.ravel(), self.sup.ravel())]

    # -- queries ------------------------------------------------------

    @property
    def shape(self):
        return self.inf.shape

    def reshape(self, shape) -> "FArray":
        return FArray(self.inf.reshape(shape), self.sup.reshape(shape))

    def mid(self) -> np.ndarray:
        return self.inf + 0.5 * (self.sup - self.inf)

    def rad_from(self, mid: np.ndarray) -> np.ndarray:
        # one-ulp inflation covers the rounding of both subtractions
        return _up(np.maximum(_up(mid - self.inf), _up(self.sup - mid)))

    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.inf), np.abs(self.sup))

    def max_width(self) -> float:
        return float(np.max(self.sup - self.inf)) if self.inf.size else 0.0

    def contains(self, a) -> bool:
        a = np.asarray(a, dtype=np.float64)
        return bool(np.all(self.inf <= a) and np.all(a <= self.sup))

    def __getitem__(self, idx) -> "FArray":
        return FArray(np.asarray(self.inf[idx]), np.asarray(self.sup[idx]))

    # -- elementwise --------------------------------------------------

    def __neg__(self) -> "FArray":
        return FArray(-self.sup, -self.inf)

    def __abs__(self) -> "FArray":
        inf = np.where(self.inf > 0, self.inf,
                       np.where(self.sup < 0, -self.sup, 0.0))
        return FArray(inf, self.mag())

    def __add__(self, other) -> "FArray":
        other = _coerce(other, self.shape)
        return FArray(_dn(self.inf + other.inf), _up(self.sup + other.sup))

    def __sub__(self, other) -> "FArray":
        other = _coerce(other, self.shape)
        return FArray(_dn(self.inf - other.sup), _up(self.sup - other.inf))

    def __mul__(self, other) -> "FArray":
        other = _coerce(other, self.shape)
        p1, p2 = self.inf * other.inf, self.inf * other.sup
        p3, p4 = self.sup * other.inf, self.sup * other.sup
        inf = _dn(np.minimum(np.minimum(p1, p2), np.minimum(p3, p4)))
        sup = _up(np.maximum(np.maximum(p1, p2), np.maximum(p3, p4)))
        return FArray(inf, sup)

    def __rsub__(self, other) -> "FArray":
        return _coerce(other, self.shape) - self

    __radd__ = __add__
    __rmul__ = __mul__

    def div_pos(self, c: float) -> "FArray":
        """Divide by a positive float scalar."""
        if c <= 0:
            raise ValueError("div_pos requires c > 0")
        return FArray(_dn(self.inf / c), _up(self.sup / c))

    def scale_up(self, c: float) -> "FArray":
        """Multiply by a nonnegative float scalar."""
        if c < 0:
            raise ValueError("scale_up requires c >= 0")
        return FArray(_dn(self.inf * c), _up(self.sup * c))

    def sq(self) -> "FArray":
        m = self.mag()
        lo = np.where((self.inf <= 0) & (self.sup >= 0), 0.0,
                      np.minimum(np.abs(self.inf), np.abs(self.sup)))
        return FArray(_dn(lo * lo), _up(m * m))

    def sum(self) -> "FArray":
        n = max(self.inf.size, 1)
        g = _gamma(n)
        lo = float(np.sum(self.inf))
        hi = float(np.sum(self.sup))
        pad_lo = g * abs(lo) + n * _ETA
        pad_hi = g * abs(hi) + n * _ETA
        return FArray(np.float64(_dn(lo - pad_lo)), np.float64(_up(hi + pad_hi)))


def _coerce(x, shape) -> FArray:
    if isinstance(x, FArray):
        return x
    return FArray.from_point(np.broadcast_to(np.asarray(x, dtype=np.float64), shape))


def _gamma(k: int) -> float:
    t = (k + 2) * _U
    return t / (1.0 - t)


def fm_matmul(a: FArray, b: FArray) -> FArray:
    """Interval matrix product via midpoint-radius with a gamma_k error pad."""
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    k = b.shape[0]
    ma, mb = a.mid(), b.mid()
    ra, rb = a.rad_from(ma), b.rad_from(mb)
    mc = ma @ mb
    abs_prod = np.abs(ma) @ np.abs(mb)
    # radius: true spread + BLAS accumulation error on every float product
    r = ra @ (np.abs(mb) + rb) + np.abs(ma) @ rb
    r = r + _gamma(k) * (abs_prod + r) + (4 * k) * _ETA
    r = r * (1.0 + 8 * _U) + _ETA
    return FArray(_dn(mc - r), _up(mc + r))


def fm_matvec(a: FArray, v: FArray) -> FArray:
    out = fm_matmul(a, v.reshape((v.shape[0], 1) if v.inf.ndim == 1 else v.shape))
    return out.reshape((a.shape[0],)) if v.inf.ndim == 1 else out


def fm_dot(u: FArray, v: FArray) -> FArray:
    return (u * v).sum()


def fm_vec_norm2_sq(v: FArray) -> FArray:
    return v.sq().sum()


def fm_norm1(a: FArray) -> float:
    col = np.sum(a.mag(), axis=0)
    n = a.shape[0]
    return _up(float(np.max(col)) * (1.0 + _gamma(n))) if col.size else 0.0


def fm_norminf(a: FArray) -> float:
    row = np.sum(a.mag(), axis=1)
    n = a.shape[1] if a.inf.ndim > 1 else 1
    return _up(float(np.max(row)) * (1.0 + _gamma(n))) if row.size else 0.0


def fm_two_norm_bound(a: FArray) -> float:
    """Upper bound for the spectral norm: √(‖A‖₁ ‖A‖∞)."""
    import math

    return _up(np.float64(math.sqrt(_up(np.float64(fm_norm1(a)) *
                                        np.float64(fm_norminf(a))))))


def fm_sqrt_upper(x: float) -> float:
    """Rigorous upper bound of √x for x ≥ 0."""
    import math

    if x < 0:
        raise ValueError("negative argument")
    return float(_up(np.float64(math.sqrt(x))))
