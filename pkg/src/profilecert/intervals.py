"""Directed-rounding interval arithmetic on multi-precision floats.

Every endpoint is an ``mpfr`` at a stated precision.  Lower endpoints are
always computed with rounding toward −∞ and upper endpoints with rounding
toward +∞, through per-precision gmpy2 context objects, so each operation
returns a guaranteed enclosure of the exact real result.  No global
rounding-mode state is mutated: the context objects are immutable and the
operations are pure, which keeps concurrent evaluation safe.

Endpoints may be ±∞ only as an overflow escape; ``Interval.overflowed``
reports it and callers treat such results as "bound unavailable" rather
than aborting.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Union

import gmpy2
from gmpy2 import mpfr

Scalar = Union[int, Fraction, float, "Interval"]


class IntervalDomainError(ValueError):
    """Operand lies (partly) outside the mathematical domain of an operation."""


@lru_cache(maxsize=None)
def _contexts(bits: int):
    down = gmpy2.context(precision=bits, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=bits, round=gmpy2.RoundUp)
    return down, up


def _exact_mpfr(x: Union[int, float], bits_hint: int) -> mpfr:
    """Convert an int or float to mpfr without rounding."""
    if isinstance(x, int):
        bits = max(bits_hint, x.bit_length() + 1, 2)
        return mpfr(x, precision=bits)
    return mpfr(x, precision=max(bits_hint, 53))


class Interval:
    """A closed interval [lo, hi] of reals with mpfr endpoints.

    Immutable.  ``prec`` is the significand precision in bits at which new
    endpoints are rounded.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: mpfr, hi: mpfr, prec: int, _checked: bool = False):
        if not _checked:
            if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
                raise ValueError("NaN endpoint")
            if lo > hi:
                raise ValueError(f"inverted interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Interval is immutable")

    # ---------------- constructors ----------------

    @classmethod
    def from_exact(cls, x: Union[int, float], prec: int) -> "Interval":
        v = _exact_mpfr(x, prec)
        return cls(v, v, prec, _checked=True)

    @classmethod
    def from_fraction(cls, q: Rational, prec: int) -> "Interval":
        q = Fraction(q)
        if q.denominator == 1:
            return cls.from_exact(q.numerator, prec)
        down, up = _contexts(prec)
        num = _exact_mpfr(q.numerator, prec)
        den = _exact_mpfr(q.denominator, prec)
        return cls(down.div(num, den), up.div(num, den), prec, _checked=True)

    @classmethod
    def from_any(cls, x: Scalar, prec: int) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, (int, float)):
            return cls.from_exact(x, prec)
        if isinstance(x, mpfr):
            down, up = _contexts(prec)
            return cls(down.add(x, 0), up.add(x, 0), prec, _checked=True)
        if isinstance(x, Rational):
            return cls.from_fraction(x, prec)
        raise TypeError(f"cannot convert {type(x)!r} to Interval")

    @classmethod
    def from_endpoints(cls, lo: Scalar, hi: Scalar, prec: int) -> "Interval":
        ivlo = cls.from_any(lo, prec)
        ivhi = cls.from_any(hi, prec)
        return cls(ivlo.lo, ivhi.hi, prec)

    @classmethod
    def zero(cls, prec: int) -> "Interval":
        return cls.from_exact(0, prec)

    @classmethod
    def one(cls, prec: int) -> "Interval":
        return cls.from_exact(1, prec)

    @classmethod
    def pi(cls, prec: int) -> "Interval":
        down, up = _contexts(prec)
        return cls(down.const_pi(), up.const_pi(), prec, _checked=True)

    @classmethod
    def decimal_literal(cls, text: str, prec: int) -> "Interval":
        """Enclosure of a decimal literal (parsed exactly via Fraction)."""
        return cls.from_fraction(Fraction(text), prec)

    # ---------------- basic queries ----------------

    @property
    def overflowed(self) -> bool:
        return bool(gmpy2.is_infinite(self.lo) or gmpy2.is_infinite(self.hi))

    def width(self) -> mpfr:
        _, up = _contexts(self.prec)
        return up.sub(self.hi, self.lo)

    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def mag(self) -> mpfr:
        """sup |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> mpfr:
        """inf |x| over the interval."""
        if self.contains_zero():
            return mpfr(0)
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x: Scalar) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Rational) and not isinstance(x, int):
            big = max(self.prec, 512)
            x = Interval.from_fraction(x, big)
            return self.lo <= x.lo and x.hi <= self.hi
        return bool(self.lo <= x <= self.hi)

    def contains_zero(self) -> bool:
        return bool(self.lo <= 0 <= self.hi)

    def is_subset(self, other: "Interval") -> bool:
        return bool(other.lo <= self.lo and self.hi <= other.hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi),
                        max(self.prec, other.prec), _checked=True)

    def __repr__(self) -> str:
        return f"Interval([{self.lo}, {self.hi}], prec={self.prec})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Interval)
                and self.lo == other.lo and self.hi == other.hi)

    def __hash__(self):
        return hash((self.lo, self.hi))

    # ---------------- arithmetic ----------------

    def _coerce(self, other: Scalar) -> "Interval":
        return Interval.from_any(other, self.prec)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo, self.prec, _checked=True)

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(mpfr(0), max(-self.lo, self.hi), self.prec, _checked=True)

    def __add__(self, other: Scalar) -> "Interval":
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        down, up = _contexts(prec)
        return Interval(down.add(self.lo, o.lo), up.add(self.hi, o.hi),
                        prec, _checked=True)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "Interval":
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        down, up = _contexts(prec)
        return Interval(down.sub(self.lo, o.hi), up.sub(self.hi, o.lo),
                        prec, _checked=True)

    def __rsub__(self, other: Scalar) -> "Interval":
        return self._coerce(other) - self

    def __mul__(self, other: Scalar) -> "Interval":
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        down, up = _contexts(prec)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(down.mul(a, b) for a, b in pairs)
        hi = max(up.mul(a, b) for a, b in pairs)
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):  # 0 * inf cases
            lo, hi = mpfr("-inf"), mpfr("inf")
        return Interval(lo, hi, prec, _checked=True)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "Interval":
        o = self._coerce(other)
        if o.contains_zero():
            raise IntervalDomainError("division by interval containing zero")
        prec = max(self.prec, o.prec)
        down, up = _contexts(prec)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(down.div(a, b) for a, b in pairs)
        hi = max(up.div(a, b) for a, b in pairs)
        return Interval(lo, hi, prec, _checked=True)

    def __rtruediv__(self, other: Scalar) -> "Interval":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers; use pow_rational")
        if k == 0:
            return Interval.one(self.prec)
        down, up = _contexts(self.prec)
        if k % 2 == 1 or self.lo >= 0:
            return Interval(down.pow(self.lo, k), up.pow(self.hi, k),
                            self.prec, _checked=True)
        if self.hi <= 0:
            return Interval(down.pow(self.hi, k), up.pow(self.lo, k),
                            self.prec, _checked=True)
        # even power straddling zero
        hi = max(up.pow(self.lo, k), up.pow(self.hi, k))
        return Interval(mpfr(0), hi, self.prec, _checked=True)

    def sq(self) -> "Interval":
        return self ** 2

    # ---------------- elementary functions ----------------

    def exp(self) -> "Interval":
        down, up = _contexts(self.prec)
        return Interval(down.exp(self.lo), up.exp(self.hi), self.prec, _checked=True)

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise IntervalDomainError(f"sqrt of interval reaching below 0: {self}")
        down, up = _contexts(self.prec)
        return Interval(down.sqrt(self.lo), up.sqrt(self.hi), self.prec, _checked=True)

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise IntervalDomainError(f"log of interval reaching 0: {self}")
        down, up = _contexts(self.prec)
        return Interval(down.log(self.lo), up.log(self.hi), self.prec, _checked=True)

    def cos(self) -> "Interval":
        # Monotonicity is not tracked; adequate for the narrow angular
        # arguments used in polar evaluations.
        down, up = _contexts(self.prec)
        vals = [down.cos(self.lo), down.cos(self.hi), up.cos(self.lo), up.cos(self.hi)]
        lo, hi = min(vals), max(vals)
        pi = Interval.pi(self.prec)
        two_pi = pi + pi
        # widen to ±1 when a critical point may lie inside
        if self.width() >= float(pi.lo):
            return Interval(mpfr(-1), mpfr(1), self.prec, _checked=True)
        for k in range(-8, 9):
            crit = two_pi * Fraction(k, 2)
            if self.lo <= crit.hi and crit.lo <= self.hi:
                if k % 2 == 0:
                    hi = mpfr(1)
                else:
                    lo = mpfr(-1)
        return Interval(min(lo, hi), max(lo, hi), self.prec, _checked=True)

    def pow_rational(self, q: Rational) -> "Interval":
        """x^q for rational q, on x ≥ 0 (or x arbitrary with odd denominator).

        Monotone increasing branch; for odd denominators the real branch
        x ↦ sign(x)|x|^q is used when the numerator is odd.
        """
        q = Fraction(q)
        if q.denominator == 1:
            if q >= 0:
                return self ** q.numerator
            return Interval.one(self.prec) / self ** (-q.numerator)
        if self.lo < 0:
            if q.denominator % 2 == 0:
                raise IntervalDomainError(
                    f"pow_rational({q}) needs nonnegative base, got {self}")
            if q.numerator % 2 == 1:
                # sign(x)|x|^q is odd and monotone increasing
                neg = Interval(-self.lo, -self.lo, self.prec, _checked=True)
                lo = (-neg.pow_rational(q)).lo
                if self.hi >= 0:
                    hi = Interval(self.hi, self.hi, self.prec,
                                  _checked=True).pow_rational(q).hi
                else:
                    hi = (-Interval(-self.hi, -self.hi, self.prec,
                                    _checked=True).pow_rational(q)).hi
                return Interval(lo, hi, self.prec, _checked=True)
            # even numerator, odd denominator: |x|^q, even function
            return abs(self).pow_rational(q)
        if q < 0:
            return Interval.one(self.prec) / self.pow_rational(-q)
        down, up = _contexts(self.prec)
        a, b = q.numerator, q.denominator
        lo = down.rootn(down.pow(self.lo, a), b)
        hi = up.rootn(up.pow(self.hi, a), b)
        return Interval(lo, hi, self.prec, _checked=True)

    # ---------------- serialization ----------------

    def to_hex_pair(self) -> tuple:
        return (self.lo.__format__("a"), self.hi.__format__("a"))

    @classmethod
    def from_hex_pair(cls, pair, prec: int) -> "Interval":
        lo = mpfr(pair[0], precision=prec)
        hi = mpfr(pair[1], precision=prec)
        return cls(lo, hi, prec)


# ---------------- free functions ----------------


def iv_arith(a: Interval, b: Interval, op: str) -> Interval:
    """Dispatch form of the four basic operations."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def iv_elem(a: Interval, fn: str, q: Rational = None) -> Interval:
    """Dispatch form of the supported elementary functions."""
    if fn == "exp":
        return a.exp()
    if fn == "sqrt":
        return a.sqrt()
    if fn == "log":
        return a.log()
    if fn == "abs":
        return abs(a)
    if fn == "pow_rational":
        return a.pow_rational(q)
    raise ValueError(f"unknown elementary function {fn!r}")


@lru_cache(maxsize=4096)
def gamma_half_integer(twice_arg: int, prec: int = 256) -> Interval:
    """Enclosure of Γ(twice_arg / 2) for a positive half-integer argument.

    Built from Γ(1) = 1 and Γ(1/2) = √π through Γ(x+1) = xΓ(x); only
    half-integer arguments ever occur in this package.
    """
    if twice_arg < 1:
        raise ValueError("argument must be a positive half-integer")
    if twice_arg % 2 == 0:
        return factorial_interval(twice_arg // 2 - 1, prec)
    acc = Interval.pi(prec).sqrt()
    for t in range(1, twice_arg, 2):
        acc = acc * Interval.from_fraction(Fraction(t, 2), prec)
    return acc


def factorial_interval(n: int, prec: int) -> Interval:
    return Interval.from_exact(_factorial(n), prec)


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    import math

    return math.factorial(n)


def iv_sum(items: Iterable[Interval], prec: int) -> Interval:
    total = Interval.zero(prec)
    for it in items:
        total = total + it
    return total
