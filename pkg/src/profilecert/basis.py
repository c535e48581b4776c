"""Eigenbases of the self-similar operator L = -Laplacian - (x/2)·grad on
the Gaussian-weighted space L2(mu), mu = e^{|x|^2/4}/Z.

Three families are provided:

* :class:`RadialBasis` — normalized Laguerre functions
  psi_m(r) = sqrt(m!/Gamma(m+a+1)) L_m^{(a)}(r^2/4) e^{-r^2/4}, a = d/2-1,
  with eigenvalue d/2 + m.
* :class:`PolarBasis` — d = 2 angular-frequency modes
  psi_{k,m}(r,t) = N_{k,m} e^{-r^2/4} (r/2)^l L_m^{(l)}(r^2/4) cos(l t),
  l = 2k+1, eigenvalue 3/2 + k + m.
* :class:`EvenHermiteBasis` — d = 1 even modes
  psi_m(x) = e^{-x^2/4} H_{2m}(x/2) with H the orthonormal Hermite
  functions, eigenvalue 1/2 + m.

All quantities used in certified bounds are returned as intervals or
rigorous float64 enclosures.  Polynomial evaluation always goes through
the three-term recurrences; explicit monomial coefficients are never
formed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Union

import numpy as np

from .fastmat import FArray
from .intervals import (Interval, factorial_interval, gamma_half_integer,
                        iv_sum)

Num = Union[Interval, FArray]


def gamma_rational(q: Fraction, prec: int = 256) -> Interval:
    """Gamma at a positive integer or half-integer argument."""
    q = Fraction(q)
    if q <= 0 or q.denominator not in (1, 2):
        raise ValueError(f"unsupported Gamma argument {q}")
    return gamma_half_integer(int(2 * q), prec)


def laguerre_seq(alpha: Fraction, z: Num, nmax: int) -> List[Num]:
    """[L_0^{(a)}(z), ..., L_nmax^{(a)}(z)] via the three-term recurrence.

    Works on Interval scalars and FArray arrays alike; half-integer alpha
    keeps every recurrence constant exact in binary64.
    """
    a = float(alpha)
    one = 1 if isinstance(z, Interval) else 1.0
    out: List[Num] = [z * 0 + one]
    if nmax >= 1:
        out.append((1 + a) - z)
    for j in range(1, nmax):
        nxt = ((2 * j + a + 1) - z) * out[j] - (j + a) * out[j - 1]
        if isinstance(nxt, Interval):
            nxt = nxt / (j + 1)
        else:
            nxt = nxt.div_pos(j + 1)
        out.append(nxt)
    return out


def hermite_seq(t: Num, nmax: int, prec: int) -> List[Num]:
    """Orthonormal Hermite functions H_0..H_nmax at t (weight e^{-t^2} on R),
    without the Gaussian factor: H_{n+1} = t sqrt(2/(n+1)) H_n - sqrt(n/(n+1)) H_{n-1}.
    """
    h0: Num = 1 / Interval.pi(prec).sqrt().sqrt()
    if isinstance(t, FArray):
        h0 = FArray.from_intervals([h0])[0]

        def sqrt_c(q) -> Num:
            return FArray.from_intervals(
                [Interval.from_fraction(Fraction(q), prec).sqrt()])[0]
    else:
        def sqrt_c(q) -> Num:
            return Interval.from_fraction(Fraction(q), prec).sqrt()
    out: List[Num] = [t * 0 + h0]
    if nmax >= 1:
        out.append(t * sqrt_c(2) * out[0])
    for n in range(1, nmax):
        out.append(t * sqrt_c(Fraction(2, n + 1)) * out[n]
                   - sqrt_c(Fraction(n, n + 1)) * out[n - 1])
    return out


def exp_neg_grid(z: np.ndarray, prec: int = 64) -> FArray:
    """Rigorous enclosure of e^{-z} for a grid of nonnegative floats."""
    ivs = [Interval.from_exact(float(v), prec).__neg__().exp() for v in z]
    return FArray.from_intervals(ivs, z.shape)


class RadialBasis:
    """Radial Laguerre eigenfunctions in dimension d >= 2 (so alpha >= 0,
    which the Szego sup bound |L_m^{(a)}(z)| e^{-z/2} <= L_m^{(a)}(0) needs)."""

    def __init__(self, d: int, prec: int = 128):
        if d < 2:
            raise ValueError("RadialBasis requires d >= 2")
        self.d = d
        self.alpha = Fraction(d, 2) - 1
        self.prec = prec

    def eigenvalue(self, m: int) -> Fraction:
        return Fraction(self.d, 2) + m

    @lru_cache(maxsize=None)
    def norm_factor(self, m: int) -> Interval:
        """sqrt(m! / Gamma(m+a+1)), the L2(mu) normalization."""
        num = factorial_interval(m, self.prec)
        den = gamma_rational(m + self.alpha + 1, self.prec)
        return (num / den).sqrt()

    @lru_cache(maxsize=None)
    def laguerre_at_zero(self, m: int) -> Interval:
        """L_m^{(a)}(0) = Gamma(m+a+1)/(m! Gamma(a+1))."""
        return (gamma_rational(m + self.alpha + 1, self.prec)
                / factorial_interval(m, self.prec)
                / gamma_rational(self.alpha + 1, self.prec))

    def decay_envelope(self, m: int) -> Interval:
        """E_m with |psi_m(r)| <= E_m e^{-r^2/8} everywhere."""
        return self.norm_factor(m) * self.laguerre_at_zero(m)

    def sup_bound(self, m: int) -> Interval:
        e = self.decay_envelope(m)
        return Interval.from_endpoints(0, e.hi, self.prec)

    def deriv_sup_bound(self, m: int) -> Interval:
        """Bound for ||psi_m'||_inf.

        psi_m'(r) = -nf (r/2) e^{-z} [L_{m-1}^{(a+1)}(z) + L_m^{(a)}(z)],
        z = r^2/4, and (r/2) e^{-z/2} = sqrt(z) e^{-z/2} <= e^{-1/2}.
        """
        prec = self.prec
        terms = [self.laguerre_at_zero(m)]
        if m >= 1:
            terms.append(gamma_rational(m + self.alpha + 1, prec)
                         / factorial_interval(m - 1, prec)
                         / gamma_rational(self.alpha + 2, prec))
        s = iv_sum(terms, prec)
        b = self.norm_factor(m) * s * Interval.from_exact(-1, prec).exp().sqrt()
        return Interval.from_endpoints(0, b.hi, prec)

    def eval_grid(self, nmax: int, r: np.ndarray) -> FArray:
        """Rigorous enclosures psi_m(r_i), shape (nmax+1, len(r))."""
        r = np.asarray(r, dtype=np.float64)
        z = FArray.from_point(r).sq().div_pos(4.0)
        lag = laguerre_seq(self.alpha, z, nmax)
        ez = _exp_neg_farray(z)
        nf = FArray.from_intervals([self.norm_factor(m) for m in range(nmax + 1)])
        rows = [lag[m] * ez * nf[m] for m in range(nmax + 1)]
        return FArray(np.stack([w.inf for w in rows]), np.stack([w.sup for w in rows]))


def _exp_neg_farray(z: FArray) -> FArray:
    """e^{-z} for an FArray of nonnegative intervals (monotone decreasing)."""
    lo = exp_neg_grid(z.sup)
    hi = exp_neg_grid(z.inf)
    return FArray(lo.inf, hi.sup)


class PolarBasis:
    """d = 2 odd-frequency modes; index (k, m) carries cos((2k+1) theta)."""

    def __init__(self, prec: int = 128):
        self.prec = prec

    def ell(self, k: int) -> int:
        return 2 * k + 1

    def eigenvalue(self, k: int, m: int) -> Fraction:
        return Fraction(3, 2) + k + m

    @lru_cache(maxsize=None)
    def norm_factor(self, k: int, m: int) -> Interval:
        """N with ||N e^{-r^2/4}(r/2)^l L_m^{(l)}(r^2/4) cos(l th)||_{L2(mu)} = 1:
        N = sqrt(2 m!/Gamma(m+l+1))."""
        l = self.ell(k)
        return (2 * factorial_interval(m, self.prec)
                / gamma_rational(Fraction(m + l + 1), self.prec)).sqrt()

    def radial_part_grid(self, k: int, mmax: int, r: np.ndarray) -> FArray:
        """N_{k,m} e^{-z}(r/2)^l L_m^{(l)}(z) for m = 0..mmax on a grid."""
        l = self.ell(k)
        z = FArray.from_point(np.asarray(r, dtype=np.float64)).sq().div_pos(4.0)
        half_r = FArray.from_point(np.asarray(r) / 2.0)
        pw = half_r
        for _ in range(l - 1):
            pw = pw * half_r
        lag = laguerre_seq(Fraction(l), z, mmax)
        ez = _exp_neg_farray(z)
        nf = FArray.from_intervals([self.norm_factor(k, m) for m in range(mmax + 1)])
        rows = [lag[m] * ez * pw * nf[m] for m in range(mmax + 1)]
        return FArray(np.stack([w.inf for w in rows]), np.stack([w.sup for w in rows]))


class EvenHermiteBasis:
    """d = 1 even modes psi_m(x) = e^{-x^2/4} H_{2m}(x/2)."""

    def __init__(self, prec: int = 128):
        self.prec = prec

    def eigenvalue(self, m: int) -> Fraction:
        return Fraction(1, 2) + m

    def sup_bound(self, m: int) -> Interval:
        """||psi_m||_inf <= pi^{-1/4} via |e^{-t^2/2} H_k(t)| <= pi^{-1/4}."""
        b = 1 / Interval.pi(self.prec).sqrt().sqrt()
        return Interval.from_endpoints(0, b.hi, self.prec)

    def deriv_sup_bound(self, m: int) -> Interval:
        """psi_m'(x) = sqrt(m) e^{-x^2/4} H_{2m-1}(x/2) - (x/2) psi_m(x),
        and (x/2) e^{-x^2/8} <= e^{-1/2}."""
        prec = self.prec
        root_m = Interval.from_exact(m, prec).sqrt()
        inv_sqrt_e = Interval.from_exact(-1, prec).exp().sqrt()
        b = self.sup_bound(m) * (root_m + inv_sqrt_e)
        return Interval.from_endpoints(0, b.hi, prec)

    def eval_grid(self, mmax: int, x: np.ndarray) -> FArray:
        """psi_m(x_i) enclosures, shape (mmax+1, len(x))."""
        x = np.asarray(x, dtype=np.float64)
        t = FArray.from_point(x / 2.0)
        herm = hermite_seq(t, 2 * mmax, self.prec)
        ez = _exp_neg_farray(t.sq())
        rows = [herm[2 * m] * ez for m in range(mmax + 1)]
        return FArray(np.stack([w.inf for w in rows]), np.stack([w.sup for w in rows]))

    def deriv_grid(self, mmax: int, x: np.ndarray) -> FArray:
        """psi_m'(x_i) enclosures, shape (mmax+1, len(x))."""
        x = np.asarray(x, dtype=np.float64)
        t = FArray.from_point(x / 2.0)
        herm = hermite_seq(t, 2 * mmax, self.prec)
        ez = _exp_neg_farray(t.sq())
        rows = []
        for m in range(mmax + 1):
            if m == 0:
                rows.append(-(t * herm[0] * ez))
            else:
                sq_m = FArray.from_intervals([Interval.from_exact(m, self.prec).sqrt()])[0]
                rows.append(sq_m * herm[2 * m - 1] * ez - t * herm[2 * m] * ez)
        return FArray(np.stack([w.inf for w in rows]), np.stack([w.sup for w in rows]))


def sup_norm_on_ray(values_grid: FArray, coeffs_sup: Sequence[Interval],
                    lipschitz: Interval, h: float,
                    tail_envelope: Interval, z_cut: float,
                    prec: int) -> Interval:
    """Upper bound for ||u||_inf from grid values plus a Lipschitz pad on
    [0, r_cut] and a decay envelope M e^{-z_cut/2} beyond."""
    grid_max = float(np.max(np.abs(values_grid.sup))) if values_grid.inf.size else 0.0
    grid_max = max(grid_max, float(np.max(np.abs(values_grid.inf))) if values_grid.inf.size else 0.0)
    bulk = Interval.from_exact(grid_max, prec) + lipschitz * Interval.from_exact(h, prec) / 2
    tail = tail_envelope * (Interval.from_exact(-z_cut / 2.0, prec)).exp()
    hi = bulk.hi if bulk.hi >= tail.hi else tail.hi
    return Interval.from_endpoints(0, hi, prec)
