"""Non-radial planar profiles on the odd-cosine subspace.

The d = 2 heat problem L u = u/2 + u^3 is posed on the closed span of the
modes psi_{k,m}(r,t) = e^{-z} (r/2)^l L_m^{(l)}(z) cos(l t), l = 2k+1,
z = r^2/4, with eigenvalue 3/2 + k + m.  Restricting to odd angular
frequencies removes the rotational phase freedom (any rotation of a
solution is again a solution), so the fixed-point operator is locally
injective and contraction arguments apply; it also excludes the radial
branch automatically.

Truncation keeps the triangle k + m <= n (all modes with eigenvalue at
most 3/2 + n).  Inner products factor through Fubini:

* angular integrals are exact rationals from the product-to-sum cosine
  algebra (:func:`angular_quartic_integral`);
* radial integrals reduce to ∫ z^a e^{-bz} (polynomial) dz and reuse the
  Gauss-Laguerre machinery: b = 3 with four weight shares for
  projections and the Gram matrix, b = 5 with six shares for norms.

Per quadrature node the angular dependence is carried as a cosine series
over frequencies: squaring and cubing the truncated sum are convolutions
in the frequency index, so the cubic term costs O(K^2) per node instead
of a quartic sweep over mode tuples.

Sup-norm control: |u(r,t)| <= sum_k |C_k(r)| where C_k is the frequency-l
radial component, and each ||C_k||_inf is bounded through the half-line
inequality ||f||_inf^2 <= 2 ||f||_2 ||f'||_2 (f absolutely continuous,
vanishing at infinity; integrate (f^2)' from r to infinity).  Both
L^2(dr) integrals are again single Gauss-Laguerre sums, so no polynomial
root isolation is needed anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .basis import PolarBasis, laguerre_seq
from .fastmat import FArray, fm_matmul
from .intervals import Interval, iv_sum
from .precision import PrecisionConfig
from .problems import (RadialPolyProblem, _col_quadratic, _diag_embed,
                       _row_norm_sq, _row_scale, _transpose)
from .quadrature import (QuadratureRule, build_rule, check_degree_budget,
                         scaled_nodes, scaled_weight_roots)

_LOG2E = float(np.log2(np.e))


def triangle_modes(n: int) -> List[Tuple[int, int]]:
    """All (k, m) with k + m <= n, sorted by eigenvalue then frequency."""
    return sorted(((k, m) for k in range(n + 1) for m in range(n + 1 - k)),
                  key=lambda km: (km[0] + km[1], km[0]))


def angular_quartic_integral(l1: int, l2: int, l3: int, l4: int) -> Fraction:
    """(1/pi) * ∫_0^{2pi} cos(l1 t) cos(l2 t) cos(l3 t) cos(l4 t) dt for
    odd positive frequencies: each of the 16 sign patterns with vanishing
    signed sum contributes 1/8."""
    ls = (l1, l2, l3, l4)
    if any(l <= 0 or l % 2 == 0 for l in ls):
        raise ValueError("frequencies must be odd and positive")
    count = 0
    for s2 in (1, -1):
        for s3 in (1, -1):
            for s4 in (1, -1):
                if l1 + s2 * l2 + s3 * l3 + s4 * l4 == 0:
                    count += 2          # the globally negated pattern too
    # (1/pi) * (2 pi / 2^4) * (number of vanishing sign patterns)
    return Fraction(count, 8)


def sparsify(coeffs: np.ndarray, floor: float) -> np.ndarray:
    """Zero every coefficient with |a| < floor (the candidate stays a valid
    input to validation; only Y moves)."""
    out = np.array(coeffs, dtype=float)
    out[np.abs(out) < floor] = 0.0
    return out


# ------------------------------------------------------------------
# cosine-series convolutions (series of cos(c t); products use
# cos a cos b = (cos(a+b) + cos|a-b|)/2 uniformly, including a or b = 0)
# ------------------------------------------------------------------

def _cos_square_f(u: np.ndarray) -> np.ndarray:
    """u: (K, nodes) over odd frequencies l = 2k+1.  Returns the cosine
    series of u^2 over even frequencies 2j, j = 0..2K-1, as (2K, nodes)."""
    kk = u.shape[0]
    out = np.zeros((2 * kk, u.shape[1]))
    for k in range(kk):
        for k2 in range(kk):
            p = 0.5 * u[k] * u[k2]
            out[k + k2 + 1] += p
            out[abs(k - k2)] += p
    return out

def _cos_mul_even_odd_f(e: np.ndarray, u: np.ndarray, qmax: int) -> np.ndarray:
    """Product of an even series (frequencies 2c) with an odd series
    (frequencies 2k+1), truncated to odd frequencies 2q+1, q <= qmax."""
    out = np.zeros((qmax + 1, u.shape[1]))
    for c in range(e.shape[0]):
        for k in range(u.shape[0]):
            p = 0.5 * e[c] * u[k]
            q = c + k
            if q <= qmax:
                out[q] += p
            q = c - k - 1 if c > k else k - c
            if q <= qmax:
                out[q] += p
    return out


def _cos_square_fa(u: List[FArray]) -> List[FArray]:
    kk = len(u)
    out: List[Optional[FArray]] = [None] * (2 * kk)

    def acc(i: int, x: FArray) -> None:
        out[i] = x if out[i] is None else out[i] + x

    for k in range(kk):
        for k2 in range(kk):
            p = (u[k] * u[k2]).scale_up(0.5)
            acc(k + k2 + 1, p)
            acc(abs(k - k2), p)
    zero = FArray.zeros(u[0].shape)
    return [x if x is not None else zero for x in out]


def _cos_mul_even_odd_fa(e: List[FArray], u: List[FArray],
                         qmax: int) -> List[FArray]:
    out: List[Optional[FArray]] = [None] * (qmax + 1)

    def acc(i: int, x: FArray) -> None:
        out[i] = x if out[i] is None else out[i] + x

    for c in range(len(e)):
        for k in range(len(u)):
            p = (e[c] * u[k]).scale_up(0.5)
            q = c + k
            if q <= qmax:
                acc(q, p)
            q = c - k - 1 if c > k else k - c
            if q <= qmax:
                acc(q, p)
    zero = FArray.zeros(u[0].shape)
    return [x if x is not None else zero for x in out]


# ------------------------------------------------------------------
# the problem class
# ------------------------------------------------------------------

@dataclass
class PolarHeatProblem:
    """F(u) = u - L^{-1}(u/2 + u^3) on the odd-cosine subspace, d = 2."""

    name: str
    tri_n: int
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)

    d: int = 2
    p: int = 3
    c_lin: Fraction = Fraction(1, 2)
    kappa: Fraction = Fraction(1)
    sigma: Fraction = Fraction(0)

    def __post_init__(self):
        self.basis = PolarBasis(self.precision.validate)
        self.modes = triangle_modes(self.tri_n)
        self.nmodes = len(self.modes)
        self.n = self.nmodes - 1                 # flattened index range
        self.kmax = self.tri_n                   # frequencies l = 2k+1
        self.index: Dict[Tuple[int, int], int] = {
            km: j for j, km in enumerate(self.modes)}
        # per-frequency flattened slices are not contiguous; keep index lists
        self.freq_rows: List[np.ndarray] = [
            np.array([self.index[(k, m)] for m in range(self.tri_n + 1 - k)])
            for k in range(self.kmax + 1)]
        # quadrature: projections have four e^{-z} factors against the
        # e^{+z} weight (beta = 3), norms six (beta = 5); per-factor
        # z-degree is at most tri_n + 1/2
        self.proj_rule_size = 2 * self.tri_n + 2
        self.norm_rule_size = 3 * self.tri_n + 2
        self._rules: Dict[str, QuadratureRule] = {}
        self._blocks: Dict[str, List[List[List[Interval]]]] = {}
        self._fblocks: Dict[str, List[FArray]] = {}
        self._float_blocks: Dict[str, List[np.ndarray]] = {}

    # -- spectral data -------------------------------------------------

    def eigenvalue(self, j: int) -> Fraction:
        k, m = self.modes[j]
        return Fraction(3, 2) + k + m

    @property
    def lambda0(self) -> Fraction:
        return Fraction(3, 2)

    @property
    def lambda_next(self) -> Fraction:
        return Fraction(3, 2) + self.tri_n + 1

    def lambdas_float(self) -> np.ndarray:
        return np.array([float(self.eigenvalue(j))
                         for j in range(self.nmodes)])

    # -- quadrature plumbing -------------------------------------------

    def _rule(self, key: str, alpha: Fraction, size: int) -> QuadratureRule:
        if key not in self._rules:
            self._rules[key] = build_rule(alpha, size, self.precision.build)
        return self._rules[key]

    @property
    def proj_rule(self) -> QuadratureRule:
        return self._rule("proj", Fraction(0), self.proj_rule_size)

    @property
    def norm_rule(self) -> QuadratureRule:
        return self._rule("norm", Fraction(0), self.norm_rule_size)

    def _freq_blocks(self, key: str, rule: QuadratureRule, beta: int,
                     arity: int) -> List[FArray]:
        """Per-frequency node matrices: entry (i, m) is
        (W_i/beta)^{1/arity} nf_{k,m} z_i^{l/2} L_m^{(l)}(z_i)."""
        if key in self._fblocks:
            return self._fblocks[key]
        check_degree_budget(arity * self.tri_n + arity // 2, rule)
        nodes = scaled_nodes(rule, Fraction(beta))
        wts = scaled_weight_roots(rule, Fraction(beta), arity)
        roots = [z.sqrt() for z in nodes]
        blocks: List[FArray] = []
        for k in range(self.kmax + 1):
            l = 2 * k + 1
            mtop = self.tri_n - k
            nf = [self.basis.norm_factor(k, m) for m in range(mtop + 1)]
            rows: List[Interval] = []
            for z, s, w in zip(nodes, roots, wts):
                pw = w * s ** l
                lag = laguerre_seq(Fraction(l), z, mtop)
                rows.extend(pw * nf[m] * lag[m] for m in range(mtop + 1))
            blocks.append(FArray.from_intervals(
                rows, (rule.size, mtop + 1)))
        self._fblocks[key] = blocks
        return blocks

    @property
    def proj_blocks(self) -> List[FArray]:
        return self._freq_blocks("proj", self.proj_rule, 3, 4)

    @property
    def norm_blocks(self) -> List[FArray]:
        return self._freq_blocks("norm", self.norm_rule, 5, 6)

    # -- candidate plumbing --------------------------------------------

    def _coeff_blocks(self, coeffs: np.ndarray) -> List[FArray]:
        a = np.asarray(coeffs, dtype=float)
        if a.shape != (self.nmodes,):
            raise ValueError(f"expected {self.nmodes} coefficients")
        return [FArray.from_point(a[rows]) for rows in self.freq_rows]

    def _freq_values(self, blocks: List[FArray],
                     acoef: List[FArray]) -> List[FArray]:
        out = []
        for vk, ak in zip(blocks, acoef):
            nn, mt = vk.shape
            out.append(fm_matmul(vk, ak.reshape((mt, 1))).reshape((nn,)))
        return out

    # -- rigorous evaluations ------------------------------------------

    def _projection(self, coeffs: np.ndarray) -> Tuple[List[FArray], List[FArray]]:
        """(t by frequency, U by frequency) on the projection rule:
        t_{k,m} = <ubar^3, psi-hat_{k,m}>."""
        acoef = self._coeff_blocks(coeffs)
        u = self._freq_values(self.proj_blocks, acoef)
        e = _cos_square_fa(u)
        t3 = _cos_mul_even_odd_fa(e, u, self.kmax)
        t = []
        for k in range(self.kmax + 1):
            vk = self.proj_blocks[k]
            nn, mt = vk.shape
            tk = fm_matmul(_transpose(vk),
                           t3[k].reshape((nn, 1))).reshape((mt,))
            t.append(tk.scale_up(0.5))
        return t, u

    def residual_and_tail(self, coeffs: np.ndarray):
        prec = self.precision.build
        t, _ = self._projection(coeffs)
        t_flat: List[Optional[Interval]] = [None] * self.nmodes
        for k, tk in enumerate(t):
            ivs = tk.to_intervals(prec)
            for m, iv in enumerate(ivs):
                t_flat[self.index[(k, m)]] = iv

        c_lin = Interval.from_fraction(self.c_lin, prec)
        kap = Interval.from_fraction(self.kappa, prec)
        v = []
        for j in range(self.nmodes):
            a_j = Interval.from_exact(float(coeffs[j]), prec)
            lam = Interval.from_fraction(self.eigenvalue(j), prec)
            v.append(a_j - (c_lin * a_j + kap * t_flat[j]) / lam)

        # ||ubar^3||^2 on the six-share rule; frequencies up to 3(2n+1)
        acoef = self._coeff_blocks(coeffs)
        u6 = self._freq_values(self.norm_blocks, acoef)
        e6 = _cos_square_fa(u6)
        t6 = _cos_mul_even_odd_fa(e6, u6, 3 * self.kmax + 1)
        full = None
        for tc in t6:
            s = tc.sq().sum()
            full = s if full is None else full + s
        full_sq = Interval.from_endpoints(float(full.inf) / 2,
                                          float(full.sup) / 2, prec)
        proj_sq = iv_sum((tj.sq() for tj in t_flat), prec)
        tail_sq = full_sq - proj_sq
        if tail_sq.lo < 0:
            tail_sq = Interval.from_endpoints(0, max(0.0, tail_sq.hi), prec)
        return v, tail_sq

    def gram(self, coeffs: np.ndarray) -> FArray:
        """G_ij = <psi-hat_i, ubar^2 psi-hat_j>, assembled frequency-block
        by frequency-block: for row frequency l and column frequency l',
        the angular integral picks the cosine components of ubar^2 at
        l + l' and |l - l'| (the latter doubled when l = l')."""
        acoef = self._coeff_blocks(coeffs)
        u = self._freq_values(self.proj_blocks, acoef)
        e = _cos_square_fa(u)
        g_inf = np.zeros((self.nmodes, self.nmodes))
        g_sup = np.zeros((self.nmodes, self.nmodes))
        for k in range(self.kmax + 1):
            vk = _transpose(self.proj_blocks[k])
            for k2 in range(self.kmax + 1):
                wt = e[k + k2 + 1] + (e[abs(k - k2)] if k != k2
                                      else e[0].scale_up(2.0))
                wt = wt.scale_up(0.25)
                blk = fm_matmul(vk, _row_scale(self.proj_blocks[k2], wt))
                rows = self.freq_rows[k][:, None]
                cols = self.freq_rows[k2][None, :]
                g_inf[rows, cols] = blk.inf
                g_sup[rows, cols] = blk.sup
        return FArray(g_inf, g_sup)

    def w_vector(self, coeffs: np.ndarray, gram: FArray) -> FArray:
        """w_j >= ||P_inf(ubar^2 psi-hat_j)||: full norm on the six-share
        rule minus the projected rows of the Gram matrix."""
        acoef = self._coeff_blocks(coeffs)
        u6 = self._freq_values(self.norm_blocks, acoef)
        e6 = _cos_square_fa(u6)
        q = _cos_square_even_fa(e6)
        full = np.zeros(self.nmodes)
        for k in range(self.kmax + 1):
            wt = (q[0] + q[2 * k + 1].scale_up(0.5)).scale_up(0.5)
            col = _col_quadratic(self.norm_blocks[k], wt)
            full[self.freq_rows[k]] = col.sup
        proj = _row_norm_sq(gram)
        w_sq = full - proj.inf
        hi = np.sqrt(np.maximum(w_sq, 0.0))
        hi = np.nextafter(hi, np.inf)
        return FArray(np.zeros_like(hi), hi)

    # -- sup-norm control ----------------------------------------------

    def sup_norm(self, coeffs: np.ndarray) -> Interval:
        """||ubar||_inf <= sum_k ||C_k||_inf with
        ||C_k||_inf^2 <= 2 ||C_k||_{L^2(dr)} ||C_k'||_{L^2(dr)}."""
        prec = self.precision.validate
        rule_h = self._rule("sup_half", Fraction(1, 2), 81)
        rule_n = self._rule("sup_neg", Fraction(-1, 2), 81)
        total = Interval.from_exact(0, prec)
        for k in range(self.kmax + 1):
            rows = self.freq_rows[k]
            a_k = [float(coeffs[j]) for j in rows]
            if not any(a_k):
                continue
            total = total + self._freq_sup(k, a_k, rule_h, rule_n, prec)
        return Interval.from_endpoints(0, total.hi, prec)

    def _freq_sup(self, k: int, a_k: Sequence[float], rule_h: QuadratureRule,
                  rule_n: QuadratureRule, prec: int) -> Interval:
        """Bound for sup_r |C_k(r)|, C_k(z) = z^{l/2} P(z) e^{-z} with
        P = sum_m a nf L_m^{(l)}:  I1 = ∫ C^2 dr = ∫ z^{l-1} P^2 e^{-2z} sqrt(z) dz,
        I2 = ∫ (dC/dr)^2 dr = ∫ z^{l-2} [lP/2 + z(P'-P)]^2 e^{-2z} sqrt(z) dz
        (for l = 1 the z-power moves into the alpha = -1/2 weight)."""
        l = 2 * k + 1
        mtop = len(a_k) - 1
        b = [Interval.from_exact(c, prec) * self.basis.norm_factor(k, m)
             for m, c in enumerate(a_k)]
        half = Fraction(l, 2)

        def quad(rule: QuadratureRule, zpow: int, deriv: bool) -> Interval:
            nodes = scaled_nodes(rule, Fraction(2))
            wts = scaled_weight_roots(rule, Fraction(2), 1)
            acc = []
            for z, w in zip(nodes, wts):
                lag = laguerre_seq(Fraction(l), z, mtop)
                p = iv_sum((b[m] * lag[m] for m in range(mtop + 1)), prec)
                if deriv:
                    dlag = laguerre_seq(Fraction(l + 1), z, mtop - 1) \
                        if mtop >= 1 else []
                    pp = iv_sum((-(b[m] * dlag[m - 1])
                                 for m in range(1, mtop + 1)), prec) \
                        if mtop >= 1 else Interval.from_exact(0, prec)
                    core = Interval.from_fraction(half, prec) * p \
                        + z * (pp - p)
                else:
                    core = p
                acc.append(w * z ** zpow * core.sq())
            total = iv_sum(acc, prec)
            return Interval.from_endpoints(max(0.0, total.lo), total.hi, prec)

        i1 = quad(rule_h, l - 1, False)
        if l >= 3:
            i2 = quad(rule_h, l - 2, True)
        else:
            i2 = quad(rule_n, 0, True)
        prod = i1 * i2
        prod = Interval.from_endpoints(max(0.0, prod.lo), prod.hi, prec)
        # ||C||_inf <= sqrt(2) (I1 I2)^{1/4}
        bound = (Interval.from_exact(2, prec) * prod.sqrt()).sqrt()
        return Interval.from_endpoints(0, bound.hi, prec)

    # -- validator hooks ----------------------------------------------

    jac_float = RadialPolyProblem.jac_float
    jac_interval = RadialPolyProblem.jac_interval
    zk_terms = RadialPolyProblem.zk_terms

    def z22_and_sup(self, coeffs: np.ndarray, lam_next: Interval):
        prec = self.precision.validate
        sup_u = self.sup_norm(coeffs)
        num = abs(Interval.from_fraction(self.c_lin, prec)) \
            + 3 * abs(Interval.from_fraction(self.kappa, prec)) * sup_u.sq()
        z22 = num / lam_next
        return Interval.from_endpoints(0, z22.hi, prec), sup_u

    def describe(self) -> dict:
        return {
            "family": "planar-odd-cosine",
            "name": self.name,
            "d": self.d,
            "p": self.p,
            "triangle_n": self.tri_n,
            "modes": self.nmodes,
            "mode_order": "sorted by (k+m, k); angular frequency 2k+1",
            "c_lin": str(self.c_lin),
            "kappa": str(self.kappa),
            "proj_rule_size": self.proj_rule_size,
            "norm_rule_size": self.norm_rule_size,
            "precision": {"build": self.precision.build,
                          "validate": self.precision.validate},
        }


def _cos_square_even_fa(e: List[FArray]) -> List[FArray]:
    """Square of an even cosine series (frequencies 2c); result again even
    (frequencies 2j, j = 0..2C-2)."""
    cc = len(e)
    out: List[Optional[FArray]] = [None] * (2 * cc - 1)

    def acc(i: int, x: FArray) -> None:
        out[i] = x if out[i] is None else out[i] + x

    for c in range(cc):
        for c2 in range(cc):
            p = (e[c] * e[c2]).scale_up(0.5)
            acc(c + c2, p)
            acc(abs(c - c2), p)
    zero = FArray.zeros(e[0].shape)
    return [x if x is not None else zero for x in out]


def nonradial_heat_problem(n: int,
                           precision: Optional[PrecisionConfig] = None
                           ) -> PolarHeatProblem:
    return PolarHeatProblem(name=f"nonradial-heat-n{n}", tri_n=n,
                            precision=precision or PrecisionConfig())


# ------------------------------------------------------------------
# float path: numerical solve by continuation in the triangle size
# ------------------------------------------------------------------

class _FloatOps:
    """Float64 mirrors of the per-frequency node matrices, assembled in
    log2 space (weights underflow, high-degree values overflow)."""

    def __init__(self, n: int):
        from .solver import _scaled_laguerre_columns, log2_weights
        self.n = n
        self.size = 2 * n + 2
        y, log_w = log2_weights(self.size, 0.0)
        z = y / 3.0
        log_ws = (log_w - np.log2(3.0)) * 0.25
        self.blocks: List[np.ndarray] = []
        for k in range(n + 1):
            l = 2 * k + 1
            mtop = n - k
            sign, logmag = _scaled_laguerre_columns(float(l), z, mtop)
            ms = np.arange(mtop + 1)
            log_nf = 0.5 * (np.log(2.0) + gammaln(ms + 1)
                            - gammaln(ms + l + 1)) * _LOG2E
            log_pw = 0.5 * l * np.log2(z)
            self.blocks.append(sign * np.exp2(
                logmag + log_ws[:, None] + log_pw[:, None] + log_nf[None, :]))
        self.modes = triangle_modes(n)
        self.index = {km: j for j, km in enumerate(self.modes)}
        self.freq_rows = [
            np.array([self.index[(k, m)] for m in range(n + 1 - k)])
            for k in range(n + 1)]
        self.lam = np.array([1.5 + k + m for k, m in self.modes])

    def freq_values(self, a: np.ndarray) -> np.ndarray:
        return np.stack([self.blocks[k] @ a[rows]
                         for k, rows in enumerate(self.freq_rows)])

    def residual(self, a: np.ndarray) -> np.ndarray:
        u = self.freq_values(a)
        e = _cos_square_f(u)
        t3 = _cos_mul_even_odd_f(e, u, self.n)
        t = np.empty_like(a)
        for k, rows in enumerate(self.freq_rows):
            t[rows] = 0.5 * (self.blocks[k].T @ t3[k])
        return a - (0.5 * a + t) / self.lam

    def jacobian(self, a: np.ndarray) -> np.ndarray:
        u = self.freq_values(a)
        e = _cos_square_f(u)
        nm = len(self.modes)
        g = np.empty((nm, nm))
        for k, rows in enumerate(self.freq_rows):
            for k2, cols in enumerate(self.freq_rows):
                wt = e[k + k2 + 1] + (2.0 if k == k2 else 1.0) * e[abs(k - k2)]
                blk = 0.25 * (self.blocks[k].T
                              @ (wt[:, None] * self.blocks[k2]))
                g[rows[:, None], cols[None, :]] = blk
        eye = np.eye(nm)
        return eye - (0.5 * eye + 3.0 * g) / self.lam[:, None]


def solve_nonradial(n: int, start_n: int = 2, max_iter: int = 60,
                    tol: float = 5e-14) -> np.ndarray:
    """Continuation in the triangle size from a single-frequency seed.

    The coarsest system is seeded on the lowest mode (k, m) = (0, 0); the
    one-mode balance (3/2) a = a/2 + g a^3 fixes the starting amplitude."""
    from .solver import SolverError

    levels = []
    lv = min(start_n, n)
    while lv < n:
        levels.append(lv)
        lv *= 2
    levels.append(n)

    a_modes: Dict[Tuple[int, int], float] = {}
    first = True
    for lv in levels:
        ops = _FloatOps(lv)
        a = np.zeros(len(ops.modes))
        for km, val in a_modes.items():
            if km in ops.index:
                a[ops.index[km]] = val
        if first:
            j0 = ops.index[(0, 0)]
            probe = np.zeros_like(a)
            probe[j0] = 1.0
            t0 = (1.5 * probe - 1.5 * ops.residual(probe) - 0.5 * probe)[j0]
            a[j0] = 1.0 / np.sqrt(t0)
            first = False
        r = ops.residual(a)
        nrm = np.linalg.norm(r)
        for _ in range(max_iter):
            if nrm < tol:
                break
            step = np.linalg.solve(ops.jacobian(a), r)
            damp = 1.0
            while damp > 1e-6:
                trial = a - damp * step
                tr = ops.residual(trial)
                tn = np.linalg.norm(tr)
                if tn < nrm:
                    a, r, nrm = trial, tr, tn
                    break
                damp *= 0.5
            else:
                break
        if not nrm < 1e-10:
            raise SolverError(
                f"triangle level {lv}: stalled at residual {nrm:.3e}")
        a_modes = {km: a[j] for j, km in enumerate(ops.modes)}

    out = np.zeros(len(ops.modes))
    for j, km in enumerate(ops.modes):
        out[j] = a_modes[km]
    return out


def eval_disk(coeffs: np.ndarray, n: int, rmax: float, nr: int,
              ntheta: int) -> np.ndarray:
    """Float evaluation of the profile on a polar grid; returns an array
    of rows (r, theta, value) for plotting exports."""
    ops = _FloatOps(n)
    rs = np.linspace(0.0, rmax, nr)
    thetas = np.linspace(0.0, 2 * np.pi, ntheta, endpoint=False)
    basis = PolarBasis(64)
    rows = []
    vals_k = []
    for k, rws in enumerate(ops.freq_rows):
        grid = basis.radial_part_grid(k, n - k, rs).mid()
        vals_k.append(coeffs[rws] @ grid)
    vals_k = np.stack(vals_k)          # (K, nr)
    ls = 2 * np.arange(len(ops.freq_rows)) + 1
    for i, r in enumerate(rs):
        for th in thetas:
            val = float(np.sum(vals_k[:, i] * np.cos(ls * th)))
            rows.append((r, th, val))
    return np.array(rows)
