"""Planar profile with the fractional exponent p = 5/3 (d = 2, absorption).

The equation L u = (3/2) u - u^{5/3} (real branch x^{5/3} = (cbrt x)^2 x)
has no polynomial nonlinearity, so the candidate is built as an exact cube,

    ubar = Ubar^3,      Ubar(r) = q(r^2/12) e^{-r^2/12},

with q a polynomial of degree n/3.  Then ubar lies in the span of the first
n + 1 eigenfunctions and ubar^{5/3} = Ubar^5 is again (polynomial) x
e^{-5 z / 3}, so every inner product the bounds need is one of

    exponent 1    : the coefficients <psi_m, Ubar^3>          (degree 2n)
    exponent 5/3  : residual <psi_m, Ubar^5> and Gram(Ubar^2) (degree 8n/3)
    exponent 7/3  : ||Ubar^5||^2 and the w-vector             (degree 10n/3)

and one certified rule of size 5n/3 + 1 integrates all of them exactly.

Per-factor weight shares are non-uniform on the float64 paths: a factor
L_j(y c) carries |L_j| <= L_j(0) e^{y c / 2}, so its share s of the weight
(~ e^{-y}) must satisfy s >= c/2 or the scaled entries overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from .basis import RadialBasis, laguerre_seq
from .fastmat import FArray, fm_matmul
from .intervals import Interval, iv_sum
from .precision import PrecisionConfig
from .problems import (IntervalNodeMatrix, _col_quadratic, _diag_embed,
                       _row_norm_sq, _row_scale, _transpose)
from .quadrature import QuadratureRule, build_rule, check_degree_budget


@dataclass
class FractionalHeatProblem:
    """F(u) = u - L^{-1}(c_lin u + kappa u^{5/3}) at d = 2, parametrised by
    the coefficients of q (the cube root's polynomial part)."""

    name: str
    n: int
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)

    d: int = 2
    p: Fraction = Fraction(5, 3)
    c_lin: Fraction = Fraction(3, 2)
    kappa: Fraction = Fraction(-1)
    sigma: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n % 3:
            raise ValueError("truncation level must be a multiple of 3")
        self.nq = self.n // 3
        self.basis = RadialBasis(self.d, self.precision.validate)
        self.rule_size = 5 * self.n // 3 + 1
        self._rule: Optional[QuadratureRule] = None
        self._mats = {}

    # -- spectral data ------------------------------------------------

    def eigenvalue(self, m: int) -> Fraction:
        return Fraction(self.d, 2) + m

    @property
    def lambda0(self) -> Fraction:
        return self.eigenvalue(0)

    @property
    def lambda_next(self) -> Fraction:
        return self.eigenvalue(self.n + 1)

    def lambdas_float(self) -> np.ndarray:
        return np.array([float(self.eigenvalue(m)) for m in range(self.n + 1)])

    @property
    def rule(self) -> QuadratureRule:
        if self._rule is None:
            self._rule = build_rule(self.basis.alpha, self.rule_size,
                                    self.precision.build)
        return self._rule

    # -- node matrices ------------------------------------------------

    def _share_matrix(self, beta: Fraction, arg: Fraction, share: Fraction,
                      ncols: int) -> IntervalNodeMatrix:
        """Columns (b^{-1} W_i)^{share} L_j(y_i arg), rule weight shared
        non-uniformly between the factors of a product integrand."""
        key = (beta, arg, share, ncols)
        if key not in self._mats:
            rule = self.rule
            prec = rule.prec
            scale = Interval.from_fraction(1 / Fraction(beta), prec)
            c = Interval.from_fraction(Fraction(arg), prec)
            rows = []
            for y, w in zip(rule.nodes, rule.weights):
                wf = (scale * w).pow_rational(Fraction(share))
                lag = laguerre_seq(self.basis.alpha, y * c, ncols - 1)
                rows.append([wf * lag[j] for j in range(ncols)])
            self._mats[key] = IntervalNodeMatrix(rows, prec)
        return self._mats[key]

    # psi columns evaluate L_j(z) and q columns L_m(z/3), at z = y / beta

    def _v_psi(self, beta: Fraction, share: Fraction) -> IntervalNodeMatrix:
        return self._share_matrix(beta, 1 / Fraction(beta), share, self.n + 1)

    def _v_q(self, beta: Fraction, share: Fraction) -> IntervalNodeMatrix:
        return self._share_matrix(beta, 1 / (3 * Fraction(beta)), share,
                                  self.nq + 1)

    # -- rigorous evaluations -----------------------------------------

    def coeff_intervals(self, qcoeffs: np.ndarray) -> List[Interval]:
        prec = self.precision.build
        return [Interval.from_exact(float(c), prec) for c in qcoeffs]

    def u_coeffs(self, qcoeffs: np.ndarray) -> List[Interval]:
        """Exact spectral coefficients of ubar = Ubar^3 (degree-2n rule)."""
        check_degree_budget(2 * self.n, self.rule)
        aq = self.coeff_intervals(qcoeffs)
        vq = self._v_q(Fraction(1), Fraction(1, 6))
        vpsi = self._v_psi(Fraction(1), Fraction(1, 2))
        f = vq.matvec(aq)
        return vpsi.matvec_t([fi ** 3 for fi in f])

    def residual_and_tail(self, qcoeffs: np.ndarray):
        check_degree_budget(10 * self.n // 3, self.rule)
        prec = self.precision.build
        aq = self.coeff_intervals(qcoeffs)
        kappa = Interval.from_fraction(self.kappa, prec)
        c_lin = Interval.from_fraction(self.c_lin, prec)

        u = self.u_coeffs(qcoeffs)
        f53 = self._v_q(Fraction(5, 3), Fraction(1, 8)).matvec(aq)
        t = self._v_psi(Fraction(5, 3), Fraction(3, 8)).matvec_t(
            [fi ** 5 for fi in f53])

        v = []
        for j in range(self.n + 1):
            lam = Interval.from_fraction(self.eigenvalue(j), prec)
            v.append(u[j] - (c_lin * u[j] + kappa * t[j]) / lam)

        f73 = self._v_q(Fraction(7, 3), Fraction(1, 10)).matvec(aq)
        full = iv_sum((fi ** 10 for fi in f73), prec)
        proj = iv_sum((tj.sq() for tj in t), prec)
        diff = full - proj
        tail_sq = Interval.from_endpoints(max(0, diff.lo), max(0, diff.hi),
                                          prec)
        return v, tail_sq

    def gram(self, qcoeffs: np.ndarray) -> FArray:
        """G_ij = <psi_i, Ubar^2 psi_j>, rigorous float64."""
        vpsi = self._v_psi(Fraction(5, 3), Fraction(7, 20)).to_farray()
        vq = self._v_q(Fraction(5, 3), Fraction(3, 20)).to_farray()
        aq = FArray.from_intervals(self.coeff_intervals(qcoeffs))
        f = fm_matmul(vq, aq.reshape((self.nq + 1, 1))).reshape(
            (self.rule.size,))
        return fm_matmul(_transpose(vpsi), _row_scale(vpsi, f.sq()))

    def w_vector(self, qcoeffs: np.ndarray, gram: FArray) -> FArray:
        vpsi = self._v_psi(Fraction(7, 3), Fraction(1, 4)).to_farray()
        vq = self._v_q(Fraction(7, 3), Fraction(1, 8)).to_farray()
        aq = FArray.from_intervals(self.coeff_intervals(qcoeffs))
        f = fm_matmul(vq, aq.reshape((self.nq + 1, 1))).reshape(
            (self.rule.size,))
        f4 = f.sq().sq()
        full = _col_quadratic(vpsi, f4)
        w_sq = full - _row_norm_sq(gram)
        hi = np.sqrt(np.maximum(w_sq.sup, 0.0))
        hi = np.nextafter(hi, np.inf)
        return FArray(np.zeros_like(hi), hi)

    def sup_norm_cbrt(self, qcoeffs: np.ndarray) -> Interval:
        """||Ubar||_inf <= sum |a_m|: |L_m(z/3)| e^{-z/3} <= e^{-z/6}."""
        prec = self.precision.validate
        total = iv_sum((abs(Interval.from_exact(float(c), prec))
                        for c in qcoeffs), prec)
        return Interval.from_endpoints(0, total.hi, prec)

    # -- validator hooks ----------------------------------------------

    def jac_float(self, gram: FArray) -> np.ndarray:
        return float(self.kappa * self.p) * gram.mid()

    def jac_interval(self, gram: FArray, lam_inv: FArray) -> FArray:
        n1 = self.n + 1
        prec = self.precision.validate
        coeff = FArray.from_intervals(
            [Interval.from_fraction(self.kappa * self.p, prec)])[0]
        inner = gram * coeff + _diag_embed(self.c_lin, n1, prec)
        scaled = inner * FArray(lam_inv.inf[:, None], lam_inv.sup[:, None])
        return FArray.from_point(np.eye(n1)) - scaled

    def z22_and_sup(self, qcoeffs: np.ndarray, lam_next: Interval):
        prec = self.precision.validate
        big_u = self.sup_norm_cbrt(qcoeffs)
        sup_u = big_u ** 3
        # |d(u^{5/3})/du| = (5/3) u^{2/3} <= (5/3) ||Ubar||_inf^2
        nl = Interval.from_fraction(abs(self.kappa) * self.p, prec)
        num = abs(Interval.from_fraction(self.c_lin, prec)) + nl * big_u.sq()
        z22 = num / lam_next
        return Interval.from_endpoints(0, z22.hi, prec), sup_u

    def zk_terms(self, qcoeffs: np.ndarray, op_norm: Interval,
                 sup_u: Interval, op_coarse: Interval = None):
        """Holder term: |Du^{5/3}(y) - Du^{5/3}(x)| <= (5/3)|y - x|^{2/3}
        gives Z(delta) = Z1 + Z_{5/3} delta^{2/3}."""
        from .embeddings import sup_embedding_constant
        prec = self.precision.validate
        c2 = sup_embedding_constant(self.d, prec)
        z = (Interval.from_fraction(Fraction(5, 3), prec)
             * c2.pow_rational(Fraction(2, 3)) * op_norm)
        return {Fraction(5, 3): Interval.from_endpoints(0, z.hi, prec)}

    def describe(self) -> dict:
        return {
            "family": "radial-fractional",
            "name": self.name,
            "d": self.d,
            "p": str(self.p),
            "n": self.n,
            "nq": self.nq,
            "c_lin": str(self.c_lin),
            "kappa": str(self.kappa),
            "rule_size": self.rule_size,
            "coefficients_are": "cube-root polynomial part, L_m(r^2/12) basis",
            "precision": {"build": self.precision.build,
                          "validate": self.precision.validate},
        }


def fractional_heat_problem(n: int,
                            precision: Optional[PrecisionConfig] = None
                            ) -> FractionalHeatProblem:
    kw = {"precision": precision} if precision else {}
    return FractionalHeatProblem(name=f"heat-frac-d2-p5/3-n{n}", n=n, **kw)
