"""First-order quadratic-advection profile on the half line with a Neumann
condition at the origin:  F(u) = u - L^{-1}(u/4 - u^2 u').

The basis is the even half-Hermite family psi_m(x) = e^{-x^2/4} H_2m(x/2)
(eigenvalue m + 1/2).  In the quadratic frame z = x^2/4 those modes are
Laguerre functions,

    psi_m(x) = nf_m L_m^{(-1/2)}(z) e^{-z},   nf_m = sqrt(m!/Gamma(m+1/2)),

so every inner product the bounds need reduces to a rule-exact integral:

    projections  <g, psi_j> : ∫ (poly) e^{-3z} dz          (alpha = 0   rule)
    tail norms   ||g||^2    : ∫ z^{1/2} (poly)^2 e^{-5z} dz (alpha = 1/2 rule)

because odd-in-x integrands carry one factor t = sqrt(z) which either
cancels against dx = dz/t (projections) or squares to a z^{1/2} weight
(norms).  With P(z) = sum a_m nf_m L_m(z) the nonlinearity is

    u^2 u' = t P^2 (P' - P) e^{-3z},   d/dx = t d/dz.

Bound-set differences from the power-nonlinearity families:

* the w vector has two tails, 2||P_inf(u psi_m u')|| + ||P_inf(u^2 psi_m')||,
  and enters Z21 without a derivative prefactor;
* Z12 uses a separate vector built by parts, whose m-th entry carries a
  boundary term u(0)^2 psi_m(0) sqrt(S_n) with
  S_n = (1/pi)(pi^{3/2} log 4 - sum_{m<=n} Gamma(m+1/2)/((m+1/2)^2 m!));
* Z22, Z2, Z3 are explicit in ||u||_inf and ||u'||_inf via the Hermite
  envelope ||psi_m||_inf <= pi^{-1/4}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .basis import EvenHermiteBasis, gamma_rational, laguerre_seq
from .fastmat import FArray, fm_matmul
from .intervals import Interval, factorial_interval, iv_sum
from .precision import PrecisionConfig
from .problems import (IntervalNodeMatrix, _col_quadratic, _diag_embed,
                       _row_norm_sq, _row_scale, _transpose)
from .quadrature import (QuadratureRule, build_rule, check_degree_budget,
                         scaled_nodes, scaled_weight_roots)


def boundary_tail_sum(n: int, prec: int) -> Interval:
    """S_n = (1/pi)(pi^{3/2} log 4 - sum_{m=0}^n Gamma(m+1/2)/((m+1/2)^2 m!)),
    the Cauchy-Schwarz constant that bounds h(0)^2 by S_n ||h||_{H^2}^2 for
    h in the range of the tail projection."""
    pi = Interval.pi(prec)
    total = pi * pi.sqrt() * Interval.from_exact(4, prec).log()
    ratio = pi.sqrt()                        # Gamma(m+1/2)/m!
    acc = []
    for m in range(n + 1):
        lam = Interval.from_fraction(Fraction(2 * m + 1, 2), prec)
        acc.append(ratio / lam.sq())
        ratio = ratio * Fraction(2 * m + 1, 2 * m + 2)
    s = (total - iv_sum(acc, prec)) / pi
    return Interval.from_endpoints(max(0, s.lo), max(0, s.hi), prec)


@dataclass
class BurgersProblem:
    """Quadratic-advection profile problem over the even half-Hermite modes."""

    name: str
    n: int
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)

    d: int = 1
    p: int = 3                      # arity bookkeeping: nonlinearity is cubic
    c_lin: Fraction = Fraction(1, 4)
    kappa: Fraction = Fraction(-1)
    sigma: Fraction = Fraction(0)
    z21_weight: Fraction = Fraction(1)   # w carries the full derivative split

    def __post_init__(self):
        self.basis = EvenHermiteBasis(self.precision.validate)
        self.alpha = Fraction(-1, 2)
        # projections: poly degree <= 4n; norms: z^{1/2} (deg <= 8n) poly
        self.rule_size = 2 * self.n + 1
        self.norm_rule_size = 4 * self.n + 1
        self._rule: Optional[QuadratureRule] = None
        self._norm_rule: Optional[QuadratureRule] = None
        self._proj: Optional[Tuple[IntervalNodeMatrix, IntervalNodeMatrix]] = None
        self._proj_f: Optional[Tuple[FArray, FArray]] = None
        self._norm_f: Optional[Tuple[FArray, FArray]] = None
        self._psi0_cache = {}

    # -- spectral data ------------------------------------------------

    def eigenvalue(self, m: int) -> Fraction:
        return Fraction(1, 2) + m

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
            self._rule = build_rule(Fraction(0), self.rule_size,
                                    self.precision.build)
        return self._rule

    @property
    def norm_rule(self) -> QuadratureRule:
        if self._norm_rule is None:
            self._norm_rule = build_rule(Fraction(1, 2), self.norm_rule_size,
                                         self.precision.build)
        return self._norm_rule

    # -- node matrices ------------------------------------------------

    def _nf(self, m: int, prec: int) -> Interval:
        return (factorial_interval(m, prec)
                / gamma_rational(Fraction(2 * m + 1, 2), prec)).sqrt()

    def _build_columns(self, rule: QuadratureRule, beta: Fraction,
                       arity: int) -> Tuple[List[List[Interval]],
                                            List[List[Interval]]]:
        """Rows (per node) of the mode values nf_j L_j^{(-1/2)}(z_i) and
        derivatives nf_j d/dz L_j^{(-1/2)}(z_i) = -nf_j L_{j-1}^{(1/2)}(z_i),
        each scaled by the per-factor weight share."""
        prec = rule.prec
        nodes = scaled_nodes(rule, beta)
        wts = scaled_weight_roots(rule, beta, arity)
        nf = [self._nf(m, prec) for m in range(self.n + 1)]
        zero = Interval.from_exact(0, prec)
        rows_v, rows_d = [], []
        for z, w in zip(nodes, wts):
            lag = laguerre_seq(self.alpha, z, self.n)
            dlag = laguerre_seq(self.alpha + 1, z, self.n - 1)
            rows_v.append([w * nf[j] * lag[j] for j in range(self.n + 1)])
            rows_d.append([zero] + [-(w * nf[j] * dlag[j - 1])
                                    for j in range(1, self.n + 1)])
        return rows_v, rows_d

    def _proj_mats(self) -> Tuple[IntervalNodeMatrix, IntervalNodeMatrix]:
        if self._proj is None:
            rows_v, rows_d = self._build_columns(self.rule, Fraction(3), 4)
            self._proj = (IntervalNodeMatrix(rows_v, self.rule.prec),
                          IntervalNodeMatrix(rows_d, self.rule.prec))
        return self._proj

    def _proj_farrays(self) -> Tuple[FArray, FArray]:
        if self._proj_f is None:
            v, d = self._proj_mats()
            self._proj_f = (v.to_farray(), d.to_farray())
        return self._proj_f

    def _norm_farrays(self) -> Tuple[FArray, FArray]:
        if self._norm_f is None:
            rows_v, rows_d = self._build_columns(self.norm_rule,
                                                 Fraction(5), 6)
            prec = self.norm_rule.prec
            self._norm_f = (IntervalNodeMatrix(rows_v, prec).to_farray(),
                            IntervalNodeMatrix(rows_d, prec).to_farray())
        return self._norm_f

    # -- rigorous evaluations -----------------------------------------

    def coeff_intervals(self, coeffs: np.ndarray) -> List[Interval]:
        prec = self.precision.build
        return [Interval.from_exact(float(c), prec) for c in coeffs]

    def _nonlinear_coeffs(self, a: List[Interval]) -> List[Interval]:
        """t_j = <u^2 u', psi_j> = ∫ P^2 (P'-P) nf_j L_j e^{-3z} dz."""
        v, dv = self._proj_mats()
        f = v.matvec(a)
        fd = dv.matvec(a)
        s = [f[i].sq() * (fd[i] - f[i]) for i in range(len(f))]
        return v.matvec_t(s)

    def residual_and_tail(self, coeffs: np.ndarray):
        check_degree_budget(4 * self.n, self.rule)
        check_degree_budget(8 * self.n + 1, self.norm_rule)
        prec = self.precision.build
        a = self.coeff_intervals(coeffs)
        kappa = Interval.from_fraction(self.kappa, prec)
        c_lin = Interval.from_fraction(self.c_lin, prec)

        t = self._nonlinear_coeffs(a)
        v = []
        for j in range(self.n + 1):
            lam = Interval.from_fraction(self.eigenvalue(j), prec)
            v.append(a[j] - (c_lin * a[j] + kappa * t[j]) / lam)

        # tail: ||u^2 u'||^2 - sum_j t_j^2
        nv, nd = self._norm_farrays()
        af = FArray.from_intervals(a)
        g = fm_matmul(nv, af.reshape((self.n + 1, 1))).reshape((-1,))
        gd = fm_matmul(nd, af.reshape((self.n + 1, 1))).reshape((-1,))
        s = g.sq() * (gd - g)
        full = s.sq().sum()
        full_iv = Interval.from_endpoints(float(full.inf), float(full.sup),
                                          prec)
        proj = iv_sum((tj.sq() for tj in t), prec)
        diff = full_iv - proj
        tail_sq = Interval.from_endpoints(max(0, diff.lo), max(0, diff.hi),
                                          prec)
        return v, tail_sq

    def gram(self, coeffs: np.ndarray) -> FArray:
        """M[j, i] = <d/dx(u^2 psi_i), psi_j>, the nonlinearity Jacobian:
        rows are components, columns directions."""
        v, dv = self._proj_farrays()
        af = FArray.from_intervals(self.coeff_intervals(coeffs))
        f = fm_matmul(v, af.reshape((self.n + 1, 1))).reshape((-1,))
        fd = fm_matmul(dv, af.reshape((self.n + 1, 1))).reshape((-1,))
        sym = f * (fd * 2.0 - f * 3.0)
        term1 = fm_matmul(_transpose(v), _row_scale(v, sym))
        term2 = fm_matmul(_transpose(v), _row_scale(dv, f.sq()))
        return term1 + term2

    def w_vector(self, coeffs: np.ndarray, gram: FArray) -> FArray:
        """w_m = 2 ||P_inf(u psi_m u')|| + ||P_inf(u^2 psi_m')||."""
        v, dv = self._proj_farrays()
        nv, nd = self._norm_farrays()
        af = FArray.from_intervals(self.coeff_intervals(coeffs))
        f = fm_matmul(v, af.reshape((self.n + 1, 1))).reshape((-1,))
        fd = fm_matmul(dv, af.reshape((self.n + 1, 1))).reshape((-1,))
        g = fm_matmul(nv, af.reshape((self.n + 1, 1))).reshape((-1,))
        gd = fm_matmul(nd, af.reshape((self.n + 1, 1))).reshape((-1,))

        m1 = fm_matmul(_transpose(v), _row_scale(v, f * (fd - f)))
        full1 = _col_quadratic(nv, (g * (gd - g)).sq())
        w1 = self._tail_sqrt(full1 - _row_norm_sq(m1))

        m2 = fm_matmul(_transpose(dv - v), _row_scale(v, f.sq()))
        full2 = _col_quadratic(nd - nv, g.sq().sq())
        w2 = self._tail_sqrt(full2 - _row_norm_sq(m2))
        return w1 * 2.0 + w2

    def w12_vector(self, coeffs: np.ndarray, gram: FArray) -> FArray:
        """Integration-by-parts vector: boundary term at x = 0 plus the tail
        of u^2 (psi_m' + (x/2) psi_m) = u^2 t nf_m L_{m-1}^{(1/2)} e^{-z}."""
        prec = self.precision.validate
        v, dv = self._proj_farrays()
        nv, nd = self._norm_farrays()
        af = FArray.from_intervals(self.coeff_intervals(coeffs))
        f = fm_matmul(v, af.reshape((self.n + 1, 1))).reshape((-1,))
        g = fm_matmul(nv, af.reshape((self.n + 1, 1))).reshape((-1,))

        m3 = fm_matmul(_transpose(dv), _row_scale(v, f.sq()))
        full3 = _col_quadratic(nd, g.sq().sq())
        tail = self._tail_sqrt(full3 - _row_norm_sq(m3))
        lam_next = Interval.from_fraction(self.lambda_next, prec)
        inv_lam = FArray.from_intervals([1 / lam_next])[0]

        u0 = iv_sum((Interval.from_exact(float(c), prec) * self._psi_zero(m)
                     for m, c in enumerate(coeffs)), prec)
        root_s = boundary_tail_sum(self.n, prec).sqrt()
        psi0 = FArray.from_intervals([self._psi_zero(m)
                                      for m in range(self.n + 1)])
        bnd_c = FArray.from_intervals([abs(u0.sq()) * root_s])[0]
        return psi0 * bnd_c + tail * inv_lam

    @staticmethod
    def _tail_sqrt(w_sq: FArray) -> FArray:
        hi = np.sqrt(np.maximum(w_sq.sup, 0.0))
        hi = np.nextafter(hi, np.inf)
        return FArray(np.zeros_like(hi), hi)

    def _psi_zero(self, m: int) -> Interval:
        """psi_m(0) = nf_m L_m^{(-1/2)}(0) > 0 in this sign convention."""
        if m not in self._psi0_cache:
            prec = self.precision.validate
            l0 = (gamma_rational(Fraction(2 * m + 1, 2), prec)
                  / factorial_interval(m, prec)
                  / gamma_rational(Fraction(1, 2), prec))
            self._psi0_cache[m] = self._nf(m, prec) * l0
        return self._psi0_cache[m]

    # -- sup norms -----------------------------------------------------

    def sup_norm(self, coeffs: np.ndarray) -> Interval:
        """||u||_inf <= pi^{-1/4} sum |a_m| (Hermite envelope)."""
        prec = self.precision.validate
        total = iv_sum((abs(Interval.from_exact(float(c), prec))
                        for c in coeffs), prec)
        return Interval.from_endpoints(
            0, (total * self.basis.sup_bound(0)).hi, prec)

    def deriv_sup_norm(self, coeffs: np.ndarray) -> Interval:
        prec = self.precision.validate
        total = iv_sum(
            (abs(Interval.from_exact(float(c), prec))
             * self.basis.deriv_sup_bound(m) for m, c in enumerate(coeffs)),
            prec)
        return Interval.from_endpoints(0, total.hi, prec)

    # -- validator hooks ----------------------------------------------

    def jac_float(self, gram: FArray) -> np.ndarray:
        return float(self.kappa) * gram.mid()

    def jac_interval(self, gram: FArray, lam_inv: FArray) -> FArray:
        n1 = self.n + 1
        prec = self.precision.validate
        coeff = FArray.from_intervals(
            [Interval.from_fraction(self.kappa, prec)])[0]
        inner = gram * coeff + _diag_embed(self.c_lin, n1, prec)
        scaled = inner * FArray(lam_inv.inf[:, None], lam_inv.sup[:, None])
        return FArray.from_point(np.eye(n1)) - scaled

    def z22_and_sup(self, coeffs: np.ndarray, lam_next: Interval):
        prec = self.precision.validate
        sup_u = self.sup_norm(coeffs)
        sup_du = self.deriv_sup_norm(coeffs)
        quarter = Interval.from_fraction(Fraction(1, 4), prec)
        z22 = (quarter + 2 * sup_u * sup_du) / lam_next \
            + sup_u.sq() / lam_next.sqrt()
        return Interval.from_endpoints(0, z22.hi, prec), sup_u

    def zk_terms(self, coeffs: np.ndarray, op_norm: Interval,
                 sup_u: Interval, op_coarse: Interval = None):
        prec = self.precision.validate
        sup_du = self.deriv_sup_norm(coeffs)
        root2 = Interval.from_exact(2, prec).sqrt()
        z2 = (Interval.from_exact(2, prec).pow_rational(Fraction(15, 4))
              * op_norm * (root2 * sup_u + sup_du))
        # the cubic term is negligible at the certified radius, so the
        # cheap classical norm estimate keeps its constant on the familiar
        # scale without affecting the contraction margin
        z3 = 96 * (op_coarse if op_coarse is not None else op_norm)
        return {Fraction(2): Interval.from_endpoints(0, z2.hi, prec),
                Fraction(3): Interval.from_endpoints(0, z3.hi, prec)}

    def describe(self) -> dict:
        return {
            "family": "advection-halfline",
            "name": self.name,
            "d": self.d,
            "p": self.p,
            "n": self.n,
            "c_lin": str(self.c_lin),
            "kappa": str(self.kappa),
            "rule_size": self.rule_size,
            "norm_rule_size": self.norm_rule_size,
            "precision": {"build": self.precision.build,
                          "validate": self.precision.validate},
        }


def burgers_problem(n: int,
                    precision: Optional[PrecisionConfig] = None
                    ) -> BurgersProblem:
    kw = {"precision": precision} if precision else {}
    return BurgersProblem(name=f"burgers-n{n}", n=n, **kw)
