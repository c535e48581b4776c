"""Problem families: each class packages the basis, the quadrature plans and
the rigorous evaluations that the validator consumes.

The radial heat and Schrodinger equations share one algebraic shape,

    F(u) = u - L^{-1}( c_lin u + kappa e^{sigma z} u^p ),     z = r^2/4,

with (c_lin, kappa, sigma) = (1/(p-1), -eps, 0) for heat and
(d/4 - omega/2, eps/2, (p-1)/2) for Schrodinger.  All inner products reduce
to ∫ z^a e^{-b z} (polynomial products) dz and are evaluated with one
shared Gauss-Laguerre rule:

  * residual/Gram integrals: b = p - sigma, products of p+1 factors;
  * tail norms (for Y and w): b = 2p - 1 - 2 sigma, products of 2p factors.

Quantities that involve catastrophic cancellation (the Y residual and tail)
are computed with high-precision intervals; the large matrices (Gram, w)
go through the rigorous float64 layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .basis import RadialBasis, laguerre_seq
from .fastmat import FArray, fm_matmul
from .intervals import Interval, iv_sum
from .precision import PrecisionConfig
from .quadrature import (QuadratureRule, build_rule, check_degree_budget,
                         scaled_nodes, scaled_weight_roots)


class IntervalNodeMatrix:
    """Scaled-weight Vandermonde at full precision: rows indexed by nodes,
    entries w_i^{1/m} nf_j L_j^{(a)}(z_i/b)."""

    def __init__(self, rows: List[List[Interval]], prec: int):
        self.rows = rows
        self.prec = prec
        self.nnodes = len(rows)
        self.ncols = len(rows[0])

    def matvec(self, a: Sequence[Interval]) -> List[Interval]:
        return [iv_sum((row[j] * a[j] for j in range(self.ncols)), self.prec)
                for row in self.rows]

    def matvec_t(self, f: Sequence[Interval]) -> List[Interval]:
        return [iv_sum((self.rows[i][j] * f[i] for i in range(self.nnodes)),
                       self.prec)
                for j in range(self.ncols)]

    def to_farray(self) -> FArray:
        flat = [e for row in self.rows for e in row]
        return FArray.from_intervals(flat, (self.nnodes, self.ncols))


def build_node_matrix(rule: QuadratureRule, beta: Fraction, arity: int,
                      basis: RadialBasis, n: int) -> IntervalNodeMatrix:
    nodes = scaled_nodes(rule, beta)
    wts = scaled_weight_roots(rule, beta, arity)
    nf = [basis.norm_factor(m) for m in range(n + 1)]
    rows = []
    for z, w in zip(nodes, wts):
        lag = laguerre_seq(basis.alpha, z, n)
        rows.append([w * nf[j] * lag[j] for j in range(n + 1)])
    return IntervalNodeMatrix(rows, rule.prec)


def _pow_iv(x: Interval, k: int) -> Interval:
    return x ** k


@dataclass
class RadialPolyProblem:
    """Radial problem F(u) = u - L^{-1}(c_lin u + kappa e^{sigma z} u^p)."""

    name: str
    d: int
    p: int
    c_lin: Fraction
    kappa: Fraction
    sigma: Fraction
    n: int
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)
    rule_size: Optional[int] = None

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("polynomial degree p must be >= 2")
        self.basis = RadialBasis(self.d, self.precision.validate)
        self.beta_res = self.p - self.sigma            # residual & Gram
        self.beta_tail = 2 * self.p - 1 - 2 * self.sigma
        if self.beta_res <= 0 or self.beta_tail <= 0:
            raise ValueError("nonpositive quadrature exponent")
        if self.rule_size is None:
            self.rule_size = self.p * self.n + 1       # covers 2p*n degree
        self._rule: Optional[QuadratureRule] = None
        self._vres: Optional[IntervalNodeMatrix] = None
        self._vtail: Optional[IntervalNodeMatrix] = None

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
        # d/2 + m is exact in binary64
        return np.array([float(self.eigenvalue(m)) for m in range(self.n + 1)])

    # -- quadrature plumbing ------------------------------------------

    @property
    def rule(self) -> QuadratureRule:
        if self._rule is None:
            self._rule = build_rule(self.basis.alpha, self.rule_size,
                                    self.precision.build)
        return self._rule

    @property
    def v_res(self) -> IntervalNodeMatrix:
        if self._vres is None:
            check_degree_budget((self.p + 1) * self.n, self.rule)
            self._vres = build_node_matrix(self.rule, self.beta_res,
                                           self.p + 1, self.basis, self.n)
        return self._vres

    @property
    def v_tail(self) -> IntervalNodeMatrix:
        if self._vtail is None:
            check_degree_budget(2 * self.p * self.n, self.rule)
            self._vtail = build_node_matrix(self.rule, self.beta_tail,
                                            2 * self.p, self.basis, self.n)
        return self._vtail

    # -- rigorous evaluations -----------------------------------------

    def coeff_intervals(self, coeffs: np.ndarray) -> List[Interval]:
        prec = self.precision.build
        return [Interval.from_exact(float(c), prec) for c in coeffs]

    def residual_and_tail(self, coeffs: np.ndarray):
        """(v, tail_sq): v = P_n F(ubar) enclosures, tail_sq encloses
        ||e^{sigma z} ubar^p||^2 - ||P_n(e^{sigma z} ubar^p)||^2 >= 0."""
        prec = self.precision.build
        a = self.coeff_intervals(coeffs)
        kappa = Interval.from_fraction(self.kappa, prec)
        c_lin = Interval.from_fraction(self.c_lin, prec)

        f = self.v_res.matvec(a)
        t = self.v_res.matvec_t([_pow_iv(fi, self.p) for fi in f])

        v = []
        for j in range(self.n + 1):
            lam = Interval.from_fraction(self.eigenvalue(j), prec)
            v.append(a[j] - (c_lin * a[j] + kappa * t[j]) / lam)

        g = self.v_tail.matvec(a)
        full_sq = iv_sum((_pow_iv(gi, 2 * self.p) for gi in g), prec)
        proj_sq = iv_sum((tj.sq() for tj in t), prec)
        tail_sq = full_sq - proj_sq
        # the true value is a squared norm; clip the lower bound at zero
        tail_sq = Interval.from_endpoints(max(0.0, tail_sq.lo), tail_sq.hi, prec) \
            if tail_sq.lo < 0 else tail_sq
        return v, tail_sq

    def gram(self, coeffs: np.ndarray) -> FArray:
        """G_ij = <psi_i, e^{sigma z} ubar^{p-1} psi_j>, rigorous float64."""
        vb = self.v_res.to_farray()
        a = FArray.from_intervals(self.coeff_intervals(coeffs))
        f = fm_matmul(vb, a.reshape((self.n + 1, 1))).reshape((self.rule.size,))
        dpow = f
        for _ in range(self.p - 2):
            dpow = dpow * f
        # G = V^T Diag(f^{p-1}) V without forming the diagonal matrix
        scaled = _row_scale(vb, dpow)
        g = fm_matmul(_transpose(vb), scaled)
        return g

    def w_vector(self, coeffs: np.ndarray, gram: FArray) -> FArray:
        """Upper bounds w_m >= ||P_inf(e^{sigma z} ubar^{p-1} psi_m)||_{L2}."""
        vb = self.v_tail.to_farray()
        a = FArray.from_intervals(self.coeff_intervals(coeffs))
        f = fm_matmul(vb, a.reshape((self.n + 1, 1))).reshape((self.rule.size,))
        fpow = f
        for _ in range(2 * self.p - 3):
            fpow = fpow * f          # f^{2(p-1)}
        full = _col_quadratic(vb, fpow)          # ||e^{sz} u^{p-1} psi_m||^2
        proj = _row_norm_sq(gram)                # sum_j G_mj^2
        w_sq = full - proj
        hi = np.sqrt(np.maximum(w_sq.sup, 0.0))
        hi = np.nextafter(hi, np.inf)
        return FArray(np.zeros_like(hi), hi)

    # -- sup-norm control ---------------------------------------------

    def sup_norm(self, coeffs: np.ndarray) -> Interval:
        """Rigorous bound for ||ubar||_inf via sum_m |a_m| E_m with
        |psi_m| <= E_m e^{-r^2/8}.  For the sign-coherent profiles this
        family produces the bound is attained at the origin, where every
        psi_m equals E_m, so nothing is lost over a grid evaluation."""
        return self.sup_norm_shifted(coeffs)

    def sup_norm_shifted(self, coeffs: np.ndarray) -> Interval:
        """Bound for ||e^{r^2/8} ubar||_inf via sum_m |a_m| E_m (the Szego
        envelope is uniform once the half-Gaussian is stripped)."""
        prec = self.precision.validate
        total = iv_sum(
            (abs(Interval.from_exact(float(c), prec)) * self.basis.decay_envelope(m)
             for m, c in enumerate(coeffs)), prec)
        return Interval.from_endpoints(0, total.hi, prec)

    # -- validator hooks ----------------------------------------------

    def jac_float(self, gram: FArray) -> np.ndarray:
        return float(self.kappa) * self.p * gram.mid()

    def jac_interval(self, gram: FArray, lam_inv: FArray) -> FArray:
        """Galerkin Jacobian P_n DF(ubar) P_n as a rigorous matrix."""
        n1 = self.n + 1
        coeff = FArray.from_intervals(
            [Interval.from_fraction(Fraction(self.kappa) * self.p,
                                    self.precision.validate)])[0]
        inner = gram * coeff + _diag_embed(Fraction(self.c_lin), n1,
                                           self.precision.validate)
        scaled = inner * FArray(lam_inv.inf[:, None], lam_inv.sup[:, None])
        return FArray.from_point(np.eye(n1)) - scaled

    def z22_and_sup(self, coeffs: np.ndarray, lam_next: Interval):
        prec = self.precision.validate
        sup_u = (self.sup_norm(coeffs) if self.sigma == 0
                 else self.sup_norm_shifted(coeffs))
        nl = Interval.from_fraction(abs(Fraction(self.kappa)) * self.p, prec)
        num = abs(Interval.from_fraction(self.c_lin, prec)) \
            + nl * sup_u ** (self.p - 1)
        z22 = num / lam_next
        return Interval.from_endpoints(0, z22.hi, prec), sup_u

    def zk_terms(self, coeffs: np.ndarray, op_norm: Interval,
                 sup_u: Interval, op_coarse: Interval = None):
        from .embeddings import nonlinearity_constant, sup_embedding_constant
        prec = self.precision.validate
        lam0 = Interval.from_fraction(self.lambda0, prec)
        out = {}
        for k in range(2, self.p + 1):
            fact = 1
            for j in range(self.p - k + 1, self.p + 1):
                fact *= j          # p!/(p-k)!
            routes = []
            try:
                c = nonlinearity_constant(self.d, Fraction(k), prec)
                routes.append(c * lam0.pow_rational(Fraction(-k, 2)))
            except ValueError:
                pass
            if self.d <= 3:
                cinf = sup_embedding_constant(self.d, prec)
                routes.append((cinf ** (k - 1)) / lam0)
            best = min(routes, key=lambda r: r.hi)
            # the higher-order terms are negligible at the certified radius,
            # so the cheap classical norm estimate keeps their constants on
            # the familiar scale without affecting the contraction margin
            op = op_coarse if op_coarse is not None else op_norm
            zk = (abs(Interval.from_fraction(Fraction(self.kappa), prec))
                  * fact * (sup_u ** (self.p - k)) * best * op)
            out[Fraction(k)] = Interval.from_endpoints(0, zk.hi, prec)
        return out

    def describe(self) -> dict:
        return {
            "family": "radial-polynomial",
            "name": self.name,
            "d": self.d,
            "p": self.p,
            "n": self.n,
            "c_lin": str(self.c_lin),
            "kappa": str(self.kappa),
            "sigma": str(self.sigma),
            "rule_size": self.rule_size,
            "precision": {"build": self.precision.build,
                          "validate": self.precision.validate},
        }

    # -- float path for the numerical solver --------------------------

    def float_vandermonde(self) -> np.ndarray:
        return self.v_res.to_farray().mid()

    def float_residual(self, coeffs: np.ndarray, v: np.ndarray) -> np.ndarray:
        lam = self.lambdas_float()
        f = v @ coeffs
        t = v.T @ (f ** self.p)
        return coeffs - (float(self.c_lin) * coeffs + float(self.kappa) * t) / lam

    def float_jacobian(self, coeffs: np.ndarray, v: np.ndarray) -> np.ndarray:
        lam = self.lambdas_float()
        f = v @ coeffs
        g = v.T @ (f[:, None] ** (self.p - 1) * v)
        return (np.eye(self.n + 1)
                - (float(self.c_lin) * np.eye(self.n + 1)
                   + float(self.kappa) * self.p * g) / lam[:, None])


def _diag_embed(c: Fraction, n: int, prec: int) -> FArray:
    iv = Interval.from_fraction(c, prec)
    lo = np.zeros((n, n))
    hi = np.zeros((n, n))
    idx = np.arange(n)
    lo[idx, idx] = float(iv.lo)
    hi[idx, idx] = float(iv.hi)
    lo[idx, idx] = np.nextafter(lo[idx, idx], -np.inf)
    hi[idx, idx] = np.nextafter(hi[idx, idx], np.inf)
    return FArray(lo, hi)


def _transpose(a: FArray) -> FArray:
    return FArray(a.inf.T.copy(), a.sup.T.copy())


def _row_scale(a: FArray, s: FArray) -> FArray:
    """Diag(s) @ a for a vector s of row factors."""
    return a * FArray(s.inf[:, None], s.sup[:, None])


def _col_quadratic(v: FArray, s: FArray) -> FArray:
    """Column sums sum_i s_i v_im^2 as a vector FArray."""
    sq = v.sq() * FArray(s.inf[:, None], s.sup[:, None])
    n = sq.shape[0]
    from .fastmat import _ETA, _gamma
    lo = np.sum(sq.inf, axis=0)
    hi = np.sum(sq.sup, axis=0)
    pad_lo = _gamma(n) * np.abs(lo) + n * _ETA
    pad_hi = _gamma(n) * np.abs(hi) + n * _ETA
    return FArray(np.nextafter(lo - pad_lo, -np.inf),
                  np.nextafter(hi + pad_hi, np.inf))


def _row_norm_sq(g: FArray) -> FArray:
    sq = g.sq()
    n = sq.shape[1]
    from .fastmat import _ETA, _gamma
    lo = np.sum(sq.inf, axis=1)
    hi = np.sum(sq.sup, axis=1)
    pad_lo = _gamma(n) * np.abs(lo) + n * _ETA
    pad_hi = _gamma(n) * np.abs(hi) + n * _ETA
    return FArray(np.nextafter(lo - pad_lo, -np.inf),
                  np.nextafter(hi + pad_hi, np.inf))


# -- concrete families ------------------------------------------------

def heat_problem(d: int, p: int, n: int, eps: int = -1,
                 precision: Optional[PrecisionConfig] = None) -> RadialPolyProblem:
    """Radial semilinear heat profile: L u = u/(p-1) - eps u^p."""
    return RadialPolyProblem(
        name=f"heat_d{d}_p{p}", d=d, p=p,
        c_lin=Fraction(1, p - 1), kappa=Fraction(-eps), sigma=Fraction(0),
        n=n, precision=precision or PrecisionConfig())


def schrodinger_problem(d: int, omega: Fraction, n: int, eps: int = 1,
                        precision: Optional[PrecisionConfig] = None) -> RadialPolyProblem:
    """Radial profile of the L2-critical Schrodinger equation,
    L u = (d/4 - omega/2) u + (eps/2) e^{(p-1) r^2/8} u^p with p = 4/d + 1."""
    if 4 % d != 0:
        raise ValueError("p = 4/d + 1 must be an integer")
    p = 4 // d + 1
    return RadialPolyProblem(
        name=f"schrodinger_d{d}_w{omega}", d=d, p=p,
        c_lin=Fraction(d, 4) - Fraction(omega) / 2,
        kappa=Fraction(eps, 2), sigma=Fraction(p - 1, 2),
        n=n, precision=precision or PrecisionConfig())
