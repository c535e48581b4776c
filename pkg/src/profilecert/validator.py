"""A posteriori validation: assemble the Newton-Kantorovich bounds for a
candidate coefficient vector and decide contraction via radii polynomials.

For an approximate zero ubar of F and the quasi-Newton operator
T = I - A F, the certificate consists of rigorous numbers

    Y           >= ||T(ubar) - ubar||
    Z1          >= ||DT(ubar)||        (2x2 block estimate)
    Z_k         >= ||D^k T(ubar)||     (k = 2..p, or the Holder term 5/3)

and validated radii: any delta with

    P(delta) = Y - delta + sum_k Z_k delta^k / k!  < 0
    Q(delta) = -1 + sum_k Z_k delta^{k-1}/(k-1)!   < 0

yields a unique zero of F within H^2-distance delta of ubar.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .fastmat import FArray, fm_matmul, fm_two_norm_bound
from .intervals import Interval, iv_sum

SCHEMA_VERSION = 2


class ValidationError(RuntimeError):
    pass


@dataclass
class BoundSet:
    y: Interval
    z11: Interval
    z12: Interval
    z21: Interval
    z22: Interval
    z1: Interval
    zk: Dict[Fraction, Interval]      # higher-order terms, key = order k
    op_norm: Interval                 # ||L A L^{-1}|| bound
    sup_u: Interval
    delta_lower: Optional[float] = None
    delta_upper: Optional[float] = None
    proved: bool = False
    failure: Optional[str] = None


def _diag_scale(m: FArray, left: FArray, right: FArray) -> FArray:
    """Diag(left) @ m @ Diag(right) with interval vectors."""
    return m * FArray(left.inf[:, None], left.sup[:, None]) \
             * FArray(right.inf[None, :], right.sup[None, :])


def _lambda_arrays(problem) -> Tuple[FArray, FArray]:
    prec = problem.precision.validate
    lam = [Interval.from_fraction(problem.eigenvalue(m), prec)
           for m in range(problem.n + 1)]
    inv = [1 / x for x in lam]
    return FArray.from_intervals(lam), FArray.from_intervals(inv)


def build_approx_inverse(problem, gram: FArray) -> FArray:
    """A_n: float64 inverse of the midpoint Galerkin Jacobian, as exact
    point intervals (any fixed A works; only the bounds must be rigorous)."""
    lam = problem.lambdas_float()
    jac = problem.jac_float(gram)
    mid = np.eye(problem.n + 1) - (float(problem.c_lin) * np.eye(problem.n + 1)
                                   + jac) / lam[:, None]
    a = np.linalg.inv(mid)
    return FArray.from_point(a)


def two_by_two_norm(z11: Interval, z12: Interval, z21: Interval,
                    z22: Interval, prec: int) -> Interval:
    """Largest singular value of [[z11, z12], [z21, z22]], upper bound."""
    a, b, c, e = (Interval.from_endpoints(0, x.hi, prec)
                  for x in (z11, z12, z21, z22))
    t = a.sq() + b.sq() + c.sq() + e.sq()
    det = a * e - b * c
    disc = t.sq() - 4 * det.sq()
    disc = Interval.from_endpoints(max(0.0, disc.lo), disc.hi, prec)
    smax_sq = (t + disc.sqrt()) / 2
    return Interval.from_endpoints(0, smax_sq.sqrt().hi, prec)


def compute_bounds(problem, coeffs: np.ndarray) -> BoundSet:
    prec = problem.precision.validate
    n = problem.n
    lam_f, lam_inv_f = _lambda_arrays(problem)

    gram = problem.gram(coeffs)
    a_mat = build_approx_inverse(problem, gram)

    # Y: finite part through A_n, tail via exact quadrature
    v, tail_sq = problem.residual_and_tail(coeffs)
    v_f = FArray.from_intervals(v)
    av = fm_matmul(a_mat, v_f.reshape((n + 1, 1))).reshape((n + 1,))
    finite_sq = (av * av * lam_f.sq()).sum()
    kappa_sq = Interval.from_fraction(Fraction(problem.kappa) ** 2, prec)
    y_sq = _to_iv(finite_sq, prec) + kappa_sq * tail_sq
    y = _sqrt_upper(y_sq, prec)

    # Z11 = ||Dl (I - A M) Dl^{-1}||, M the interval Galerkin Jacobian
    m_iv = problem.jac_interval(gram, lam_inv_f)
    am = fm_matmul(a_mat, m_iv)
    resid = FArray.from_point(np.eye(n + 1)) - am
    z11 = _norm_iv(_diag_scale(resid, lam_f, lam_inv_f), prec)

    # ||L A L^{-1}||: sharp bound for the terms that decide contraction,
    # plus the cheap classical estimate for terms where slack is harmless
    a_scaled = _diag_scale(a_mat, lam_f, lam_inv_f)
    op_norm = _norm_iv(a_scaled, prec)
    op_norm = Interval.from_endpoints(0, max(1.0, op_norm.hi), prec)
    op_coarse = Interval.from_endpoints(
        0, max(1.0, fm_two_norm_bound(a_scaled)), prec)

    w = problem.w_vector(coeffs, gram)
    nl_deriv = Interval.from_fraction(abs(Fraction(problem.kappa)) * problem.p, prec)
    lam_next = Interval.from_fraction(problem.lambda_next, prec)

    # problems may pre-scale their tail vectors (hooks: z21_weight for the
    # Z21 prefactor, w12_vector for a dedicated Z12 vector already carrying
    # its prefactor and any boundary contribution)
    if hasattr(problem, "z21_weight"):
        pre21 = Interval.from_fraction(Fraction(problem.z21_weight), prec)
    else:
        pre21 = nl_deriv

    z21_core = (w * w * lam_inv_f.sq()).sum()
    z21 = pre21 * _sqrt_upper(_to_iv(z21_core, prec), prec)

    abs_a = FArray(a_scaled.mag() * 0.0, a_scaled.mag())
    if hasattr(problem, "w12_vector"):
        w12 = problem.w12_vector(coeffs, gram)
        pre12 = Interval.from_fraction(1, prec)
    else:
        w12 = w
        pre12 = nl_deriv / lam_next
    aw = fm_matmul(abs_a, w12.reshape((n + 1, 1))).reshape((n + 1,))
    z12_core = (aw * aw).sum()
    z12 = pre12 * _sqrt_upper(_to_iv(z12_core, prec), prec)
    z12 = Interval.from_endpoints(0, z12.hi, prec)

    z22, sup_u = problem.z22_and_sup(coeffs, lam_next)

    z1 = two_by_two_norm(z11, z12, z21, z22, prec)
    zk = problem.zk_terms(coeffs, op_norm, sup_u, op_coarse)

    return BoundSet(y=y, z11=z11, z12=z12, z21=z21, z22=z22, z1=z1,
                    zk=zk, op_norm=op_norm, sup_u=sup_u)


def _to_iv(x: FArray, prec: int) -> Interval:
    return Interval.from_endpoints(float(x.inf), float(x.sup), prec)


def _sqrt_upper(x: Interval, prec: int) -> Interval:
    """[0, sqrt(hi)] for a quantity known nonnegative whose enclosure may
    dip below zero by rounding pads."""
    hi = x.hi if x.hi > 0 else 0
    return Interval.from_endpoints(
        0, Interval.from_endpoints(0, hi, prec).sqrt().hi, prec)


def _norm_iv(m: FArray, prec: int) -> Interval:
    return Interval.from_endpoints(0, _norm_sharp(m, prec), prec)


def _norm_sharp(m: FArray, prec: int, squarings: int = 6) -> float:
    """Spectral-norm upper bound via squaring the symmetric product:
    with S = M^T M, rho(S)^{2^k} <= ||S^{2^k}||_F, so
    ||M||_2 <= ||S^{2^k}||_F^{1/2^{k+1}} -- tight within a factor
    (n+1)^{1/2^{k+2}} versus the coarse sqrt(||M||_1 ||M||_inf)."""
    import math

    base = fm_two_norm_bound(m)
    if base == 0.0 or not math.isfinite(base):
        return base
    s = fm_matmul(FArray(m.inf.T.copy(), m.sup.T.copy()), m)
    expo = 0  # invariant: S^{2^j} = 2^expo * s
    for _ in range(squarings):
        mx = float(np.max(s.mag()))
        if mx <= 0.0 or not math.isfinite(mx):
            return base
        e = math.frexp(mx)[1]
        s = s.scale_up(math.ldexp(1.0, -e))
        expo = (expo + e) * 2
        s = fm_matmul(s, s)
    frob_sq = s.sq().sum()
    hi = float(frob_sq.sup)
    if not math.isfinite(hi):
        return base
    frob = Interval.from_endpoints(0, max(hi, 0.0), prec).sqrt()
    total = Interval.from_fraction(Fraction(2) ** expo, prec) * frob
    sharp = total.pow_rational(Fraction(1, 2 ** (squarings + 1))).hi
    return min(base, sharp)


# ---------------- radii polynomials ----------------

def _eval_p(bounds: BoundSet, delta: Interval, prec: int) -> Interval:
    acc = bounds.y - delta + bounds.z1 * delta
    for k, zk in bounds.zk.items():
        k = Fraction(k)
        if k.denominator == 1:
            fact = 1
            for j in range(2, int(k) + 1):
                fact *= j
            acc = acc + zk * (delta ** int(k)) / fact
        else:
            # integral of Z(s) = Z1 + Z_k s^{k-1} contributes Z_k d^k / k
            acc = acc + zk * delta.pow_rational(k) / Interval.from_fraction(k, prec)
    return acc


def _eval_q(bounds: BoundSet, delta: Interval, prec: int) -> Interval:
    acc = bounds.z1 - 1
    for k, zk in bounds.zk.items():
        k = Fraction(k)
        if k.denominator == 1:
            fact = 1
            for j in range(2, int(k)):
                fact *= j
            acc = acc + zk * (delta ** (int(k) - 1)) / fact
        else:
            acc = acc + zk * delta.pow_rational(k - 1)
    return acc


def solve_radii(bounds: BoundSet, prec: int) -> BoundSet:
    """Certify an interval of admissible radii.

    delta_lower: a certified delta with P(delta) < 0 (existence ball),
    found by inflating the numeric first root of P.
    delta_upper: a certified delta with both P < 0 impossible beyond, we
    report the largest tested delta with Q(delta) < 0 and P(delta) < 0
    fails only on P; uniqueness holds on any delta with Q(delta) < 0 and
    P(delta) < 0.
    """
    if not bounds.z1.hi < 1:
        bounds.failure = f"Z1 = {bounds.z1.hi} >= 1: no contraction at ubar"
        return bounds

    y_hi = float(bounds.y.hi)
    # numeric guesses by bisection on midpoints
    def p_mid(x: float) -> float:
        return float(_eval_p(bounds, Interval.from_exact(x, prec), prec).mid())

    def q_mid(x: float) -> float:
        return float(_eval_q(bounds, Interval.from_exact(x, prec), prec).mid())

    # first root of P is slightly above y/(1 - Z1)
    base = y_hi / max(1e-300, (1.0 - float(bounds.z1.hi)))
    delta_lo = None
    for factor in (1.0 + 1e-12, 1.0 + 1e-6, 1.001, 1.01, 1.1, 2.0, 10.0):
        cand = base * factor
        if _eval_p(bounds, Interval.from_exact(cand, prec), prec).hi < 0:
            delta_lo = cand
            break
    if delta_lo is None:
        bounds.failure = "radii polynomial P has no certified negative value"
        return bounds

    # largest certified contraction radius: bisect Q upward from delta_lo
    hi = delta_lo
    step = max(delta_lo, 1e-8)
    while step < 1e18:
        cand = hi + step
        if (_eval_q(bounds, Interval.from_exact(cand, prec), prec).hi < 0
                and q_mid(cand) < 0):
            hi = cand
            step *= 2
        else:
            step /= 2
            if step < hi * 1e-9 + 1e-300:
                break
    bounds.delta_lower = delta_lo
    bounds.delta_upper = hi
    bounds.proved = True
    return bounds


def validate(problem, coeffs: np.ndarray) -> BoundSet:
    bounds = compute_bounds(problem, coeffs)
    return solve_radii(bounds, problem.precision.validate)


# ---------------- certificates ----------------

def certificate_dict(problem, coeffs: np.ndarray, bounds: BoundSet) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "generated": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "problem": problem.describe(),
        "coefficients": [float(c).hex() for c in coeffs],
        "bounds": {
            "Y": float(bounds.y.hi),
            "Z11": float(bounds.z11.hi),
            "Z12": float(bounds.z12.hi),
            "Z21": float(bounds.z21.hi),
            "Z22": float(bounds.z22.hi),
            "Z1": float(bounds.z1.hi),
            "Zk": {str(k): float(v.hi) for k, v in bounds.zk.items()},
            "op_norm": float(bounds.op_norm.hi),
            "sup_u": float(bounds.sup_u.hi),
        },
        "delta_lower": bounds.delta_lower,
        "delta_upper": bounds.delta_upper,
        "proved": bounds.proved,
        "failure": bounds.failure,
    }


def write_certificate(path: Path, problem, coeffs: np.ndarray,
                      bounds: BoundSet) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(certificate_dict(problem, coeffs, bounds),
                               indent=2))


def load_coefficients(cert: dict) -> np.ndarray:
    return np.array([float.fromhex(h) for h in cert["coefficients"]])


def bounds_from_certificate(cert: dict, prec: int) -> BoundSet:
    """Rebuild a BoundSet of the stored upper bounds (as [0, hi] intervals)."""
    b = cert["bounds"]

    def iv(x):
        return Interval.from_endpoints(0, float(x), prec)

    return BoundSet(
        y=iv(b["Y"]), z11=iv(b["Z11"]), z12=iv(b["Z12"]), z21=iv(b["Z21"]),
        z22=iv(b["Z22"]), z1=iv(b["Z1"]),
        zk={Fraction(k): iv(v) for k, v in b["Zk"].items()},
        op_norm=iv(b["op_norm"]), sup_u=iv(b["sup_u"]),
        delta_lower=cert.get("delta_lower"),
        delta_upper=cert.get("delta_upper"),
        proved=bool(cert.get("proved")), failure=cert.get("failure"))


def recheck_certificate(cert: dict) -> Tuple[bool, List[str]]:
    """Independent re-verification of a stored certificate: re-evaluate the
    radii polynomials P and Q at the recorded radii from the recorded
    bounds alone (no problem rebuild, no quadrature)."""
    report: List[str] = []
    if cert.get("schema_version") != SCHEMA_VERSION:
        report.append(f"schema_version {cert.get('schema_version')} != "
                      f"{SCHEMA_VERSION}")
        return False, report
    prec = int(cert.get("problem", {}).get(
        "precision", {}).get("validate", 128))
    bounds = bounds_from_certificate(cert, prec)
    if not cert.get("proved"):
        report.append("certificate records an unproved run; nothing to "
                      "recheck beyond consistency")
        return False, report
    ok = True
    if not bounds.z1.hi < 1:
        report.append(f"Z1 = {bounds.z1.hi} >= 1")
        ok = False
    for label, delta in (("delta_lower", bounds.delta_lower),
                         ("delta_upper", bounds.delta_upper)):
        if delta is None or not (delta > 0):
            report.append(f"{label} missing or nonpositive")
            ok = False
            continue
        d_iv = Interval.from_exact(float(delta), prec)
        q = _eval_q(bounds, d_iv, prec)
        line = f"{label} = {delta:.6e}: Q <= {q.hi:.3e}"
        if label == "delta_lower":
            p = _eval_p(bounds, d_iv, prec)
            line += f", P <= {p.hi:.3e}"
            if not p.hi < 0:
                ok = False
                line += "  [P not negative]"
        if not q.hi < 0:
            ok = False
            line += "  [Q not negative]"
        report.append(line)
    return ok, report
