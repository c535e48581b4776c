"""A-posteriori positivity of validated radial profiles.

A solution u* in the ball B(ubar, delta) is shown strictly positive by a
maximum-principle argument applied to phi = e^{r^2/8} u*:

  * far field: the zeroth-order coefficient of the equation for phi,

        c(r) = d/4 + r^2/16 - 1/(p-1) + eps u*(r)^{p-1},

    is positive for r >= r_0 once r^2/16 beats 1/(p-1) plus the decaying
    envelope bound on |u*|^{p-1};
  * bulk: phi > 0 on [0, r_0], checked by adaptive bisection in
    z = r^2/4 with a mean-value-form evaluation of the truncated series
    and explicit remainder bounds.

Everything is interval arithmetic; a True answer is a proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .basis import laguerre_seq
from .embeddings import sup_embedding_constant
from .intervals import Interval, iv_sum


@dataclass
class PositivityReport:
    verified: bool
    z_far: Optional[float] = None       # far-field threshold in z = r^2/4
    boxes: int = 0
    failure: Optional[str] = None


def _phi_point(problem, a_iv, z: Interval, m_trunc: int) -> Interval:
    """sum_{m <= m_trunc} a_m nf_m L_m(z)  (= e^{z/2} P_m ubar)."""
    lag = laguerre_seq(problem.basis.alpha, z, m_trunc)
    prec = z.prec
    return iv_sum((a_iv[m] * problem.basis.norm_factor(m) * lag[m]
                   for m in range(m_trunc + 1)), prec)


def _series_tail(problem, a_iv, m_trunc: int, prec: int) -> Interval:
    """sum_{m > m_trunc} |a_m| E_m, with |e^{z/2} psi_m| <= E_m e^{z/2}...
    the envelope is uniform in z after the half-Gaussian split."""
    terms = [abs(a_iv[m]) * problem.basis.decay_envelope(m)
             for m in range(m_trunc + 1, problem.n + 1)]
    if not terms:
        return Interval.zero(prec)
    return iv_sum(terms, prec)


def _deriv_env(problem, a_iv, m_trunc: int, prec: int) -> Interval:
    """sum_{m <= m_trunc} |a_m| nf_m L_{m-1}^{(alpha+1)}(0): with the
    derivative identity d/dz L_m^{(a)} = -L_{m-1}^{(a+1)} and the bound
    |L_{m-1}^{(a+1)}(z)| <= L_{m-1}^{(a+1)}(0) e^{z/2}, this gives a
    Lipschitz constant e^{z/2} * (this sum) for e^{z/2} P_m ubar on [0, z]."""
    from .basis import gamma_rational

    alpha = problem.basis.alpha
    out = Interval.zero(prec)
    fact = Interval.one(prec)               # (m-1)!
    for m in range(1, m_trunc + 1):
        if m >= 2:
            fact = fact * (m - 1)
        # L_{m-1}^{(alpha+1)}(0) = Gamma(m + alpha + 1) / ((m-1)! Gamma(alpha + 2))
        l0 = (gamma_rational(m + alpha + 1, prec) / fact
              / gamma_rational(alpha + 2, prec))
        out = out + abs(a_iv[m]) * problem.basis.norm_factor(m) * l0
    return out


def far_field_threshold(problem, env_total: Interval, delta: Interval,
                        prec: int) -> Optional[float]:
    """Smallest z0 on a coarse ladder with
    d/4 + z/4 - 1/(p-1) - ((env + C delta) e^{-z/2})^{p-1} > 0 certified."""
    d = problem.d
    pm1 = Fraction(problem.p) - 1
    c_inf = sup_embedding_constant(d, prec)
    amp = env_total + c_inf * delta
    lin = (Interval.from_fraction(Fraction(d, 4), prec)
           - Interval.from_fraction(1 / pm1, prec))
    for z0 in [float(t) for t in np.arange(0.5, 120.0, 0.5)]:
        z_iv = Interval.from_exact(z0, prec)
        decay = (-(z_iv / 2)).exp()
        val = lin + z_iv / 4 - (amp * decay).pow_rational(pm1)
        if val.lo > 0:
            return z0
    return None


def check_positive_radial(problem, coeffs: np.ndarray, delta: float,
                          m_trunc: Optional[int] = None,
                          max_boxes: int = 200000) -> PositivityReport:
    prec = problem.precision.validate
    a_iv = [Interval.from_exact(float(c), prec) for c in coeffs]
    delta_iv = Interval.from_exact(float(delta), prec)

    env_total = iv_sum((abs(a_iv[m]) * problem.basis.decay_envelope(m)
                        for m in range(problem.n + 1)), prec)
    z_far = far_field_threshold(problem, env_total, delta_iv, prec)
    if z_far is None:
        return PositivityReport(False, failure="no far-field threshold found")

    if m_trunc is None:
        m_trunc = min(problem.n, 150)
    m_trunc = min(m_trunc, problem.n)
    # the interval recurrence amplifies widths by ~(1+sqrt2)^m: evaluate
    # series points at a precision scaled to the truncation level
    prec_eval = prec + (4 * m_trunc) // 3

    tail = _series_tail(problem, a_iv, m_trunc, prec)
    dcoef = _deriv_env(problem, a_iv, m_trunc, prec)
    c_inf = sup_embedding_constant(problem.d, prec)
    # phi* >= phi_trunc(z) - e^{z/2} tail - C(d) delta  pointwise
    slack = c_inf * delta_iv

    stack = [(0.0, z_far)]
    boxes = 0
    while stack:
        z1, z2 = stack.pop()
        boxes += 1
        if boxes > max_boxes:
            return PositivityReport(False, z_far, boxes,
                                    "subdivision budget exhausted")
        mid = 0.5 * (z1 + z2)
        zm = Interval.from_exact(mid, prec_eval)
        half = Interval.from_exact(z2 - mid, prec)
        ez2 = Interval.from_exact(z2 / 2, prec).exp()
        center = _phi_point(problem, a_iv, zm, m_trunc)
        lower = center - half * ez2 * dcoef - ez2 * tail - slack
        if lower.lo > 0:
            continue
        if z2 - z1 < 1e-6:
            return PositivityReport(
                False, z_far, boxes,
                f"cannot certify positivity near z = {mid:.6f}")
        stack.append((z1, mid))
        stack.append((mid, z2))
    return PositivityReport(True, z_far, boxes)


def check_positive_burgers(problem, coeffs: np.ndarray, delta: float,
                           m_trunc: Optional[int] = None,
                           max_boxes: int = 200000) -> PositivityReport:
    """Positivity for the half-line advection profile.

    Maximum principle for phi = e^{x^2/8} u* with drift b = u*^2 and
    zeroth-order coefficient c(x) = x^2/16 - x u*^2 / 4: the far field
    needs u*(x)^2 < x/4, i.e. (env e^{-z/2} + C delta)^2 < sqrt(z)/2 at
    the threshold (left side decreasing, right side increasing in z).

    In the bulk, phi(z) = P(z) e^{-z/2} with P = sum a_m nf_m L_m^{(-1/2)}
    has the uniform Lipschitz constant
    |phi'| <= sum |a_m| (nf_m L_{m-1}^{(1/2)}(0) + pi^{-1/4}/2)
    (Szego on the alpha = 1/2 derivative family, Hermite envelope on P/2),
    and both the truncation tail and the delta-slack are z-uniform because
    ||e^{z/2} psi_m||_inf <= pi^{-1/4}.
    """
    from .basis import gamma_rational

    prec = problem.precision.validate
    a_iv = [Interval.from_exact(float(c), prec) for c in coeffs]
    delta_iv = Interval.from_exact(float(delta), prec)

    sup_mode = problem.basis.sup_bound(0)           # pi^{-1/4}
    env_total = iv_sum((abs(a) for a in a_iv), prec) * sup_mode
    c_inf = sup_embedding_constant(1, prec)

    z_far = None
    for z0 in [float(t) for t in np.arange(0.5, 200.0, 0.5)]:
        z_iv = Interval.from_exact(z0, prec)
        lhs = (env_total * (-(z_iv / 2)).exp() + c_inf * delta_iv).sq()
        if (z_iv.sqrt() / 2 - lhs).lo > 0:
            z_far = z0
            break
    if z_far is None:
        return PositivityReport(False, failure="no far-field threshold found")

    if m_trunc is None:
        m_trunc = min(problem.n, 200)
    m_trunc = min(m_trunc, problem.n)
    prec_eval = prec + (4 * m_trunc) // 3

    from .intervals import factorial_interval

    # |phi'| <= sum |a_m| nf_m L_{m-1}^{(1/2)}(0) + pi^{-1/4} sum |a_m| / 2,
    # with nf_m L_{m-1}^{(1/2)}(0) = sqrt(Gamma(m+1/2)/m!) m / Gamma(3/2)
    lip = env_total / 2
    for m in range(1, problem.n + 1):
        nf_m = (factorial_interval(m, prec)
                / gamma_rational(Fraction(2 * m + 1, 2), prec)).sqrt()
        l0 = (gamma_rational(Fraction(2 * m + 1, 2), prec)
              / factorial_interval(m - 1, prec)
              / gamma_rational(Fraction(3, 2), prec))
        lip = lip + abs(a_iv[m]) * nf_m * l0

    tail = iv_sum((abs(a_iv[m]) for m in range(m_trunc + 1, problem.n + 1)),
                  prec) * sup_mode if m_trunc < problem.n \
        else Interval.zero(prec)
    slack = c_inf * delta_iv

    nf_eval = [(factorial_interval(m, prec_eval)
                / gamma_rational(Fraction(2 * m + 1, 2), prec_eval)).sqrt()
               for m in range(m_trunc + 1)]

    stack = [(0.0, z_far)]
    boxes = 0
    while stack:
        z1, z2 = stack.pop()
        boxes += 1
        if boxes > max_boxes:
            return PositivityReport(False, z_far, boxes,
                                    "subdivision budget exhausted")
        mid = 0.5 * (z1 + z2)
        zm = Interval.from_exact(mid, prec_eval)
        lag = laguerre_seq(Fraction(-1, 2), zm, m_trunc)
        p_val = iv_sum((a_iv[m] * nf_eval[m] * lag[m]
                        for m in range(m_trunc + 1)), prec_eval)
        phi = p_val * Interval.from_exact(-mid / 2, prec).exp()
        half = Interval.from_exact(z2 - mid, prec)
        lower = phi - half * lip - tail - slack
        if lower.lo > 0:
            continue
        if z2 - z1 < 1e-6:
            return PositivityReport(
                False, z_far, boxes,
                f"cannot certify positivity near z = {mid:.6f}")
        stack.append((z1, mid))
        stack.append((mid, z2))
    return PositivityReport(True, z_far, boxes)


def check_positive_fractional(problem, qcoeffs: np.ndarray, delta: float,
                              max_boxes: int = 200000) -> PositivityReport:
    """Positivity for the cube-root parametrisation ubar = (q(z/3) e^{-z/3})^3.

    Bulk comparison runs on phi = e^{z/2} ubar = q(z/3)^3 e^{-z/2}; the
    global bounds |q(z/3)| <= Q e^{z/6} (Q = sum |a_m|, Szego) and
    |q'| <= D e^{z/6}/3 (D = sum m |a_m|) make the z-Lipschitz constant of
    phi uniform: |phi'| <= Q^3/2 + Q^2 D.
    """
    prec = problem.precision.validate
    aq = [Interval.from_exact(float(c), prec) for c in qcoeffs]
    delta_iv = Interval.from_exact(float(delta), prec)

    q_l1 = iv_sum((abs(a) for a in aq), prec)
    q_d1 = iv_sum((abs(a) * m for m, a in enumerate(aq)), prec)
    env_total = q_l1 ** 3
    z_far = far_field_threshold(problem, env_total, delta_iv, prec)
    if z_far is None:
        return PositivityReport(False, failure="no far-field threshold found")

    c_inf = sup_embedding_constant(problem.d, prec)
    slack = c_inf * delta_iv
    lip = env_total / 2 + q_l1.sq() * q_d1
    prec_eval = prec + (4 * problem.nq) // 3

    stack = [(0.0, z_far)]
    boxes = 0
    while stack:
        z1, z2 = stack.pop()
        boxes += 1
        if boxes > max_boxes:
            return PositivityReport(False, z_far, boxes,
                                    "subdivision budget exhausted")
        mid = 0.5 * (z1 + z2)
        s_iv = Interval.from_exact(mid, prec_eval) / 3
        lag = laguerre_seq(problem.basis.alpha, s_iv, problem.nq)
        qv = iv_sum((aq[m] * lag[m] for m in range(problem.nq + 1)),
                    prec_eval)
        phi = (qv ** 3) * Interval.from_exact(-mid / 2, prec).exp()
        half = Interval.from_exact(z2 - mid, prec)
        lower = phi - half * lip - slack
        if lower.lo > 0:
            continue
        if z2 - z1 < 1e-6:
            return PositivityReport(
                False, z_far, boxes,
                f"cannot certify positivity near z = {mid:.6f}")
        stack.append((z1, mid))
        stack.append((mid, z2))
    return PositivityReport(True, z_far, boxes)
