"""Explicit constants for the weighted Sobolev embeddings used in the
contraction bounds.

The ambient measure is mu = e^{|x|^2/4}/Z with Z = 2^{d-1} omega_{d-1} and
omega_{d-1} = 2 pi^{d/2}/Gamma(d/2).  Norms: ||u||_{H1} = ||grad u||_{L2(mu)}
and ||u||_{H2} = ||L u||_{L2(mu)}, whose smallest spectral values give the
Poincare factors sqrt(2/d).
"""

from __future__ import annotations

from fractions import Fraction

from .basis import gamma_rational
from .intervals import Interval

# L-infinity embedding coefficients ||phi||_inf <= C0||phi|| + C1||grad phi||
# + C2||D^2 phi|| on H^2(R^d); truncated decimals, inflated by one last-digit
# ulp to stay a rigorous upper bound.
_C_INFTY_COEFFS = {
    2: (("0.56419", "0.56420"), ("0.79789", "0.79790"), ("0.23033", "0.23034")),
    3: (("0.52319", "0.52320"), ("1.0228", "1.0229"), ("0.37467", "0.37468")),
}


def weight_normalization(d: int, prec: int) -> Interval:
    """Z = 2^{d-1} omega_{d-1} = 2^d pi^{d/2} / Gamma(d/2)."""
    pi = Interval.pi(prec)
    return (2 ** d) * pi.pow_rational(Fraction(d, 2)) / gamma_rational(Fraction(d, 2), prec)


def poincare_factor(d: int, prec: int,
                    lambda_min: Fraction | None = None) -> Interval:
    """sqrt(1/lambda_min): ||u||_{L2} <= . ||u||_{H1} and ||u||_{H1} <= . ||u||_{H2}.

    On a restricted eigenspace, pass its smallest eigenvalue instead of
    the full-space value d/2.
    """
    lam = Fraction(d, 2) if lambda_min is None else Fraction(lambda_min)
    return (1 / Interval.from_fraction(lam, prec)).sqrt()


def projection_factor_L2_H2(d: int, n: int, prec: int,
                            lambda_next: Fraction | None = None) -> Interval:
    """||f - P_n f||_{L2} <= . ||f - P_n f||_{H2}, i.e. 1/lambda_{n+1}."""
    lam = Fraction(d, 2) + n + 1 if lambda_next is None else Fraction(lambda_next)
    return 1 / Interval.from_fraction(lam, prec)


def nonlinearity_constant(d: int, p: Fraction, prec: int) -> Interval:
    """c(d, p) with ||u^p||_{L2(mu)} <= c(d,p) ||u||_{H1(mu)}^p."""
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be at least 1")
    if d == 1:
        return Interval.from_exact(2, prec).pow_rational((5 * p - 3) / 4)
    if d == 2:
        k = int(p)
        r = p - k
        base = 2 * Interval.pi(prec).sqrt()
        kfact = Interval.one(prec)
        for j in range(2, k + 1):
            kfact = kfact * j
        return (base.pow_rational(p - 1) * kfact
                * Interval.from_exact(k + 1, prec).pow_rational(r))
    if p > Fraction(d, d - 2):
        raise ValueError(f"c({d}, {p}) requires p <= d/(d-2)")
    two_over = Interval.from_fraction(Fraction(2, d), prec)
    inner = (Interval.from_fraction(Fraction(2, d - 2), prec).pow_rational(Fraction(d, 4))
             * gamma_rational(Fraction(d), prec).sqrt()
             / gamma_rational(Fraction(d, 2), prec))
    return two_over.pow_rational(p / 2) * inner.pow_rational(p - 1)


def sup_embedding_constant(d: int, prec: int) -> Interval:
    """C(d) with ||e^{|x|^2/8} u||_inf <= C(d) ||u||_{H2(mu)}, d in {1,2,3}.

    For d = 1 the chain ||e^{th/2}u||_inf <= 2^{1/2}||u||^{1/2}||grad u||^{1/2}
    (both norms over e^{th}) with Z = 2 and the Poincare factors gives 2^{7/4}.
    """
    if d == 1:
        return Interval.from_exact(2, prec).pow_rational(Fraction(7, 4))
    if d not in _C_INFTY_COEFFS:
        raise ValueError("sup embedding constant only for d in {1, 2, 3}")
    (c0l, c0h), (c1l, c1h), (c2l, c2h) = _C_INFTY_COEFFS[d]
    c0 = Interval.from_endpoints(Fraction(c0l), Fraction(c0h), prec)
    c1 = Interval.from_endpoints(Fraction(c1l), Fraction(c1h), prec)
    c2 = Interval.from_endpoints(Fraction(c2l), Fraction(c2h), prec)
    z = weight_normalization(d, prec)
    two_d = Interval.from_fraction(Fraction(2, d), prec)
    return z.sqrt() * (two_d * c0 + two_d.sqrt() * c1 + c2)
