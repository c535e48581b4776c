"""Oracle tests for the explicit Sobolev-embedding constants.

Each closed-form constant is recomputed independently with mpmath at high
working precision and the interval enclosure must contain that value.
"""

import mpmath
import pytest
from fractions import Fraction

from profilecert.embeddings import (
    nonlinearity_constant,
    poincare_factor,
    projection_factor_L2_H2,
    sup_embedding_constant,
    weight_normalization,
)

PREC = 128


def contains(iv, x) -> bool:
    return float(iv.lo) <= float(x) <= float(iv.hi)


def test_weight_normalization_oracle():
    with mpmath.workdps(60):
        for d in (1, 2, 3):
            z = weight_normalization(d, PREC)
            oracle = 2**d * mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(
                mpmath.mpf(d) / 2)
            assert contains(z, oracle)
            assert float(z.hi) - float(z.lo) < 1e-25


def test_weight_normalization_closed_forms():
    # d = 2: Gamma(1) = 1 so Z = 4 pi;  d = 3: Gamma(3/2) = sqrt(pi)/2 so Z = 16 pi
    with mpmath.workdps(60):
        assert contains(weight_normalization(2, PREC), 4 * mpmath.pi)
        assert contains(weight_normalization(3, PREC), 16 * mpmath.pi)


def test_poincare_factor():
    with mpmath.workdps(60):
        for d in (1, 2, 3):
            assert contains(poincare_factor(d, PREC),
                            mpmath.sqrt(mpmath.mpf(2) / d))
    # restricted eigenspace: pass an explicit smallest eigenvalue
    iv = poincare_factor(2, PREC, lambda_min=Fraction(9, 2))
    with mpmath.workdps(60):
        assert contains(iv, mpmath.sqrt(mpmath.mpf(2) / 9))


def test_projection_factor():
    # 1/lambda_{n+1} with lambda_m = d/2 + m
    iv = projection_factor_L2_H2(3, 10, PREC)
    assert contains(iv, Fraction(2, 25))
    iv = projection_factor_L2_H2(2, 0, PREC, lambda_next=Fraction(7, 2))
    assert contains(iv, Fraction(2, 7))


def test_nonlinearity_constant_oracles():
    with mpmath.workdps(60):
        # d = 1: 2^{(5p-3)/4}
        assert contains(nonlinearity_constant(1, Fraction(2), PREC),
                        mpmath.mpf(2) ** mpmath.mpf("1.75"))
        # d = 2, integer p: (2 sqrt(pi))^{p-1} p!
        for p in (2, 3, 4):
            oracle = (2 * mpmath.sqrt(mpmath.pi)) ** (p - 1) * mpmath.factorial(p)
            assert contains(nonlinearity_constant(2, Fraction(p), PREC), oracle)
        # d = 3, p = 2: (2/3) * (2^{3/4} sqrt(Gamma(3)) / Gamma(3/2))
        oracle = (mpmath.mpf(2) / 3) * (
            mpmath.mpf(2) ** mpmath.mpf("0.75")
            * mpmath.sqrt(mpmath.gamma(3)) / mpmath.gamma(mpmath.mpf("1.5")))
        assert contains(nonlinearity_constant(3, Fraction(2), PREC), oracle)


def test_nonlinearity_constant_domain_errors():
    with pytest.raises(ValueError):
        nonlinearity_constant(3, Fraction(1, 2), PREC)   # p < 1
    with pytest.raises(ValueError):
        nonlinearity_constant(3, Fraction(4), PREC)      # p > d/(d-2) = 3


def test_sup_embedding_constant():
    # d = 1 closed form
    with mpmath.workdps(60):
        assert contains(sup_embedding_constant(1, PREC),
                        mpmath.mpf(2) ** mpmath.mpf("1.75"))
        # d in {2, 3}: recompute sqrt(Z) ((2/d) C0 + sqrt(2/d) C1 + C2) from
        # the upper decimal endpoints; the enclosure's hi must not exceed it
        for d, (c0, c1, c2) in ((2, ("0.56420", "0.79790", "0.23034")),
                                (3, ("0.52320", "1.0229", "0.37468"))):
            z = 2**d * mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(
                mpmath.mpf(d) / 2)
            hi = mpmath.sqrt(z) * (
                mpmath.mpf(2) / d * mpmath.mpf(c0)
                + mpmath.sqrt(mpmath.mpf(2) / d) * mpmath.mpf(c1)
                + mpmath.mpf(c2))
            iv = sup_embedding_constant(d, PREC)
            assert float(iv.hi) <= float(hi) * (1 + 1e-20)
            assert float(iv.lo) > 0
    with pytest.raises(ValueError):
        sup_embedding_constant(4, PREC)
