"""Eigenbases: Laguerre/Hermite recurrences against mpmath, normalization
oracles, decay-envelope (Szego-type) bound by dense sampling."""

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profilecert.basis import (EvenHermiteBasis, PolarBasis, RadialBasis,
                               hermite_seq, laguerre_seq, sup_norm_on_ray)
from profilecert.fastmat import FArray
from profilecert.intervals import Interval


def exact_mpf(bound):
    import gmpy2
    q = gmpy2.mpq(bound)
    return mpmath.mpf(int(q.numerator)) / mpmath.mpf(int(q.denominator))


@settings(max_examples=30)
@given(st.floats(min_value=0, max_value=60, allow_nan=False),
       st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(-1, 2),
                        Fraction(1), Fraction(3)]))
def test_laguerre_seq_oracle(z, alpha):
    n = 12
    vals = laguerre_seq(alpha, Interval.from_exact(z, 128), n)
    with mpmath.workdps(60):
        for m, v in enumerate(vals):
            truth = mpmath.laguerre(m, mpmath.mpf(alpha.numerator)
                                    / alpha.denominator, mpmath.mpf(z))
            assert exact_mpf(v.lo) <= truth <= exact_mpf(v.hi), (m, z)


@settings(max_examples=30)
@given(st.floats(min_value=-6, max_value=6, allow_nan=False))
def test_hermite_seq_oracle(t):
    """hermite_seq returns orthonormal H^_k(t) = H_k(t)/sqrt(2^k k! sqrt(pi))."""
    n = 10
    vals = hermite_seq(Interval.from_exact(t, 128), n, 128)
    with mpmath.workdps(60):
        for k, v in enumerate(vals):
            truth = (mpmath.hermite(k, mpmath.mpf(t))
                     / mpmath.sqrt(mpmath.power(2, k) * mpmath.factorial(k)
                                   * mpmath.sqrt(mpmath.pi)))
            assert exact_mpf(v.lo) <= truth <= exact_mpf(v.hi), k


def test_radial_norm_factor_oracle():
    """nf_m = sqrt(m!/Gamma(m + d/2)); frozen spots for d=2 and d=3."""
    with mpmath.workdps(50):
        for d in (2, 3):
            basis = RadialBasis(d)
            for m in (0, 1, 5, 20):
                nf = basis.norm_factor(m)
                truth = mpmath.sqrt(mpmath.factorial(m)
                                    / mpmath.gamma(m + mpmath.mpf(d) / 2))
                assert exact_mpf(nf.lo) <= truth <= exact_mpf(nf.hi)


def test_polar_norm_factor_oracle():
    """N_{k,m} = sqrt(2 m! / Gamma(m + 2k + 2))."""
    basis = PolarBasis()
    with mpmath.workdps(50):
        for k, m in ((0, 0), (1, 2), (3, 5)):
            nf = basis.norm_factor(k, m)
            truth = mpmath.sqrt(2 * mpmath.factorial(m)
                                / mpmath.gamma(m + 2 * k + 2))
            assert exact_mpf(nf.lo) <= truth <= exact_mpf(nf.hi)


def test_eigenvalues():
    assert RadialBasis(3).eigenvalue(4) == Fraction(11, 2)
    assert RadialBasis(2).eigenvalue(0) == 1
    assert EvenHermiteBasis().eigenvalue(3) == Fraction(7, 2)
    assert PolarBasis().eigenvalue(2, 3) == Fraction(3, 2) + 5


def test_decay_envelope_by_dense_sampling():
    """|psi_m(r)| <= E_m e^{-r^2/8} checked on a 10^4-point grid."""
    for d in (2, 3):
        basis = RadialBasis(d)
        r = np.linspace(0.0, 30.0, 10_000)
        for m in (0, 1, 7, 19):
            vals = basis.eval_grid(m, r)
            env = float(basis.decay_envelope(m).hi)
            bound = env * np.exp(-r * r / 8.0)
            mags = np.maximum(np.abs(vals.inf[m]), np.abs(vals.sup[m]))
            # the interval evaluation rounds outward by a few 1e-9 relative
            # (the envelope is tight at r=0), so allow one part in 1e7
            assert np.all(mags <= bound * (1 + 1e-7) + env * 1e-12), (d, m)


def test_radial_eval_grid_at_zero():
    """psi_m(0) = nf_m L_m^(a)(0) exactly."""
    basis = RadialBasis(2)
    vals = basis.eval_grid(5, np.array([0.0]))
    for m in range(6):
        truth = basis.norm_factor(m) * basis.laguerre_at_zero(m)
        assert vals.inf[m, 0] <= float(truth.hi)
        assert vals.sup[m, 0] >= float(truth.lo)


def test_even_hermite_sup_bounds_by_sampling():
    basis = EvenHermiteBasis()
    x = np.linspace(0.0, 25.0, 5000)
    vals = basis.eval_grid(8, x)
    for m in (0, 2, 8):
        b = float(basis.sup_bound(m).hi)
        mags = np.maximum(np.abs(vals.inf[m]), np.abs(vals.sup[m]))
        assert np.all(mags <= b * (1 + 1e-9))


def test_even_hermite_deriv_grid_matches_difference_quotient():
    basis = EvenHermiteBasis()
    x = np.linspace(0.1, 4.0, 17)
    h = 1e-6
    d = basis.deriv_grid(4, x).mid()
    up = basis.eval_grid(4, x + h).mid()
    dn = basis.eval_grid(4, x - h).mid()
    fd = (up - dn) / (2 * h)
    assert np.max(np.abs(d - fd)) < 1e-6


def test_polar_radial_part_zero_at_origin():
    """(r/2)^l factor kills every mode at r = 0 for l >= 1."""
    basis = PolarBasis()
    vals = basis.radial_part_grid(1, 3, np.array([0.0, 1.0]))
    assert np.all(np.abs(vals.mid()[:, 0]) < 1e-300)
    assert np.any(np.abs(vals.mid()[:, 1]) > 1e-6)


def test_sup_norm_on_ray_dominates_samples():
    prec = 128
    basis = RadialBasis(2)
    rng = np.random.default_rng(7)
    coeffs = rng.normal(size=6)
    z_cut = 25.0
    r_cut = 2.0 * np.sqrt(z_cut)
    h = 0.005
    r = np.arange(0.0, r_cut + h, h)
    modes = basis.eval_grid(5, r)
    ivs = [Interval.from_exact(float(c), prec) for c in coeffs]
    u_grid = FArray.zeros(r.shape)
    for m, c in enumerate(ivs):
        u_grid = u_grid + modes[m].scale_up(1.0) * float(c.mid())
    # crude Lipschitz bound: sum |c_m| ||psi_m'||_inf
    lip = sum((abs(c) * basis.deriv_sup_bound(m)
               for m, c in enumerate(ivs)),
              Interval.from_exact(0, prec))
    tail_env = sum((abs(c) * basis.decay_envelope(m)
                    for m, c in enumerate(ivs)),
                   Interval.from_exact(0, prec))
    bound = sup_norm_on_ray(u_grid, ivs, lip, h, tail_env, z_cut, prec)
    # dense check both inside and outside the grid range
    rr = np.linspace(0.0, 20.0, 4001)
    dense = coeffs @ basis.eval_grid(5, rr).mid()
    assert float(bound.hi) >= np.max(np.abs(dense)) * (1 - 1e-9)
