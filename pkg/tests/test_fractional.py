"""Tests for the cube-root parametrised fractional-exponent problem:
u must be exactly the cube ubar = Ubar^3, spectral coefficients and
residuals cross-checked against direct radial integration."""

import numpy as np
import pytest
from fractions import Fraction
from scipy.integrate import quad
from scipy.special import eval_laguerre

from profilecert.fractional import fractional_heat_problem
from profilecert.solver import solve_fractional
from profilecert.validator import _lambda_arrays


def qfun(a, z):
    """q(z/3) e^{-z/3} from the cube-root coefficients, z = r^2/4."""
    return sum(c * eval_laguerre(m, z / 3) for m, c in enumerate(a)) \
        * np.exp(-z / 3)


def test_truncation_must_be_multiple_of_three():
    with pytest.raises(ValueError):
        fractional_heat_problem(10)


def test_u_coeffs_match_direct_integration():
    # the coefficients of ubar = Ubar^3 in the d = 2 eigenbasis must agree
    # with <psi_m, Ubar^3> computed by adaptive quadrature in z = r^2/4:
    # psi_m = L_m(z) e^{-z} orthonormal against the weight e^{z} dz, so
    # u_m = int qfun^3 L_m dz with qfun^3 carrying the full e^{-z}
    rng = np.random.default_rng(1)
    prob = fractional_heat_problem(12)
    aq = rng.normal(scale=0.4, size=prob.nq + 1)
    u = prob.u_coeffs(aq)
    for m in range(prob.n + 1):
        oracle, err = quad(
            lambda z, m=m: qfun(aq, z) ** 3 * eval_laguerre(m, z),
            0, 120, limit=300)
        mid = 0.5 * (float(u[m].lo) + float(u[m].hi))
        assert abs(mid - oracle) < 1e-8 + 10 * err, m


def test_cube_coefficients_exhaust_norm():
    # Ubar^3 lies exactly in the span of the first n + 1 modes: the
    # spectral coefficients must capture the whole L2 norm of ubar
    rng = np.random.default_rng(8)
    prob = fractional_heat_problem(9)
    aq = rng.normal(scale=0.3, size=prob.nq + 1)
    u = prob.u_coeffs(aq)
    coeff_sq = sum((0.5 * (float(x.lo) + float(x.hi))) ** 2 for x in u)
    norm_sq, err = quad(lambda z: qfun(aq, z) ** 6 * np.exp(z), 0, 150,
                        limit=300)
    assert abs(coeff_sq - norm_sq) < 1e-9 + 10 * err


def test_residual_tail_nonnegative_and_small_at_solution():
    def worst_residual(n):
        prob = fractional_heat_problem(n)
        aq = solve_fractional(prob)
        v, tail_sq = prob.residual_and_tail(aq)
        assert float(tail_sq.hi) >= float(tail_sq.lo) >= 0
        return max(max(abs(float(x.lo)), abs(float(x.hi))) for x in v)

    # the error is dominated by the truncation of the cube-root ansatz and
    # must shrink as the truncation level grows
    w30 = worst_residual(30)
    w60 = worst_residual(60)
    assert w30 < 1e-4
    assert w60 < w30 * 0.1


def test_sup_norm_cbrt_dominates_sampling():
    rng = np.random.default_rng(5)
    prob = fractional_heat_problem(12)
    aq = rng.normal(size=prob.nq + 1)
    z = np.linspace(0.0, 80.0, 4000)
    vals = np.abs(qfun(aq, z)) * np.exp(z / 6)   # |q(z/3)| e^{-z/3} e^{z/6}...
    # the bound states |q(z/3) e^{-z/3}| <= (sum |a_m|) e^{-z/6}
    bound = float(prob.sup_norm_cbrt(aq).hi)
    assert np.max(np.abs(qfun(aq, z)) * np.exp(z / 6)) <= bound * (1 + 1e-9)


def test_linear_diagonal_jacobian():
    prob = fractional_heat_problem(9)
    gram = prob.gram(np.zeros(prob.nq + 1))
    lam, lam_inv = _lambda_arrays(prob)
    jac = prob.jac_interval(gram, lam_inv)
    for m in range(prob.n + 1):
        exact = 1 - Fraction(3, 2) / prob.eigenvalue(m)
        assert jac.inf[m, m] <= float(exact) <= jac.sup[m, m]


def test_holder_term_scales_with_operator_norm():
    from profilecert.intervals import Interval
    prob = fractional_heat_problem(9)
    prec = prob.precision.validate
    one = Interval.from_endpoints(0, 1.0, prec)
    two = Interval.from_endpoints(0, 2.0, prec)
    zk1 = prob.zk_terms(np.zeros(prob.nq + 1), one, one)
    zk2 = prob.zk_terms(np.zeros(prob.nq + 1), two, one)
    k = Fraction(5, 3)
    assert set(zk1) == {k}
    assert abs(float(zk2[k].hi) - 2 * float(zk1[k].hi)) < 1e-10 * float(zk2[k].hi)
