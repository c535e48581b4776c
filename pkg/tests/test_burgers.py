"""Tests for the half-line quadratic-advection problem: boundary constant
oracle, nonlinear projection vs direct x-integration, Jacobian consistency,
sup-norm domination, and solver convergence."""

import mpmath
import numpy as np
import pytest
from fractions import Fraction

from profilecert.burgers import boundary_tail_sum, burgers_problem
from profilecert.solver import solve_burgers
from profilecert.validator import _lambda_arrays

PREC = 128


def test_boundary_tail_sum_oracle():
    # S_n = (1/pi)(pi^{3/2} log 4 - sum_{m<=n} Gamma(m+1/2)/((m+1/2)^2 m!))
    with mpmath.workdps(60):
        for n in (0, 1, 5, 20):
            s = boundary_tail_sum(n, PREC)
            acc = mpmath.mpf(0)
            for m in range(n + 1):
                acc += mpmath.gamma(m + mpmath.mpf("0.5")) / (
                    (m + mpmath.mpf("0.5")) ** 2 * mpmath.factorial(m))
            oracle = (mpmath.pi ** mpmath.mpf("1.5") * mpmath.log(4) - acc) / mpmath.pi
            assert float(s.lo) <= float(oracle) <= float(s.hi)
    # spot magnitude at n = 0
    s0 = boundary_tail_sum(0, PREC)
    assert abs(float(s0.hi) - 0.2006) < 1e-3


def test_boundary_tail_sum_decreasing_positive():
    prev = None
    for n in range(0, 40, 5):
        s = float(boundary_tail_sum(n, PREC).hi)
        assert s >= 0
        if prev is not None:
            assert s <= prev
        prev = s
    assert float(boundary_tail_sum(200, PREC).hi) < 5e-3


def eval_u_and_du(prob, a, x):
    """Float evaluation of u = sum a_m psi_m and u' on a grid in x.

    The problem stores coefficients in the Laguerre frame, whose modes
    differ from the Hermite evaluation by a sign (-1)^m.
    """
    sgn = (-1.0) ** np.arange(prob.n + 1)
    v = prob.basis.eval_grid(prob.n, x)
    dv = prob.basis.deriv_grid(prob.n, x)
    u = (0.5 * (v.inf + v.sup)).T @ (sgn * a)
    du = (0.5 * (dv.inf + dv.sup)).T @ (sgn * a)
    return u, du


def test_nonlinear_projection_matches_x_integration():
    # t_j = <u^2 u', psi_j> computed by the alpha = 0 rule in z must agree
    # with direct adaptive integration over x on the half line.
    from scipy.integrate import quad

    rng = np.random.default_rng(2)
    prob = burgers_problem(6)
    a = rng.normal(scale=0.3, size=prob.n + 1)
    a_iv = prob.coeff_intervals(a)
    t = prob._nonlinear_coeffs(a_iv)

    for j in range(prob.n + 1):
        def integrand(x, j=j):
            xx = np.array([x])
            u, du = eval_u_and_du(prob, a, xx)
            v = prob.basis.eval_grid(prob.n, xx)
            psi_j = (-1.0) ** j * 0.5 * (v.inf[j, 0] + v.sup[j, 0])
            return u[0] ** 2 * du[0] * psi_j * np.exp(x * x / 4)

        oracle, err = quad(integrand, 0, 30, limit=200)
        mid = 0.5 * (float(t[j].lo) + float(t[j].hi))
        assert abs(mid - oracle) < 1e-8 + 10 * err, j


def test_gram_is_nonlinearity_jacobian():
    # directional finite differences of the projected nonlinearity must
    # match the assembled Gram/Jacobian matrix
    rng = np.random.default_rng(4)
    prob = burgers_problem(8)
    a = rng.normal(scale=0.2, size=prob.n + 1)
    g = prob.gram(a).mid()
    h = 1e-6
    for j in range(prob.n + 1):
        e = np.zeros(prob.n + 1)
        e[j] = h
        tp = prob._nonlinear_coeffs(prob.coeff_intervals(a + e))
        tm = prob._nonlinear_coeffs(prob.coeff_intervals(a - e))
        col = np.array([(0.5 * (float(x.lo) + float(x.hi))
                         - 0.5 * (float(y.lo) + float(y.hi))) / (2 * h)
                        for x, y in zip(tp, tm)])
        assert np.allclose(g[:, j], col, atol=2e-6), j


def test_sup_norms_dominate_sampling():
    rng = np.random.default_rng(9)
    prob = burgers_problem(10)
    a = rng.normal(size=prob.n + 1)
    x = np.linspace(0.0, 25.0, 4000)
    u, du = eval_u_and_du(prob, a, x)
    assert np.max(np.abs(u)) <= float(prob.sup_norm(a).hi) * (1 + 1e-9)
    assert np.max(np.abs(du)) <= float(prob.deriv_sup_norm(a).hi) * (1 + 1e-9)


def test_psi_zero_values():
    import math
    prob = burgers_problem(4)
    # psi_0(0) = pi^{-1/4}
    p0 = prob._psi_zero(0)
    oracle = math.pi ** -0.25
    assert float(p0.lo) <= oracle <= float(p0.hi)
    # cross-check magnitudes against the basis evaluation at x = 0 (the
    # Hermite evaluation alternates sign at the origin, the Laguerre-frame
    # values are kept positive)
    v = prob.basis.eval_grid(prob.n, np.array([0.0]))
    for m in range(prob.n + 1):
        pm = prob._psi_zero(m)
        mag = abs(0.5 * (v.inf[m, 0] + v.sup[m, 0]))
        assert float(pm.lo) - 1e-12 <= mag <= float(pm.hi) + 1e-12


def test_solve_burgers_converges():
    prob = burgers_problem(40)
    a = solve_burgers(prob)
    a_iv = prob.coeff_intervals(a)
    t = prob._nonlinear_coeffs(a_iv)
    lam = prob.lambdas_float()
    res = np.array([a[j] - (0.25 * a[j]
                            - 0.5 * (float(t[j].lo) + float(t[j].hi))) / lam[j]
                    for j in range(prob.n + 1)])
    assert np.linalg.norm(res) < 1e-10
    assert a[0] > 0


def test_linear_diagonal_jacobian():
    prob = burgers_problem(6)
    gram = prob.gram(np.zeros(prob.n + 1))
    lam, lam_inv = _lambda_arrays(prob)
    jac = prob.jac_interval(gram, lam_inv)
    for m in range(prob.n + 1):
        exact = 1 - Fraction(1, 4) / prob.eigenvalue(m)
        assert jac.inf[m, m] <= float(exact) <= jac.sup[m, m]
