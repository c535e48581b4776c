"""Consistency tests for the radial fixed-point problems.

The interval evaluation path (residual enclosures, rigorous Jacobian) is
cross-checked against the plain float path and against closed forms that
hold in the linear case.
"""

import numpy as np
import pytest
from fractions import Fraction

from profilecert.fastmat import fm_matmul
from profilecert.problems import heat_problem, schrodinger_problem
from profilecert.validator import _lambda_arrays


def small_heat(d=3, p=2, n=12):
    return heat_problem(d, p, n)


def test_eigenvalues():
    prob = small_heat(d=3, n=12)
    assert prob.eigenvalue(0) == Fraction(3, 2)
    assert prob.eigenvalue(5) == Fraction(13, 2)
    assert prob.lambda0 == Fraction(3, 2)
    assert prob.lambda_next == Fraction(3, 2) + 13
    lam = prob.lambdas_float()
    assert lam.shape == (13,)
    assert lam[0] == 1.5 and lam[12] == 13.5


def test_zero_coefficients_give_zero_residual():
    prob = small_heat()
    v, tail_sq = prob.residual_and_tail(np.zeros(prob.n + 1))
    for iv in v:
        assert iv.lo <= 0.0 <= iv.hi
        assert float(iv.hi) - float(iv.lo) < 1e-30
    assert tail_sq.lo <= 0.0 <= tail_sq.hi or tail_sq.lo == 0.0
    assert float(tail_sq.hi) < 1e-30


def test_linear_diagonal_jacobian():
    # With ubar = 0 the Gram matrix vanishes and the Galerkin Jacobian is
    # exactly diag(1 - c_lin / lambda_m).
    prob = small_heat(d=2, p=3, n=10)
    gram = prob.gram(np.zeros(prob.n + 1))
    lam, lam_inv = _lambda_arrays(prob)
    jac = prob.jac_interval(gram, lam_inv)
    for m in range(prob.n + 1):
        exact = 1 - prob.c_lin / prob.eigenvalue(m)
        assert jac.inf[m, m] <= float(exact) <= jac.sup[m, m]
        for j in range(prob.n + 1):
            if j != m:
                assert jac.inf[m, j] <= 0.0 <= jac.sup[m, j]
                assert jac.sup[m, j] - jac.inf[m, j] < 1e-25


def test_interval_residual_contains_float_residual():
    rng = np.random.default_rng(7)
    prob = small_heat(d=3, p=2, n=10)
    v = prob.float_vandermonde()
    for _ in range(5):
        a = rng.normal(scale=0.1, size=prob.n + 1)
        fres = prob.float_residual(a, v)
        ivres, _ = prob.residual_and_tail(a)
        for j in range(prob.n + 1):
            width = float(ivres[j].hi) - float(ivres[j].lo)
            assert ivres[j].lo - 1e-12 <= fres[j] <= ivres[j].hi + 1e-12
            assert width < 1e-10


def test_float_jacobian_matches_finite_differences():
    rng = np.random.default_rng(11)
    prob = small_heat(d=3, p=2, n=8)
    v = prob.float_vandermonde()
    a = rng.normal(scale=0.1, size=prob.n + 1)
    jac = prob.float_jacobian(a, v)
    h = 1e-6
    for j in range(prob.n + 1):
        e = np.zeros(prob.n + 1)
        e[j] = h
        col = (prob.float_residual(a + e, v) - prob.float_residual(a - e, v)) / (2 * h)
        assert np.allclose(jac[:, j], col, atol=1e-7)


def test_sup_norm_dominates_dense_sampling():
    rng = np.random.default_rng(3)
    prob = small_heat(d=2, p=3, n=10)
    a = rng.normal(size=prob.n + 1)
    bound = float(prob.sup_norm(a).hi)
    r = np.linspace(0.0, 20.0, 4000)
    total = np.zeros_like(r)
    vals = prob.basis.eval_grid(prob.n, r)
    for m in range(prob.n + 1):
        mid = 0.5 * (vals.inf[m] + vals.sup[m])
        total += a[m] * mid
    assert np.max(np.abs(total)) <= bound * (1 + 1e-9)


def test_zk_terms_monotone_in_operator_norm():
    from profilecert.intervals import Interval
    prob = small_heat(d=3, p=2, n=8)
    rng = np.random.default_rng(5)
    a = rng.normal(scale=0.1, size=prob.n + 1)
    prec = prob.precision.validate
    sup_u = prob.sup_norm(a)
    small = Interval.from_endpoints(0, 2.0, prec)
    large = Interval.from_endpoints(0, 5.0, prec)
    zk_small = prob.zk_terms(a, small, sup_u)
    zk_large = prob.zk_terms(a, large, sup_u)
    for k in zk_small:
        assert float(zk_small[k].hi) <= float(zk_large[k].hi)


def test_schrodinger_constructor():
    prob = schrodinger_problem(2, Fraction(2), 8)
    assert prob.p == 3
    assert prob.c_lin == Fraction(1, 2) - Fraction(1)   # d/4 - omega/2 = -1/2
    assert prob.sigma == Fraction(1)
    assert prob.kappa == Fraction(1, 2)
    with pytest.raises(ValueError):
        schrodinger_problem(3, Fraction(2), 8)


def test_degree_validation():
    with pytest.raises(ValueError):
        heat_problem(3, 0, 8)
