"""Tests for the float Newton solvers: convergence, residual quality,
seed handling, and agreement with the rigorous residual enclosures."""

import numpy as np
import pytest
from fractions import Fraction

from profilecert.problems import heat_problem, schrodinger_problem
from profilecert.solver import SolverError, newton, solve_radial


def residual_norm(prob, coeffs):
    v = prob.float_vandermonde()
    return np.linalg.norm(prob.float_residual(coeffs, v))


def test_solve_radial_heat_converges():
    prob = heat_problem(3, 2, 30)
    a = solve_radial(prob)
    assert a.shape == (31,)
    assert residual_norm(prob, a) < 1e-11
    # the profile of this family is positive with a dominant zero mode
    assert a[0] > 0
    assert abs(a[0]) > np.max(np.abs(a[1:]))


def test_solve_radial_heat_d2_p3():
    prob = heat_problem(2, 3, 40)
    a = solve_radial(prob)
    assert residual_norm(prob, a) < 1e-11


def test_solve_radial_schrodinger():
    prob = schrodinger_problem(2, Fraction(2), 40)
    a = solve_radial(prob)
    assert residual_norm(prob, a) < 1e-11


def test_solution_modes_decay():
    # spectral coefficients of the profile decay by several orders
    prob = heat_problem(3, 2, 40)
    a = solve_radial(prob)
    head = np.max(np.abs(a[:5]))
    tail = np.max(np.abs(a[-5:]))
    assert tail < head * 1e-4
    # and the decay is monotone on dyadic blocks
    blocks = [np.max(np.abs(a[k:k + 10])) for k in (0, 10, 20, 30)]
    assert all(b1 > b2 for b1, b2 in zip(blocks, blocks[1:]))


def test_seed_restart_reproduces_solution():
    prob = heat_problem(3, 2, 30)
    a = solve_radial(prob)
    b = solve_radial(prob, seed=a)
    assert np.allclose(a, b, rtol=0, atol=1e-12)
    # truncated seed still converges to the same profile
    c = solve_radial(prob, seed=a[:16])
    assert np.allclose(a, c, rtol=0, atol=1e-9)


def test_interval_residual_certifies_float_zero():
    # the rigorous enclosure of F(ubar) must be tiny at the Newton solution
    prob = heat_problem(3, 2, 24)
    a = solve_radial(prob)
    v, tail_sq = prob.residual_and_tail(a)
    for iv in v:
        assert max(abs(float(iv.lo)), abs(float(iv.hi))) < 1e-10
    assert float(tail_sq.hi) >= 0


def test_newton_raises_on_hopeless_start():
    prob = heat_problem(3, 2, 8)
    v = prob.float_vandermonde()
    lam = prob.lambdas_float()
    bad = np.full(prob.n + 1, 1e8)
    with pytest.raises(SolverError):
        newton(bad, v, lam, float(prob.c_lin), float(prob.kappa), prob.p,
               maxit=3)
