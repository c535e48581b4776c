"""Tests for the interval positivity checker on small proved profiles."""

import numpy as np
import pytest

from profilecert.positivity import (
    PositivityReport,
    check_positive_radial,
    far_field_threshold,
)
from profilecert.intervals import Interval
from profilecert.problems import heat_problem
from profilecert.solver import solve_radial
from profilecert.validator import validate


@pytest.fixture(scope="module")
def proved_small():
    prob = heat_problem(3, 2, 24)
    coeffs = solve_radial(prob)
    bounds = validate(prob, coeffs)
    assert bounds.proved
    return prob, coeffs, bounds


def test_positive_profile_is_certified(proved_small):
    prob, coeffs, bounds = proved_small
    rep = check_positive_radial(prob, coeffs, bounds.delta_lower)
    assert isinstance(rep, PositivityReport)
    assert rep.verified, rep.failure
    assert rep.z_far is not None and rep.z_far > 0
    assert rep.boxes >= 1


def test_negated_profile_fails(proved_small):
    # -ubar is strictly negative near the origin, so the bulk bisection
    # must refuse to certify; a False answer with a located failure point.
    prob, coeffs, bounds = proved_small
    rep = check_positive_radial(prob, -coeffs, bounds.delta_lower)
    assert not rep.verified
    assert rep.failure is not None


def test_huge_delta_fails(proved_small):
    # an enormous uncertainty radius swamps the profile; the checker must
    # not certify positivity then.
    prob, coeffs, bounds = proved_small
    rep = check_positive_radial(prob, coeffs, 1e3)
    assert not rep.verified


def test_far_field_threshold_monotone(proved_small):
    # a larger amplitude envelope can only push the far-field threshold out
    prob, coeffs, bounds = proved_small
    prec = prob.precision.validate
    d_iv = Interval.from_exact(float(bounds.delta_lower), prec)
    small = Interval.from_exact(0.5, prec)
    large = Interval.from_exact(50.0, prec)
    z_small = far_field_threshold(prob, small, d_iv, prec)
    z_large = far_field_threshold(prob, large, d_iv, prec)
    assert z_small is not None and z_large is not None
    assert z_small <= z_large


def test_budget_exhaustion_reported(proved_small):
    prob, coeffs, bounds = proved_small
    rep = check_positive_radial(prob, coeffs, bounds.delta_lower, max_boxes=1)
    if not rep.verified:
        assert "budget" in rep.failure
