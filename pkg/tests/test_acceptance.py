"""Acceptance suite: one test per headline requirement, each printing a
single pass/fail line.  The heavy profiles are loaded from the shipped
coefficient artifacts and re-validated from scratch; nothing here trusts
stored bounds.
"""

import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from profilecert.cli import load_coefficient_file
from profilecert.embeddings import weight_normalization
from profilecert.intervals import Interval
from profilecert.problems import heat_problem, schrodinger_problem
from profilecert.validator import (
    _eval_p,
    certificate_dict,
    recheck_certificate,
    solve_radii,
    validate,
)

ART = Path(__file__).resolve().parent.parent / "artifacts"


def art(name: str) -> np.ndarray:
    return load_coefficient_file(ART / name)


def report(label: str, ok: bool, detail: str) -> None:
    print(f"[{label}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


# ------------------------------------------------------------------
# 1. radial heat, d = 3, p = 2, n = 150
# ------------------------------------------------------------------

def test_criterion_1_heat_d3_p2():
    t0 = time.monotonic()
    prob = heat_problem(3, 2, 150)
    from profilecert.solver import solve_radial
    coeffs = solve_radial(prob)
    b = validate(prob, coeffs)
    elapsed = time.monotonic() - t0
    z2 = float(b.zk[Fraction(2)].hi)
    ok = (b.proved and float(b.z1.hi) <= 0.05
          and 8.52 <= z2 <= 34.08
          and b.delta_lower <= 1e-10
          and elapsed <= 600.0)
    report("criterion 1", ok,
           f"proved={b.proved} Z1={float(b.z1.hi):.4f} Z2={z2:.3f} "
           f"delta_lower={b.delta_lower:.3e} time={elapsed:.0f}s")


# ------------------------------------------------------------------
# 2. radial heat, d = 2, p = 3, n = 300, with positivity
# ------------------------------------------------------------------

def test_criterion_2_heat_d2_p3():
    from profilecert.positivity import check_positive_radial

    prob = heat_problem(2, 3, 300)
    coeffs = art("heat_d2_p3_n300.coeffs")
    b = validate(prob, coeffs)
    z2 = float(b.zk[Fraction(2)].hi)
    z3 = float(b.zk[Fraction(3)].hi)
    pos = (check_positive_radial(prob, coeffs, b.delta_lower)
           if b.proved else None)
    ok = (b.proved and float(b.z1.hi) <= 0.05
          and 85 <= z2 <= 341 and 360 <= z3 <= 1439
          and b.delta_lower <= 1e-8
          and pos is not None and pos.verified)
    report("criterion 2", ok,
           f"proved={b.proved} Z1={float(b.z1.hi):.4f} Z2={z2:.2f} "
           f"Z3={z3:.2f} delta_lower={b.delta_lower:.3e} "
           f"positive={pos.verified if pos else False}")


# ------------------------------------------------------------------
# 3. fractional exponent p = 5/3, n <= 600, with positivity
# ------------------------------------------------------------------

def test_criterion_3_fractional():
    from profilecert.fractional import fractional_heat_problem
    from profilecert.positivity import check_positive_fractional

    prob = fractional_heat_problem(600)
    qcoeffs = art("fractional_n600.coeffs")
    b = validate(prob, qcoeffs)
    zf = float(b.zk[Fraction(5, 3)].hi)
    pos = (check_positive_fractional(prob, qcoeffs, b.delta_lower)
           if b.proved else None)
    ok = (b.proved and 9.8 <= zf <= 39.2 and b.delta_lower <= 1e-8
          and pos is not None and pos.verified)
    report("criterion 3", ok,
           f"proved={b.proved} Z_5/3={zf:.3f} "
           f"delta_lower={b.delta_lower:.3e} "
           f"positive={pos.verified if pos else False}")


# ------------------------------------------------------------------
# 4. Schrodinger d = 2, focusing, omega = 2, n = 300
# ------------------------------------------------------------------

def test_criterion_4_schrodinger():
    prob = schrodinger_problem(2, Fraction(2), 300)
    coeffs = art("schrodinger_d2_w2_n300.coeffs")
    b = validate(prob, coeffs)
    eta = None
    if b.proved:
        z = weight_normalization(2, 128)
        eta = float((7 * z).sqrt().hi) / 2 * b.delta_lower
    ok = (b.proved and float(b.z1.hi) <= 0.08
          and eta is not None and eta <= 1e-4)
    report("criterion 4", ok,
           f"proved={b.proved} Z1={float(b.z1.hi):.4f} "
           f"delta_lower={b.delta_lower if b.proved else float('nan'):.3e} "
           f"eta={eta}")


# ------------------------------------------------------------------
# 5. half-line advection profile, n = 400, with positivity
# ------------------------------------------------------------------

def test_criterion_5_advection():
    from profilecert.burgers import burgers_problem
    from profilecert.positivity import check_positive_burgers

    prob = burgers_problem(400)
    coeffs = art("burgers_n400.coeffs")
    b = validate(prob, coeffs)
    z3 = float(b.zk[Fraction(3)].hi)
    pos = (check_positive_burgers(prob, coeffs, b.delta_lower)
           if b.proved else None)
    ok = (b.proved and float(b.z1.hi) <= 0.2
          and 278 <= z3 <= 1113
          and b.delta_upper >= 5e-4
          and pos is not None and pos.verified)
    report("criterion 5", ok,
           f"proved={b.proved} Z1={float(b.z1.hi):.4f} Z3={z3:.2f} "
           f"delta_upper={b.delta_upper if b.proved else float('nan'):.3e} "
           f"positive={pos.verified if pos else False}")


# ------------------------------------------------------------------
# 6. non-radial planar profile, n = 60: the contraction does not close
#    at this truncation level, and the failure must be sharp - the
#    quadratic terms keep Z22 < 1 and the radii polynomial bottoms out
#    within a factor 10 of Y, so only the residual stands in the way.
# ------------------------------------------------------------------

def test_criterion_6_nonradial_sharp_failure():
    from profilecert.polar import nonradial_heat_problem
    from profilecert.validator import compute_bounds

    prob = nonradial_heat_problem(60)
    coeffs = art("nonradial_n60.coeffs")
    b = compute_bounds(prob, coeffs)
    b = solve_radii(b, prob.precision.validate)
    y = float(b.y.hi)
    prec = prob.precision.validate
    min_p = min(
        float(_eval_p(b, Interval.from_exact(x, prec), prec).hi)
        for x in np.geomspace(1e-4, 0.5, 400))
    if b.proved:
        ok = b.delta_lower <= 5e-2
        report("criterion 6", ok,
               f"proved delta_lower={b.delta_lower:.3e}")
    else:
        ok = float(b.z22.hi) < 1 and float(b.z1.hi) < 1 and min_p <= 10 * y
        report("criterion 6", ok,
               f"honest failure: Y={y:.4e} Z1={float(b.z1.hi):.4f} "
               f"Z22={float(b.z22.hi):.4f} min P={min_p:.4e} "
               f"(within {min_p / y:.2f}x of Y)")


# ------------------------------------------------------------------
# 7. basis orthonormality at 256-bit precision + random polynomial
#    products against exact rational oracles
# ------------------------------------------------------------------

def test_criterion_7_orthonormality_and_quadrature():
    from profilecert.basis import gamma_rational, laguerre_seq
    from profilecert.intervals import iv_sum
    from profilecert.quadrature import build_rule

    prec = 256
    worst_width = 0.0
    worst_err = 0.0
    for d in (2, 3):
        alpha = Fraction(d, 2) - 1
        rule = build_rule(alpha, 52, prec)
        nf = [(gamma_rational(Fraction(m + 1), prec)
               / gamma_rational(m + alpha + 1, prec)).sqrt()
              for m in range(51)]
        cols = []
        for z, w in zip(rule.nodes, rule.weights):
            lag = laguerre_seq(alpha, z, 50)
            cols.append([lag[i] for i in range(51)] + [w])
        for i in range(51):
            for j in range(i, 51):
                s = iv_sum((c[-1] * c[i] * c[j] for c in cols), prec)
                s = s * nf[i] * nf[j]
                target = 1.0 if i == j else 0.0
                assert float(s.lo) <= target <= float(s.hi), (d, i, j)
                width = float(s.hi) - float(s.lo)
                worst_width = max(worst_width, width)
                worst_err = max(worst_err, abs(float(s.hi) - target))
    assert worst_width <= 1e-30

    # random rational polynomial products, exact Gamma-moment oracle
    rng = np.random.default_rng(42)
    contained = 0
    total = 1000
    for trial in range(total):
        d = 2 if trial % 2 == 0 else 3
        alpha = Fraction(d, 2) - 1
        rule = build_rule(alpha, 52, prec)
        deg = int(rng.integers(0, 7))
        c1 = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
              for _ in range(deg + 1)]
        deg2 = int(rng.integers(0, 7))
        c2 = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
              for _ in range(deg2 + 1)]
        # product coefficients, exact rationals
        pc = [Fraction(0)] * (deg + deg2 + 1)
        for a_i, ca in enumerate(c1):
            for b_i, cb in enumerate(c2):
                pc[a_i + b_i] += ca * cb
        # oracle: sum_k pc_k Gamma(alpha + k + 1)
        #       = Gamma(alpha + 1) * sum_k pc_k prod_{j=1..k} (alpha + j)
        rat = Fraction(0)
        rising = Fraction(1)
        for k, c in enumerate(pc):
            if k > 0:
                rising *= alpha + k
            rat += c * rising
        oracle = gamma_rational(alpha + 1, prec) * Interval.from_fraction(
            rat, prec)
        val = iv_sum(
            (w * iv_sum((Interval.from_fraction(c, prec) * z ** k
                         for k, c in enumerate(pc)), prec)
             for z, w in zip(rule.nodes, rule.weights)), prec)
        if float(val.lo) <= float(oracle.hi) and \
                float(oracle.lo) <= float(val.hi):
            contained += 1
    report("criterion 7", worst_width <= 1e-30 and contained == total,
           f"orthonormality width<={worst_width:.2e} "
           f"random products contained {contained}/{total}")


# ------------------------------------------------------------------
# 8. invariant suite: inclusion monotonicity, envelope vs dense
#    sampling, closed-form radii, certificate recheck, monotone
#    soundness under bound inflation
# ------------------------------------------------------------------

def test_criterion_8_invariants():
    prec = 128

    # (a) inclusion monotonicity of interval arithmetic
    a = Interval.from_endpoints(1, 2, prec)
    a_wide = Interval.from_endpoints(Fraction(1, 2), 3, prec)
    b = Interval.from_endpoints(-1, 1, prec)
    assert (a * b).is_subset(a_wide * b)
    assert (a + b).is_subset(a_wide + b)

    # (b) decay envelope vs dense sampling (10^4 points)
    from profilecert.basis import RadialBasis
    for d in (2, 3):
        basis = RadialBasis(d)
        r = np.linspace(0.0, 30.0, 10_000)
        for m in (0, 3, 11):
            vals = basis.eval_grid(m, r)
            env = float(basis.decay_envelope(m).hi)
            bound = env * np.exp(-r * r / 8.0)
            mags = np.maximum(np.abs(vals.inf[m]), np.abs(vals.sup[m]))
            assert np.all(mags <= bound * (1 + 1e-7) + env * 1e-12)

    # (c) closed-form linear radii: delta_lower -> Y / (1 - Z1)
    from tests.test_validator import make_bounds
    y, z1 = 1e-9, 0.5
    sol = solve_radii(make_bounds(y, z1), prec)
    assert sol.proved and abs(sol.delta_lower - y / (1 - z1)) < 1e-11

    # (d) certificate write + independent recheck
    prob = heat_problem(3, 2, 24)
    from profilecert.solver import solve_radial
    coeffs = solve_radial(prob)
    bset = validate(prob, coeffs)
    cert = json.loads(json.dumps(certificate_dict(prob, coeffs, bset)))
    ok, _ = recheck_certificate(cert)
    assert ok
    cert["bounds"]["Z1"] = 2.0
    ok, _ = recheck_certificate(cert)
    assert not ok

    # (e) monotone soundness: inflating Y can only grow the radius and
    # eventually break the proof, never the reverse
    deltas = []
    proved_flags = []
    for f in (1.0, 10.0, 1e3, 1e6, 1e9):
        s = solve_radii(make_bounds(1e-9 * f, 0.5, {2: 1e4}), prec)
        proved_flags.append(s.proved)
        deltas.append(s.delta_lower if s.proved else math.inf)
    assert all(x <= y_ for x, y_ in zip(deltas, deltas[1:]))
    assert proved_flags == sorted(proved_flags, reverse=True)

    report("criterion 8", True,
           "inclusion monotonicity, envelope sampling, closed-form radii, "
           "certificate recheck, inflation soundness")
