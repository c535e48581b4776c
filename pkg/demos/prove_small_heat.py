"""End-to-end demo: solve, validate, and certify a small radial profile.

Runs the full pipeline for the d=3 quadratic heat profile at a small
truncation (n=24), prints the bound ledger, certifies positivity, writes a
certificate, and rechecks it.  Takes a few seconds.
"""

import json
from pathlib import Path

import numpy as np

from profilecert.positivity import check_positive_radial
from profilecert.problems import heat_problem
from profilecert.solver import solve_radial
from profilecert.validator import load_coefficients, recheck_certificate, validate, write_certificate

N = 24
OUT = Path("/tmp/demo_heat_cert.json")

prob = heat_problem(3, 2, N)
coeffs = solve_radial(prob)
res = prob.float_residual(coeffs, prob.float_vandermonde())
print(f"solved: n={N}, first coefficient {coeffs[0]:.6f}, "
      f"numeric residual {np.max(np.abs(res)):.2e}")

bounds = validate(prob, coeffs)
print(f"Y  = {float(bounds.y.hi):.3e}")
print(f"Z1 = {float(bounds.z1.hi):.4f}")
for k, zk in sorted(bounds.zk.items()):
    print(f"Z{k} = {float(zk.hi):.4f}")
print(f"proved: {bounds.proved}")
print(f"delta_lower = {bounds.delta_lower:.3e}")
print(f"delta_upper = {bounds.delta_upper:.3e}")
assert bounds.proved

pos = check_positive_radial(prob, coeffs, bounds.delta_lower)
print(f"positivity certified: {pos.verified} "
      f"(far-field threshold z = {pos.z_far:.3f}, {pos.boxes} boxes)")
assert pos.verified

write_certificate(OUT, prob, coeffs, bounds)
cert = json.loads(OUT.read_text())
ok, report = recheck_certificate(cert)
print(f"certificate recheck: ok={ok}")
assert ok
assert np.array_equal(load_coefficients(cert), coeffs)
print(f"certificate written to {OUT}")
