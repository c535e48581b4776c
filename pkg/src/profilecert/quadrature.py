"""Certified generalized Gauss-Laguerre quadrature.

A rule of size N for weight z^a e^{-z} on (0, inf) integrates polynomial
data of total degree <= 2N-1 exactly.  Nodes are the roots of L_N^{(a)},
localized by float Newton from eigenvalue seeds and then certified with an
interval Newton step, so every node is a genuine enclosure.  Weights use

    W_i = Gamma(N+a+1) z_i / (N! (N+1)^2 [L_{N+1}^{(a)}(z_i)]^2).

Integrals against other exponents, ∫ z^a e^{-b z} q(z) dz, reduce to the
same rule by y = b z; :func:`scaled_weight_roots` hands out the per-factor
weights (b^{-a-1} W_i)^{1/m} used when the integrand is a product of m
polynomial factors.

The interval three-term recurrence amplifies widths by ~(1+sqrt(2))^N in
the oscillatory region (it cannot see the rotation that keeps the true
solutions bounded), so the whole pipeline runs at a working precision that
grows linearly with N and the rule is stored at that precision.  Rules are
cached on disk (hex endpoints, content-hashed) because builds are slow.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .basis import gamma_rational, laguerre_seq
from .intervals import Interval, factorial_interval

_GUARD = 32


class QuadratureError(RuntimeError):
    """Root certification or cache integrity failed."""


@dataclass(frozen=True)
class QuadratureRule:
    alpha: Fraction
    size: int
    prec: int
    nodes: List[Interval]      # disjoint, increasing enclosures
    weights: List[Interval]    # positive enclosures

    def degree_budget(self) -> int:
        return 2 * self.size - 1


def working_precision(prec: int, size: int) -> int:
    """Target precision plus the (1+sqrt(2))^N width-amplification guard."""
    return prec + (4 * size) // 3 + 64


def check_degree_budget(total_degree: int, rule: QuadratureRule) -> None:
    if total_degree > rule.degree_budget():
        raise QuadratureError(
            f"integrand degree {total_degree} exceeds rule budget "
            f"{rule.degree_budget()} (N={rule.size})")


def cache_dir() -> Path:
    root = os.environ.get("PROFILECERT_CACHE")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "profilecert"


def _cache_path(alpha: Fraction, n: int, prec: int) -> Path:
    return cache_dir() / f"glag_a{alpha.numerator}_{alpha.denominator}_N{n}_p{prec}.json"


def _laguerre_pair(alpha_f: float, x: mpfr, n: int):
    """(L_{n-1}(x), L_n(x)) in the ambient gmpy2 context."""
    lm1, l = mpfr(1), (1 + alpha_f) - x
    for j in range(1, n):
        lm1, l = l, (((2 * j + alpha_f + 1) - x) * l - (j + alpha_f) * lm1) / (j + 1)
    return lm1, l


def _newton_refine(alpha: Fraction, seed: float, n: int, prec: int) -> mpfr:
    alpha_f = mpfr(alpha.numerator) / alpha.denominator
    x = mpfr(seed)
    # quadratic convergence: float seed reaches full precision in ~4 steps
    for _ in range(12):
        lm1, l = _laguerre_pair(alpha_f, x, n)
        dl = (n * l - (n + alpha_f) * lm1) / x
        step = l / dl
        x = x - step
        if abs(step) < abs(x) * mpfr(2) ** (-(prec - 4)):
            break
    return x


def _interval_lag_triple(alpha: Fraction, z: Interval, n: int):
    """(L_{n-1}, L_n, L_{n+1}) enclosures at z."""
    seq = laguerre_seq(alpha, z, n + 1)
    return seq[n - 1], seq[n], seq[n + 1]


def _certify_node(alpha: Fraction, x: mpfr, n: int, prec: int) -> Interval:
    """Interval Newton: returns an enclosure proven to contain exactly one
    root of L_n^{(a)}."""
    alpha_f = mpfr(alpha.numerator) / alpha.denominator
    delta = abs(x) * mpfr(2) ** (-(prec - 12))
    for _ in range(6):
        z = Interval.from_endpoints(x - delta, x + delta, prec)
        lm1_i, ln_i, _ = _interval_lag_triple(alpha, z, n)
        dl_i = (n * ln_i - (n + alpha_f) * lm1_i) / z
        if dl_i.contains_zero():
            delta *= 16
            continue
        lm1_p, ln_p = _laguerre_pair(alpha_f, x, n)
        k = Interval.from_any(x, prec) - Interval.from_any(ln_p, prec) / dl_i
        if k.lo > z.lo and k.hi < z.hi:
            return k
        delta *= 16
    raise QuadratureError(f"could not certify node near {float(x)}")


def build_rule(alpha: Fraction, size: int, prec: int = 256,
               use_cache: bool = True) -> QuadratureRule:
    alpha = Fraction(alpha)
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    if use_cache:
        cached = _load_cached(alpha, size, prec)
        if cached is not None:
            return cached

    from .solver import laguerre_nodes

    seeds = laguerre_nodes(size, float(alpha))

    work = working_precision(prec, size)
    old = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=work + _GUARD))
    try:
        refined = [_newton_refine(alpha, s, size, work) for s in seeds]
        nodes = [_certify_node(alpha, x, size, work) for x in refined]
    finally:
        gmpy2.set_context(old)

    for a, b in zip(nodes, nodes[1:]):
        if not a.hi < b.lo:
            raise QuadratureError("node enclosures overlap: roots not separated")
    if nodes[0].lo <= 0:
        raise QuadratureError("nonpositive node enclosure")

    c = (gamma_rational(size + alpha + 1, work)
         / factorial_interval(size, work) / ((size + 1) ** 2))
    weights = []
    for z in nodes:
        _, _, lnp1 = _interval_lag_triple(alpha, z, size)
        w = c * z / lnp1.sq()
        if not w.lo > 0:
            raise QuadratureError("weight enclosure not positive")
        weights.append(w)

    rule = QuadratureRule(alpha, size, work, nodes, weights)
    if use_cache:
        _store_cached(rule)
    return rule


def scaled_weight_roots(rule: QuadratureRule, beta: Fraction,
                        arity: int) -> List[Interval]:
    """Per-factor weights (b^{-a-1} W_i)^{1/arity} for ∫ z^a e^{-bz} (m-fold
    polynomial product) dz evaluated at the scaled nodes z_i/b."""
    beta = Fraction(beta)
    prec = rule.prec
    scale = Interval.from_fraction(beta, prec).pow_rational(-(rule.alpha + 1))
    inv_arity = Fraction(1, arity)
    return [(scale * w).pow_rational(inv_arity) for w in rule.weights]


def scaled_nodes(rule: QuadratureRule, beta: Fraction) -> List[Interval]:
    b = Interval.from_fraction(Fraction(beta), rule.prec)
    return [z / b for z in rule.nodes]


# ---------------- disk cache ----------------

def _payload(rule: QuadratureRule) -> dict:
    return {
        "alpha": [rule.alpha.numerator, rule.alpha.denominator],
        "size": rule.size,
        "prec": rule.prec,
        "nodes": [z.to_hex_pair() for z in rule.nodes],
        "weights": [w.to_hex_pair() for w in rule.weights],
    }


def _digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _store_cached(rule: QuadratureRule) -> None:
    path = _cache_path(rule.alpha, rule.size, rule.prec)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = _payload(rule)
    payload["sha256"] = _digest(payload)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.replace(path)


def _load_cached(alpha: Fraction, size: int, prec: int) -> Optional[QuadratureRule]:
    path = _cache_path(alpha, size, working_precision(prec, size))
    if not path.exists():
        return None
    data = json.loads(path.read_text())
    digest = data.pop("sha256", None)
    if digest != _digest(data):
        raise QuadratureError(f"corrupt quadrature cache: {path}")
    work = int(data["prec"])
    nodes = [Interval.from_hex_pair(p, work) for p in data["nodes"]]
    weights = [Interval.from_hex_pair(p, work) for p in data["weights"]]
    return QuadratureRule(alpha, size, work, nodes, weights)
