"""Command-line front end: solve, prove, recheck, export, cache-quadrature.

Exit codes: 0 success (for `prove`: proved), 1 internal error,
2 validation failed (partial certificate still written), 3 bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np


class ConfigError(ValueError):
    pass


# ---------------- problem registry ----------------

def _build_heat(cfg, n, precision):
    from .problems import heat_problem

    d = int(cfg.get("d", 2))
    p = int(cfg.get("p", 3))
    eps = int(cfg.get("eps", -1))
    if d not in (2, 3):
        raise ConfigError(f"heat: d must be 2 or 3, got {d}")
    if p < 2:
        raise ConfigError(f"heat: p must be an integer >= 2, got {p}")
    if eps not in (-1, 1):
        raise ConfigError(f"heat: eps must be +-1, got {eps}")
    return heat_problem(d, p, n, eps=eps, precision=precision)


def _build_schrodinger(cfg, n, precision):
    from .problems import schrodinger_problem

    d = int(cfg.get("d", 2))
    if "p" in cfg and int(cfg["p"]) != 4 // d + 1:
        raise ConfigError(
            f"schrodinger: p is fixed to 4/d + 1 = {4 // d + 1}, got {cfg['p']}")
    omega = Fraction(str(cfg.get("omega", 2)))
    eps = int(cfg.get("eps", 1))
    return schrodinger_problem(d, omega, n, eps=eps, precision=precision)


def _build_fractional(cfg, n, precision):
    from .fractional import fractional_heat_problem

    if "p" in cfg and Fraction(str(cfg["p"])) != Fraction(5, 3):
        if not cfg.get("experimental", False):
            raise ConfigError(
                "fractional: only p = 5/3 is supported without "
                "\"experimental\": true")
    return fractional_heat_problem(n, precision=precision)


def _build_burgers(cfg, n, precision):
    from .burgers import burgers_problem

    return burgers_problem(n, precision=precision)


def _build_nonradial(cfg, n, precision):
    from .polar import nonradial_heat_problem

    return nonradial_heat_problem(n, precision=precision)


_REGISTRY = {
    "heat": (_build_heat, 150),
    "schrodinger": (_build_schrodinger, 300),
    "fractional": (_build_fractional, 600),
    "burgers": (_build_burgers, 400),
    "nonradial": (_build_nonradial, 60),
}


def load_config(args) -> dict:
    cfg = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if getattr(args, "problem", None):
        cfg["problem"] = args.problem
    if getattr(args, "n", None) is not None:
        cfg["n"] = args.n
    if getattr(args, "precision", None) is not None:
        cfg["precision"] = args.precision
    return cfg


def build_problem(cfg: dict):
    from .precision import PrecisionConfig

    kind = cfg.get("problem")
    if kind not in _REGISTRY:
        raise ConfigError(
            f"unknown problem {kind!r}; choose from {sorted(_REGISTRY)}")
    builder, default_n = _REGISTRY[kind]
    n = int(cfg.get("n", default_n))
    if n <= 0:
        raise ConfigError(f"n must be positive, got {n}")
    precision = None
    pc = cfg.get("precision")
    if pc is not None:
        if isinstance(pc, dict):
            precision = PrecisionConfig(**{k: int(v) for k, v in pc.items()})
        else:
            precision = PrecisionConfig(build=int(pc), validate=int(pc))
    try:
        return kind, builder(cfg, n, precision)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


# ---------------- coefficient files ----------------

def save_coefficients(path: Path, problem, coeffs: np.ndarray,
                      tag: str = "") -> None:
    desc = problem.describe()
    lines = [
        "# profilecert coefficient vector",
        f"# family: {desc['family']}",
        f"# name: {desc['name']}",
        f"# n: {len(coeffs) - 1}",
        f"# tag: {tag}",
    ]
    for i, c in enumerate(coeffs):
        lines.append(f"{i} {float(c).hex()}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_coefficient_file(path: Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"coefficient file not found: {path}")
    vals = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        idx, hexval = line.split()
        vals[int(idx)] = float.fromhex(hexval)
    if not vals or sorted(vals) != list(range(len(vals))):
        raise ConfigError(f"malformed coefficient file: {path}")
    return np.array([vals[i] for i in range(len(vals))])


def _solve(kind: str, problem) -> np.ndarray:
    if kind in ("heat", "schrodinger"):
        from .solver import solve_radial
        return solve_radial(problem)
    if kind == "fractional":
        from .solver import solve_fractional
        return solve_fractional(problem)
    if kind == "burgers":
        from .solver import solve_burgers
        return solve_burgers(problem)
    from .polar import solve_nonradial
    return solve_nonradial(problem.tri_n)


# ---------------- subcommands ----------------

def cmd_solve(args) -> int:
    cfg = load_config(args)
    kind, problem = build_problem(cfg)
    out = Path(args.out or f"{problem.describe()['name']}.coeffs")
    if out.exists() and not args.force:
        existing = load_coefficient_file(out)
        print(f"{out} exists with {existing.size} coefficients; "
              "use --force to re-solve")
        return 0
    coeffs = _solve(kind, problem)
    save_coefficients(out, problem, coeffs, tag=kind)
    print(f"solved {problem.describe()['name']}: "
          f"{coeffs.size} coefficients -> {out}")
    return 0


def _positivity(kind: str, problem, coeffs, delta: float):
    if kind == "heat":
        from .positivity import check_positive_radial
        return check_positive_radial(problem, coeffs, delta)
    if kind == "burgers":
        from .positivity import check_positive_burgers
        return check_positive_burgers(problem, coeffs, delta)
    if kind == "fractional":
        from .positivity import check_positive_fractional
        return check_positive_fractional(problem, coeffs, delta)
    raise ConfigError(f"positivity check not available for {kind!r}")


def _print_summary(problem, bounds) -> None:
    rows = [("Y", bounds.y.hi), ("Z11", bounds.z11.hi),
            ("Z12", bounds.z12.hi), ("Z21", bounds.z21.hi),
            ("Z22", bounds.z22.hi), ("Z1", bounds.z1.hi)]
    rows += [(f"Z_{k}", v.hi) for k, v in bounds.zk.items()]
    rows += [("||L A L^-1||", bounds.op_norm.hi), ("sup |u|", bounds.sup_u.hi)]
    name = problem.describe()["name"]
    width = max(len(r[0]) for r in rows)
    print(f"--- bounds for {name} ---")
    for label, v in rows:
        print(f"  {label:<{width}}  {float(v):.10e}")
    if bounds.proved:
        print(f"  status      proved")
        print(f"  delta_lower {bounds.delta_lower:.10e}")
        print(f"  delta_upper {bounds.delta_upper:.10e}")
    else:
        print(f"  status      NOT proved: {bounds.failure}")


def cmd_prove(args) -> int:
    from .validator import validate, write_certificate

    cfg = load_config(args)
    kind, problem = build_problem(cfg)
    if args.coeffs:
        coeffs = load_coefficient_file(args.coeffs)
    else:
        coeffs = _solve(kind, problem)
    bounds = validate(problem, coeffs)
    _print_summary(problem, bounds)
    pos_ok = True
    if args.positivity:
        if bounds.proved:
            report = _positivity(kind, problem, coeffs, bounds.delta_lower)
            pos_ok = report.verified
            print(f"  positivity  {'certified' if pos_ok else 'FAILED'}")
        else:
            pos_ok = False
            print("  positivity  skipped (no certified radius)")
    out = Path(args.out or f"{problem.describe()['name']}.cert.json")
    write_certificate(out, problem, coeffs, bounds)
    print(f"certificate -> {out}")
    return 0 if (bounds.proved and pos_ok) else 2


def cmd_recheck(args) -> int:
    from .validator import recheck_certificate

    path = Path(args.certificate)
    if not path.exists():
        raise ConfigError(f"certificate not found: {path}")
    try:
        cert = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"certificate is not valid JSON: {e}") from e
    ok, report = recheck_certificate(cert)
    for line in report:
        print(line)
    print("recheck:", "PASS" if ok else "FAIL")
    return 0 if ok else 2


def _grid(args, default_max: float):
    rmax = args.rmax if args.rmax is not None else default_max
    npts = args.points
    return np.linspace(0.0, rmax, npts)


def _profile_rows(kind: str, problem, coeffs, args):
    if kind in ("heat", "schrodinger"):
        r = _grid(args, 6.0)
        vals = problem.basis.eval_grid(len(coeffs) - 1, r)
        u = coeffs @ vals.mid()
        return "r,u", np.column_stack([r, u])
    if kind == "burgers":
        from .basis import EvenHermiteBasis
        x = _grid(args, 6.0)
        vals = EvenHermiteBasis(problem.precision.build).eval_grid(
            len(coeffs) - 1, x)
        # stored coefficients live in the Laguerre frame, whose modes
        # differ from the Hermite evaluation by a sign (-1)^m
        sgn = (-1.0) ** np.arange(len(coeffs))
        u = (sgn * coeffs) @ vals.mid()
        return "x,u", np.column_stack([x, u])
    if kind == "fractional":
        from scipy.special import eval_laguerre
        r = _grid(args, 8.0)
        z3 = r * r / 12.0
        cube_root = np.exp(-z3) * sum(
            c * eval_laguerre(m, z3) for m, c in enumerate(coeffs))
        return "r,u", np.column_stack([r, cube_root ** 3])
    from .polar import eval_disk
    rmax = args.rmax if args.rmax is not None else 7.0
    rows = eval_disk(coeffs, problem.tri_n, rmax, args.points,
                     args.angles)
    return "r,theta,u", rows


def cmd_export(args) -> int:
    cfg = load_config(args)
    kind, problem = build_problem(cfg)
    coeffs = load_coefficient_file(args.coeffs)
    out = Path(args.out or f"{problem.describe()['name']}.{args.format}.csv")
    if args.format == "modes-csv":
        header = "mode,eigenvalue,coefficient"
        lines = [f"# {json.dumps(problem.describe(), sort_keys=True)}", header]
        for i, c in enumerate(coeffs):
            lam = float(problem.eigenvalue(i))
            lines.append(f"{i},{lam!r},{float(c)!r}")
    else:
        header, rows = _profile_rows(kind, problem, coeffs, args)
        grid_note = (f"grid: {args.points} points"
                     + (f" x {args.angles} angles" if kind == "nonradial"
                        else ""))
        lines = [f"# {json.dumps(problem.describe(), sort_keys=True)}",
                 f"# {grid_note}", header]
        for row in rows:
            lines.append(",".join(repr(float(v)) for v in row))
    out.write_text("\n".join(lines) + "\n")
    print(f"{args.format} -> {out} ({len(lines)} lines)")
    return 0


def cmd_cache_quadrature(args) -> int:
    from .quadrature import build_rule, cache_dir

    alpha = Fraction(str(args.alpha))
    rule = build_rule(alpha, args.size, prec=args.rule_precision)
    print(f"cached Gauss-Laguerre rule alpha={alpha} size={args.size} "
          f"precision={args.rule_precision} in {cache_dir()}")
    return 0


# ---------------- argument parsing ----------------

def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="profilecert",
        description="Certified self-similar profiles for semilinear "
                    "parabolic equations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON problem configuration")
        p.add_argument("--problem", choices=sorted(_REGISTRY),
                       help="problem family (overrides config)")
        p.add_argument("--n", type=int, help="truncation level")
        p.add_argument("--precision", type=int,
                       help="working precision in bits")
        p.add_argument("--threads", type=int,
                       help="cap numeric library threads")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("solve", help="compute a float coefficient vector")
    common(p)
    p.add_argument("--force", action="store_true",
                   help="overwrite an existing coefficient file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("prove", help="validate and write a certificate")
    common(p)
    p.add_argument("--coeffs", help="coefficient file (otherwise solve first)")
    p.add_argument("--positivity", action="store_true",
                   help="also certify positivity of the solution")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("recheck",
                       help="independently re-verify a certificate")
    p.add_argument("certificate", help="certificate JSON file")
    p.set_defaults(func=cmd_recheck)

    p = sub.add_parser("export", help="write CSV for plotting")
    common(p)
    p.add_argument("--coeffs", required=True, help="coefficient file")
    p.add_argument("--format", choices=("profile-csv", "modes-csv"),
                   default="profile-csv")
    p.add_argument("--rmax", type=float, help="grid end (default per family)")
    p.add_argument("--points", type=int, default=401, help="grid points")
    p.add_argument("--angles", type=int, default=96,
                   help="angular samples (non-radial only)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("cache-quadrature",
                       help="precompute a certified quadrature rule")
    p.add_argument("--alpha", required=True,
                   help="Laguerre exponent (rational, e.g. -1/2)")
    p.add_argument("--size", type=int, required=True, help="number of nodes")
    p.add_argument("--rule-precision", type=int, default=256,
                   help="bits for node certification")
    p.set_defaults(func=cmd_cache_quadrature)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = make_parser().parse_args(argv)
    if getattr(args, "threads", None):
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
