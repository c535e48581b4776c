"""Floating-point Newton solver for the spectral Galerkin systems.

Nothing here is rigorous: the solver only has to land close enough to a true
zero for the a-posteriori validation to close.  Quadrature nodes come from
scipy, the basis is evaluated with scipy's generalized Laguerre routines, and
the seed is a one-mode amplitude solve followed by continuation in the
truncation level n.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln


def laguerre_nodes(size: int, alpha: float) -> np.ndarray:
    """Gauss-Laguerre nodes via the Jacobi-matrix eigenvalues.

    scipy's roots_genlaguerre Newton-polishes with unscaled polynomial
    values and returns NaN nodes beyond z ~ 1400, so it is unusable for
    large rules.
    """
    j = np.arange(size)
    diag = 2.0 * j + alpha + 1.0
    off = np.sqrt((j[1:]) * (j[1:] + alpha))
    return eigh_tridiagonal(diag, off, eigvals_only=True)


class SolverError(RuntimeError):
    pass


_LOG2E = float(np.log2(np.e))


def _scaled_laguerre_columns(a: float, z: np.ndarray, n: int):
    """(sign, log2 magnitude) of L_j^{(a)}(z_i) for j = 0..n.

    The raw values overflow binary64 in the growth region z > 4j, so the
    three-term recurrence carries a per-node power-of-two exponent.
    """
    size = z.size
    sign = np.empty((size, n + 1))
    logmag = np.full((size, n + 1), -np.inf)
    prev = np.zeros(size)          # L_{j-1}
    cur = np.ones(size)            # L_j
    expo = np.zeros(size)
    for j in range(n + 1):
        nz = cur != 0
        sign[:, j] = np.where(cur >= 0, 1.0, -1.0)
        logmag[nz, j] = np.log2(np.abs(cur[nz])) + expo[nz]
        prev, cur = cur, (((2 * j + a + 1) - z) * cur - (j + a) * prev) / (j + 1)
        big = np.abs(cur) > 1e150
        if big.any():
            prev[big] *= 2.0 ** -500
            cur[big] *= 2.0 ** -500
            expo[big] += 500.0
    return sign, logmag


def log2_weights(size: int, a: float):
    """Nodes and log2 of the Gauss-Laguerre weights
    W_i = Gamma(N+a+1) z_i / (N! (N+1)^2 L_{N+1}(z_i)^2)."""
    z = laguerre_nodes(size, a)
    _, lag_np1 = _scaled_laguerre_columns(a, z, size + 1)
    log_w = ((gammaln(size + a + 1) - gammaln(size + 1)) * _LOG2E
             - 2.0 * np.log2(size + 1.0) + np.log2(z)
             - 2.0 * lag_np1[:, size + 1])
    return z, log_w


def float_share_matrix(beta, arg, share, ncols: int, size: int,
                       a: float = 0.0) -> np.ndarray:
    """Entries (beta^{-1} W_i)^{share} L_j(y_i arg), float64 via log2.

    Mirror of the non-uniform weight split used on the rigorous path for
    integrands whose factors have unequal growth.
    """
    y, log_w = log2_weights(size, a)
    log_ws = (log_w - np.log2(float(beta))) * float(share)
    sign, logmag = _scaled_laguerre_columns(a, y * float(arg), ncols - 1)
    return sign * np.exp2(logmag + log_ws[:, None])


def float_node_matrix(alpha: Fraction, beta: Fraction, arity,
                      n: int, size: int) -> np.ndarray:
    """Float mirror of the certified scaled-weight Vandermonde:
    rows w_i^{1/arity} nf_j L_j^{(alpha)}(z_i/beta).

    Assembled in log2 space: Gauss-Laguerre weights underflow (~e^{-z_i})
    and high-degree Laguerre values overflow for the same nodes, while
    their product is tame.
    """
    a = float(alpha)
    b = float(beta)
    arity = float(arity)
    z, log_w = log2_weights(size, a)
    log_wroot = (log_w - (a + 1.0) * np.log2(b)) / arity

    cols = np.arange(n + 1)
    log_nf = 0.5 * (gammaln(cols + 1) - gammaln(cols + 1 + a)) * _LOG2E
    sign, logmag = _scaled_laguerre_columns(a, z / b, n)
    out = sign * np.exp2(logmag + log_wroot[:, None] + log_nf[None, :])
    return out


def _powp(f, p):
    """Real-branch f^p: sign(f) |f|^p (matches x^{q/s} with odd s)."""
    if float(p) == int(p):
        return f ** int(p)
    return np.sign(f) * np.abs(f) ** float(p)


def _galerkin_residual(a, v, lam, c_lin, kappa, p):
    f = v @ a
    t = v.T @ _powp(f, p)
    return a - (c_lin * a + kappa * t) / lam


def _galerkin_jacobian(a, v, lam, c_lin, kappa, p):
    n1 = a.size
    f = v @ a
    fp = np.abs(f) ** float(p - 1) if float(p) != int(p) else f ** (int(p) - 1)
    g = v.T @ (fp[:, None] * v)
    return np.eye(n1) - (c_lin * np.eye(n1) + float(p) * kappa * g) / lam[:, None]


def newton(a0: np.ndarray, v: np.ndarray, lam: np.ndarray,
           c_lin: float, kappa: float, p: int,
           tol: float = 5e-14, maxit: int = 60) -> np.ndarray:
    """Damped Newton iteration; raises SolverError on stagnation."""
    a = a0.copy()
    res = _galerkin_residual(a, v, lam, c_lin, kappa, p)
    nrm = np.linalg.norm(res)
    for _ in range(maxit):
        if nrm < tol:
            return a
        jac = _galerkin_jacobian(a, v, lam, c_lin, kappa, p)
        step = np.linalg.solve(jac, res)
        damp = 1.0
        while damp > 1e-4:
            trial = a - damp * step
            tres = _galerkin_residual(trial, v, lam, c_lin, kappa, p)
            tnrm = np.linalg.norm(tres)
            if tnrm < nrm or tnrm < tol:
                a, res, nrm = trial, tres, tnrm
                break
            damp *= 0.5
        else:
            raise SolverError(f"line search stalled at residual {nrm:.3e}")
    if nrm < 1e-11:
        return a
    raise SolverError(f"Newton did not converge: residual {nrm:.3e}")


def _one_mode_seed(alpha, beta_res, c_lin, kappa, sigma, p, d) -> float:
    """Amplitude a0 with a0 = (c_lin a0 + kappa I a0^p)/lambda0 where
    I = <psi0, e^{sigma z} psi0^p>."""
    v = float_node_matrix(alpha, beta_res, p + 1, 0, max(int(p) + 2, 4))
    quad = float(np.sum(v[:, 0] ** (p + 1)))
    lam0 = d / 2.0
    rhs = (lam0 - c_lin) / (kappa * quad)
    if rhs > 0:
        return rhs ** (1.0 / (p - 1))
    if p % 2 == 1:
        # odd p: a negative-amplitude branch exists instead
        return -abs(rhs) ** (1.0 / (p - 1))
    raise SolverError("no real one-mode amplitude for these parameters")


def solve_radial(problem, seed: Optional[np.ndarray] = None,
                 start_n: int = 8) -> np.ndarray:
    """Newton with continuation in n for a RadialPolyProblem; returns the
    coefficient vector at the problem's truncation level."""
    alpha = problem.basis.alpha
    c_lin = float(problem.c_lin)
    kappa = float(problem.kappa)
    p = problem.p
    beta = problem.beta_res

    levels = []
    n = min(start_n, problem.n)
    while n < problem.n:
        levels.append(n)
        n *= 2
    levels.append(problem.n)

    if seed is None:
        a0 = _one_mode_seed(alpha, beta, c_lin, kappa,
                            float(problem.sigma), p, problem.d)
        # a coarse start level keeps the one-mode seed inside the Newton
        # basin for stiff families; retry coarser if the line search stalls
        start = levels[0]
        while True:
            try:
                a = np.zeros(start + 1)
                a[0] = a0
                v = float_node_matrix(alpha, beta, p + 1, start,
                                      int(p * start) + 1)
                lam = problem.d / 2.0 + np.arange(start + 1, dtype=float)
                a = newton(a, v, lam, c_lin, kappa, p)
                break
            except SolverError:
                if start <= 1:
                    raise
                start //= 2
        levels = [lv for lv in levels if lv > start]
        if not levels:
            levels = [problem.n]
    else:
        a = np.asarray(seed, dtype=float).copy()
        levels = [lv for lv in levels if lv + 1 >= a.size] or [problem.n]

    for lv in levels:
        if a.size < lv + 1:
            a = np.concatenate([a, np.zeros(lv + 1 - a.size)])
        elif a.size > lv + 1:
            a = a[:lv + 1]
        v = float_node_matrix(alpha, beta, p + 1, lv, int(p * lv) + 1)
        lam = problem.d / 2.0 + np.arange(lv + 1, dtype=float)
        a = newton(a, v, lam, c_lin, kappa, p)
    return a


def _scaled_laguerre_columns_ld(a: float, z: np.ndarray, n: int):
    """Extended-precision variant of _scaled_laguerre_columns (same layout)."""
    size = z.size
    one = np.longdouble(1.0)
    sign = np.empty((size, n + 1), dtype=np.longdouble)
    logmag = np.full((size, n + 1), -np.inf, dtype=np.longdouble)
    prev = np.zeros(size, dtype=np.longdouble)
    cur = np.ones(size, dtype=np.longdouble)
    expo = np.zeros(size, dtype=np.longdouble)
    for j in range(n + 1):
        nz = cur != 0
        sign[:, j] = np.where(cur >= 0, one, -one)
        logmag[nz, j] = np.log2(np.abs(cur[nz])) + expo[nz]
        prev, cur = cur, (((2 * j + a + 1) - z) * cur - (j + a) * prev) / (j + 1)
        big = np.abs(cur) > np.longdouble(1e150)
        if big.any():
            prev[big] *= np.longdouble(2.0) ** -500
            cur[big] *= np.longdouble(2.0) ** -500
            expo[big] += 500.0
    return sign, logmag


def _interval_mid_ld(x) -> np.longdouble:
    """Midpoint of a certified Interval as a two-float longdouble split."""
    m = x.mid()
    hi = float(m)
    lo = float(m - hi)
    return np.longdouble(hi) + np.longdouble(lo)


def rule_share_matrix_ld(rule, beta, arg, share, ncols: int) -> np.ndarray:
    """float_share_matrix rebuilt from a certified rule in extended precision.

    The binary64 Golub-Welsch nodes carry absolute errors ~1e-10 at the
    large-z end of big rules, which biases polished residuals around 1e-7
    in the eigenvalue-weighted norm; the certified nodes remove that bias.
    """
    import gmpy2

    y = np.array([_interval_mid_ld(z) for z in rule.nodes],
                 dtype=np.longdouble)
    log_w = np.array([float(gmpy2.log2(w.mid())) for w in rule.weights],
                     dtype=np.longdouble)
    log_ws = (log_w - np.longdouble(np.log2(float(beta)))) \
        * np.longdouble(float(share))
    sign, logmag = _scaled_laguerre_columns_ld(float(rule.alpha),
                                               y * np.longdouble(float(arg)),
                                               ncols - 1)
    return sign * np.exp2(logmag + log_ws[:, None])


def _halfline_mats(n: int, size: int):
    """Float mirrors of the half-line advection node matrices: mode values
    nf_j L_j^{(-1/2)}(z/3) and z-derivatives -nf_j L_{j-1}^{(1/2)}(z/3) on
    the alpha = 0 rule, each carrying a quarter share of (W_i/3)."""
    z, log_w = log2_weights(size, 0.0)
    log_ws = (log_w - np.log2(3.0)) * 0.25
    cols = np.arange(n + 1)
    log_nf = 0.5 * (gammaln(cols + 1) - gammaln(cols + 0.5)) * _LOG2E
    zz = z / 3.0
    sv, lv = _scaled_laguerre_columns(-0.5, zz, n)
    vpsi = sv * np.exp2(lv + log_ws[:, None] + log_nf[None, :])
    vd = np.zeros_like(vpsi)
    if n >= 1:
        sd, ld = _scaled_laguerre_columns(0.5, zz, n - 1)
        vd[:, 1:] = -sd * np.exp2(ld + log_ws[:, None] + log_nf[None, 1:])
    return vpsi, vd


def _advection_residual(a, vpsi, vd, lam):
    f = vpsi @ a
    fd = vd @ a
    t = vpsi.T @ (f * f * (fd - f))
    return a - (0.25 * a - t) / lam


def _advection_jacobian(a, vpsi, vd, lam):
    f = vpsi @ a
    fd = vd @ a
    m = vpsi.T @ ((2.0 * f * fd - 3.0 * f * f)[:, None] * vpsi) \
        + vpsi.T @ ((f * f)[:, None] * vd)
    n1 = a.size
    return np.eye(n1) - (0.25 * np.eye(n1) - m) / lam[:, None]


def solve_burgers(problem, start_n: int = 8) -> np.ndarray:
    """Damped Newton with continuation in n for the half-line advection
    problem.  One-mode seed: lam0 a0 = a0/4 + nf0^4 a0^3 / 3 gives
    a0 = sqrt(3 pi) / 2 on the positive branch."""
    a0 = np.sqrt(3.0 * np.pi) / 2.0

    levels = []
    lv = min(start_n, problem.n)
    while lv < problem.n:
        levels.append(lv)
        lv *= 2
    levels.append(problem.n)

    a = np.array([a0])
    for lv in levels:
        if a.size < lv + 1:
            a = np.concatenate([a, np.zeros(lv + 1 - a.size)])
        vpsi, vd = _halfline_mats(lv, 2 * lv + 1)
        lam = 0.5 + np.arange(lv + 1, dtype=float)
        res = _advection_residual(a, vpsi, vd, lam)
        nrm = np.linalg.norm(res)
        for _ in range(80):
            if nrm < 5e-14:
                break
            jac = _advection_jacobian(a, vpsi, vd, lam)
            step = np.linalg.solve(jac, res)
            damp = 1.0
            while damp > 1e-4:
                trial = a - damp * step
                tres = _advection_residual(trial, vpsi, vd, lam)
                tnrm = np.linalg.norm(tres)
                if tnrm < nrm or tnrm < 5e-14:
                    a, res, nrm = trial, tres, tnrm
                    break
                damp *= 0.5
            else:
                raise SolverError(
                    f"line search stalled at residual {nrm:.3e} (n={lv})")
        if not nrm < 1e-11:
            raise SolverError(f"Newton did not converge at n={lv}: {nrm:.3e}")
    return a


def _cbrt_projection(u: np.ndarray, nq: int, size: int) -> np.ndarray:
    """Coefficients of q with q(s) ~ P(3s)^{1/3}, P = sum u_m L_m, by
    Gauss-Laguerre projection of the real cube root."""
    s, log_w = log2_weights(size, 0.0)
    sgn, logmag = _scaled_laguerre_columns(0.0, 3.0 * s, u.size - 1)
    # log-sum-exp for P(3s): the top-degree terms dominate at large s
    ref = np.max(logmag + np.log2(np.maximum(np.abs(u), 1e-300))[None, :],
                 axis=1)
    pv = np.sum(sgn * u[None, :] * np.exp2(logmag - ref[:, None]), axis=1)
    log_p = np.log2(np.abs(pv) + 1e-300) + ref
    sign_p = np.sign(pv)
    sgn_l, logmag_l = _scaled_laguerre_columns(0.0, s, nq)
    contrib = sgn_l * sign_p[:, None] * np.exp2(
        logmag_l + (log_p / 3.0 + log_w)[:, None])
    return contrib.sum(axis=0)


def solve_fractional(problem, start_n: int = 9, polish_iters: int = 30,
                     tol: float = 1e-13) -> np.ndarray:
    """Cube-root candidate for the p = 5/3 problem: continuation solve of
    the u-space Galerkin system, cube-root projection onto the q basis,
    then Gauss-Newton on the u-space residual as a function of q."""
    n = problem.n
    nq = problem.nq
    p = Fraction(5, 3)
    c_lin = float(problem.c_lin)
    kappa = float(problem.kappa)

    levels = []
    lv = min(start_n, n)
    while lv < n:
        levels.append(lv)
        lv *= 2
    levels.append(n)
    a = np.zeros(levels[0] + 1)
    v0 = float_node_matrix(Fraction(0), p, p + 1, 0, 8)
    quad = float(np.sum(v0[:, 0] ** (8.0 / 3.0)))
    a[0] = ((1.0 - c_lin) / (kappa * quad)) ** 1.5
    for lv in levels:
        if a.size < lv + 1:
            a = np.concatenate([a, np.zeros(lv + 1 - a.size)])
        v = float_node_matrix(Fraction(0), p, p + 1, lv, int(p * lv) + 1)
        lam = 1.0 + np.arange(lv + 1, dtype=float)
        a = newton(a, v, lam, c_lin, kappa, p)

    aq = _cbrt_projection(a, nq, problem.rule_size)

    # Gauss-Newton: R_j(aq) = u_j - (c_lin u_j + kappa t_j) / lambda_j
    size = problem.rule_size
    vpsi1 = float_share_matrix(1, 1, 0.5, n + 1, size)
    vq1 = float_share_matrix(1, Fraction(1, 3), Fraction(1, 6), nq + 1, size)
    vpsi53 = float_share_matrix(Fraction(5, 3), Fraction(3, 5),
                                Fraction(3, 8), n + 1, size)
    vq53 = float_share_matrix(Fraction(5, 3), Fraction(1, 5),
                              Fraction(1, 8), nq + 1, size)
    lam = problem.lambdas_float()

    def resid(aq):
        f1 = vq1 @ aq
        u = vpsi1.T @ (f1 ** 3)
        f5 = vq53 @ aq
        t = vpsi53.T @ (f5 ** 5)
        return u - (c_lin * u + kappa * t) / lam, f1, f5

    # The certificate's Y weights mode j by lambda_j, so the least-squares
    # polish minimizes the lambda-weighted residual.  The binary64
    # Golub-Welsch nodes of the polish rule bias that norm around 1e-7, so
    # the residual is re-evaluated on the certified nodes in extended
    # precision while the steps stay in binary64.
    rule = problem.rule
    vpsi1_l = rule_share_matrix_ld(rule, 1, 1, 0.5, n + 1)
    vq1_l = rule_share_matrix_ld(rule, 1, Fraction(1, 3), Fraction(1, 6),
                                 nq + 1)
    vpsi53_l = rule_share_matrix_ld(rule, Fraction(5, 3), Fraction(3, 5),
                                    Fraction(3, 8), n + 1)
    vq53_l = rule_share_matrix_ld(rule, Fraction(5, 3), Fraction(1, 5),
                                  Fraction(1, 8), nq + 1)
    lam_l = lam.astype(np.longdouble)

    def resid_l(aq):
        f1 = vq1_l @ aq
        u = vpsi1_l.T @ (f1 ** 3)
        f5 = vq53_l @ aq
        t = vpsi53_l.T @ (f5 ** 5)
        return u - (c_lin * u + kappa * t) / lam_l, f1, f5

    aq = aq.astype(np.longdouble)
    r, f1, f5 = resid_l(aq)
    nrm = float(np.linalg.norm((lam_l * r).astype(np.float64)))
    # Levenberg-Marquardt ridge: the q -> u map has near-null directions
    # (high q-modes barely move the projected residual but inflate the
    # unprojected q^5 tail), so plain least-squares steps are useless here.
    mu = 1e-2
    ridge = np.eye(nq + 1)
    for _ in range(polish_iters):
        if nrm < tol:
            break
        f1d = f1.astype(np.float64)
        f5d = f5.astype(np.float64)
        du = 3.0 * vpsi1.T @ (f1d[:, None] ** 2 * vq1)
        dt = 5.0 * vpsi53.T @ (f5d[:, None] ** 4 * vq53)
        jac = du - (c_lin * du + kappa * dt) / lam[:, None]
        rhs = (lam_l * r).astype(np.float64)
        improved = False
        for _ in range(10):
            aug = np.vstack([lam[:, None] * jac, mu * ridge])
            augr = np.concatenate([rhs, np.zeros(nq + 1)])
            step, *_ = np.linalg.lstsq(aug, augr, rcond=None)
            trial = aq - step.astype(np.longdouble)
            tr, tf1, tf5 = resid_l(trial)
            tn = float(np.linalg.norm((lam_l * tr).astype(np.float64)))
            if tn < nrm:
                aq, r, f1, f5, nrm = trial, tr, tf1, tf5, tn
                mu = max(mu / 3.0, 1e-6)
                improved = True
                break
            mu *= 4.0
        if not improved:
            break
    return aq.astype(np.float64)
