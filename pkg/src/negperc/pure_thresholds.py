"""Analytic threshold curves for the random-labels model.

Four curves as functions of the (negative) margin kappa:

* ``delta_rs``   -- the second-moment upper envelope 1 / E[(kappa - G)_+^2],
* ``delta_ub_pure`` -- the sharper upper bound from the exponential-smoothing
  feasibility program,
* ``delta_lb_pure`` -- the lower bound from the tilted second-moment rate
  function,
* ``delta_lin_pure`` -- the linear-programming threshold 1 / cdf(kappa).

All four are decreasing in kappa and satisfy
lb <= ub < rs and lin <= ub for kappa < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gauss_kernels import (
    DEFAULT_QUADRATURE,
    Quadrature,
    log_tilted_pair_moment,
    mills_ratio,
    one_minus_psi_kappa,
    std_normal_cdf,
    std_normal_pdf,
    truncated_second_moment,
)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class PureThresholdRecord:
    """Per-kappa bundle of the four threshold values plus solver metadata."""

    kappa: float
    delta_rs: float
    delta_lb: float | None
    delta_ub: float | None
    delta_lin: float
    diagnostics: dict = field(default_factory=dict)


def _golden_min(f, lo, hi, iters=48):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    m = 0.5 * (a + b)
    return m, f(m)


def c_star(kappa: float) -> float:
    """Unique positive root of c (1 - cdf(kappa + c)) = pdf(kappa + c).

    Equivalently the zero of A(c) = c - 1 / R(kappa + c) with R the Mills
    ratio; A is strictly increasing, negative at 0 and positive at
    |kappa| + 1/|kappa| + 1, so bisection is safe.
    """
    if kappa >= 0:
        raise ValueError("defined for negative kappa only")
    lo = 0.0
    hi = abs(kappa) + 1.0 / abs(kappa) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - 1.0 / float(mills_ratio(kappa + mid)) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17 * max(1.0, hi):
            break
    root = 0.5 * (lo + hi)
    resid = abs(root * (1.0 - std_normal_cdf(kappa + root)) - std_normal_pdf(kappa + root))
    if resid > 1e-12:
        raise ArithmeticError(f"tilt root residual {resid:.2e} exceeds 1e-12")
    return root


def psi_rate(q: float, kappa: float, delta: float, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """Rate function -log e(q) - (1/(2 delta)) log(1 - q^2) at the optimal tilt.

    Here e(q) is the tilted pair moment at correlation q with tilt
    c_star(kappa).  Diverges as |q| -> 1.
    """
    if abs(q) >= 1.0:
        raise ValueError("q must lie strictly inside (-1, 1)")
    if delta <= 0:
        raise ValueError("delta must be positive")
    c = c_star(kappa)
    return float(-log_tilted_pair_moment(q, kappa, c, quad)) - 0.5 * math.log1p(-q * q) / delta


def _lb_q_grid(n_grid: int) -> np.ndarray:
    qs = np.linspace(-1.0, 1.0, n_grid + 2)[1:-1]
    edge = 1.0 - 10.0 ** (-np.arange(1, 13, dtype=float))
    qs = np.unique(np.concatenate([qs, edge, -edge]))
    return qs[qs != 0.0]


def delta_lb_pure(
    kappa: float,
    quad: Quadrature = DEFAULT_QUADRATURE,
    n_grid: int = 2001,
    fd_step: float = 1e-3,
) -> float:
    """Largest delta at which the pair rate function is minimized at q = 0.

    Feasibility at a given delta asks that (i) the rate has positive
    curvature at 0 and (ii) it exceeds its value at 0 on a fine q-grid with
    near-boundary refinement.  Both conditions are linear in 1/delta, so the
    supremum is the minimum of per-constraint critical deltas; no bisection
    slack is incurred.
    """
    if kappa >= 0:
        raise ValueError("defined for negative kappa only")
    c = c_star(kappa)
    qs = _lb_q_grid(n_grid)
    log_e0 = float(log_tilted_pair_moment(0.0, kappa, c, quad))
    log_eq = log_tilted_pair_moment(qs, kappa, c, quad)
    # F(q) = -log e(q); constraint F(q) + I(q)/delta > F(0)
    drop = log_eq - log_e0  # = F(0) - F(q)
    iq = -0.5 * np.log1p(-qs * qs)
    limits = np.where(drop > 0.0, iq / np.where(drop > 0.0, drop, 1.0), np.inf)
    best = float(np.min(limits))
    # curvature at 0 by central second difference of F
    fp = float(log_tilted_pair_moment(fd_step, kappa, c, quad))
    fm = float(log_tilted_pair_moment(-fd_step, kappa, c, quad))
    f2 = -(fp - 2.0 * log_e0 + fm) / (fd_step * fd_step)
    if f2 < 0.0:
        best = min(best, 1.0 / (-f2))
    return best


def _ub_lhs(c: float) -> float:
    root = math.sqrt(c * c + 4.0)
    # log((c + root)/2) via log1p; root - 2 = c^2 / (root + 2)
    return 1.0 / (root + c) + math.log1p(0.5 * (c + c * c / (root + 2.0))) / c


def _ub_inner_inf(kappa: float, delta: float, c: float, tgrid: np.ndarray) -> float:
    """inf over t > 0 of 1/(4t) - (delta/c) log psi_kappa(-c t)."""

    def val(t):
        return 1.0 / (4.0 * t) + (delta / c) * (-np.log1p(-one_minus_psi_kappa(c * t, kappa)))

    vals = val(tgrid)
    i = int(np.argmin(vals))
    lo = tgrid[max(i - 1, 0)]
    hi = tgrid[min(i + 1, len(tgrid) - 1)]
    _, refined = _golden_min(lambda lt: float(val(math.exp(lt))), math.log(lo), math.log(hi))
    # t -> infinity limit: (delta/c) * (-log P(G >= kappa))
    limit = (delta / c) * (-math.log1p(-float(std_normal_cdf(kappa))))
    return min(float(vals[i]), refined, limit)


def delta_ub_pure(
    kappa: float,
    rel_tol: float = 1e-3,
    c_grid: np.ndarray | None = None,
    t_grid: np.ndarray | None = None,
) -> float:
    """Infimum delta at which the smoothing feasibility program succeeds.

    Feasibility at delta: exists c > 0 with
    lhs(c) < inf_{t>0} [1/(4t) - (delta/c) log psi_kappa(-c t)].
    The feasible set is upward-closed in delta, located by log-bisection to
    relative width ``rel_tol``; c is scanned on a log grid and refined by
    golden section around the best candidates.
    """
    if kappa >= 0:
        raise ValueError("defined for negative kappa only")
    cs = np.logspace(-4, 6, 200) if c_grid is None else c_grid
    ts = np.logspace(-6, 8, 400) if t_grid is None else t_grid

    def feasible(delta: float) -> bool:
        lhs = np.array([_ub_lhs(c) for c in cs])
        # coarse pass, then refine the best few c candidates
        margins = np.array([_ub_inner_inf(kappa, delta, c, ts) for c in cs]) - lhs
        order = np.argsort(margins)[::-1]
        for idx in order[:3]:
            if margins[idx] > 0.0:
                return True
            lo = cs[max(idx - 1, 0)]
            hi = cs[min(idx + 1, len(cs) - 1)]

            def negmargin(lc):
                c = math.exp(lc)
                return -(_ub_inner_inf(kappa, delta, c, ts) - _ub_lhs(c))

            _, neg = _golden_min(negmargin, math.log(lo), math.log(hi), iters=36)
            if -neg > 0.0:
                return True
        return False

    lo, hi = 1.0, 2.0
    while feasible(lo):
        lo /= 8.0
        if lo < 1e-12:
            return 0.0
    while not feasible(hi):
        hi *= 8.0
        if hi > 1e40:
            return math.inf
    while hi / lo > 1.0 + rel_tol:
        mid = math.sqrt(lo * hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi)


def delta_lin_pure(kappa: float) -> float:
    """Linear-programming threshold 1 / cdf(kappa) for kappa <= 0."""
    if kappa > 0:
        raise ValueError("defined for kappa <= 0")
    return 1.0 / float(std_normal_cdf(kappa))


def delta_rs(kappa: float) -> float:
    """Second-moment envelope 1 / E[(kappa - G)_+^2]."""
    return 1.0 / float(truncated_second_moment(kappa))


def pure_threshold_record(kappa: float, quad: Quadrature = DEFAULT_QUADRATURE) -> PureThresholdRecord:
    """All four curves at one kappa; lb/ub are absent at kappa = 0."""
    if kappa > 0:
        raise ValueError("defined for kappa <= 0")
    diag = {"quad_nodes": quad.node_count, "quad_halfwidth": quad.domain_halfwidth}
    if kappa == 0.0:
        return PureThresholdRecord(
            kappa=kappa,
            delta_rs=delta_rs(kappa),
            delta_lb=None,
            delta_ub=None,
            delta_lin=delta_lin_pure(kappa),
            diagnostics=diag,
        )
    c = c_star(kappa)
    diag["c_star"] = c
    diag["c_star_residual"] = abs(
        c * (1.0 - float(std_normal_cdf(kappa + c))) - float(std_normal_pdf(kappa + c))
    )
    return PureThresholdRecord(
        kappa=kappa,
        delta_rs=delta_rs(kappa),
        delta_lb=delta_lb_pure(kappa, quad),
        delta_ub=delta_ub_pure(kappa),
        delta_lin=delta_lin_pure(kappa),
        diagnostics=diag,
    )
