"""Analytic threshold curves for the linear-signal model.

The upper bound comes from a smoothing feasibility program indexed by the
alignment rho; its sup over rho bounds the satisfiability threshold, and the
per-rho curve also delimits the alignments that margin solutions can achieve
(:func:`rho_band`).  The lower bound is a certified search over a
four-parameter family whose kernel is the conditional tilted second-moment
rate (:func:`delta_sec`).  The scale function :func:`dee` captures the
large-|kappa| shape of the upper bound, and :func:`error_prediction` gives
the closed-form estimation-error asymptote of the linear-programming solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .gauss_kernels import (
    DEFAULT_QUADRATURE,
    Quadrature,
    std_normal_cdf,
    std_normal_pdf,
    truncated_second_moment,
)
from .link_model import (
    LinkFunction,
    mixture_tail,
    one_minus_psi_kappa_rho,
    yg_weights,
)
from .pure_thresholds import c_star

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SignalLowerParams:
    """Search point for the certified lower bound.

    Requires 0 < rho < 1 and 0 > kappa1 > kappa2 > kappa0 = kappa/sqrt(1-rho^2).
    """

    rho: float
    kappa1: float
    kappa2: float
    kappa0: float
    c: float = 0.0

    def validate(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not (0.0 > self.kappa1 > self.kappa2 > self.kappa0):
            raise ValueError("need 0 > kappa1 > kappa2 > kappa0")
        if self.c < 0:
            raise ValueError("c must be nonnegative")


@dataclass
class SignalLowerBound:
    delta: float
    params: SignalLowerParams | None
    branch_direct: float | None = None  # candidate from the direct branch
    branch_split: float | None = None  # candidate from the split-sample branch


@dataclass
class RhoBand:
    """Alignment interval that margin solutions are confined to."""

    rho_min: float
    rho_max: float
    empty_flag: bool  # the per-rho bound is below delta everywhere: no solutions

    def contains(self, rho: float) -> bool:
        return (not self.empty_flag) and self.rho_min <= rho <= self.rho_max


def _golden(f, lo, hi, iters=48):
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


# ---------------------------------------------------------------------------
# upper bound
# ---------------------------------------------------------------------------


def _ub_lhs_signal(c: float, rho: float) -> float:
    s = math.sqrt(max(1.0 - rho * rho, 0.0))
    root = math.sqrt(c * c * s * s + 4.0)
    # log((c s + root)/2) via log1p with root - 2 = (c s)^2 / (root + 2)
    return s / (c * s + root) + math.log1p(0.5 * (c * s + c * c * s * s / (root + 2.0))) / c


def _ub_inner_inf_signal(kappa, rho, delta, c, link, quad, ugrid, tail_limit):
    def neglog(u):
        return -math.log1p(-one_minus_psi_kappa_rho(u, kappa, rho, link, quad))

    vals = np.array([c / (4.0 * u) + (delta / c) * neglog(u) for u in ugrid])
    i = int(np.argmin(vals))
    lo = ugrid[max(i - 1, 0)]
    hi = ugrid[min(i + 1, len(ugrid) - 1)]
    _, refined = _golden(
        lambda lu: c / (4.0 * math.exp(lu)) + (delta / c) * neglog(math.exp(lu)),
        math.log(lo),
        math.log(hi),
        iters=36,
    )
    limit = (delta / c) * (-math.log1p(-tail_limit))  # u -> infinity
    return min(float(vals[i]), refined, limit)


def delta_ub_signal(
    kappa,
    rho,
    link: LinkFunction,
    quad: Quadrature = DEFAULT_QUADRATURE,
    rel_tol: float = 1e-3,
    c_grid: np.ndarray | None = None,
    u_grid: np.ndarray | None = None,
) -> float:
    """Per-alignment upper-bound curve delta_ub(kappa, rho).

    Infimum over delta of: exists c > 0 with the sqrt(1-rho^2)-scaled
    logarithmic term below inf_{u>0} [c/(4u) - (delta/c) log psi_{kappa,rho}(-u)].
    At rho = +-1 the left side vanishes while the right side stays positive,
    so every delta is feasible and the value is 0 (taken by continuity).
    """
    if kappa >= 0:
        raise ValueError("defined for negative kappa only")
    if abs(rho) > 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    if 1.0 - rho * rho <= 0.0:
        return 0.0
    cs = np.logspace(-4, 6, 120) if c_grid is None else c_grid
    us = np.logspace(-6, 10, 240) if u_grid is None else u_grid
    tail_limit = mixture_tail(rho, 1.0, -kappa, link, quad)

    # complement of psi on the u-grid is delta-independent: precompute
    compl = np.array([one_minus_psi_kappa_rho(u, kappa, rho, link, quad) for u in us])
    neglog_grid = -np.log1p(-compl)
    lhs_grid = np.array([_ub_lhs_signal(c, rho) for c in cs])

    def feasible(delta: float) -> bool:
        inner = np.minimum(
            (cs[:, None] / (4.0 * us[None, :]) + (delta / cs)[:, None] * neglog_grid[None, :]).min(
                axis=1
            ),
            (delta / cs) * (-math.log1p(-tail_limit)),
        )
        margins = inner - lhs_grid
        order = np.argsort(margins)[::-1]
        for idx in order[:3]:
            if margins[idx] > 0.0:
                return True
            lo = cs[max(idx - 1, 0)]
            hi = cs[min(idx + 1, len(cs) - 1)]

            def negm(lc):
                c = math.exp(lc)
                return -(
                    _ub_inner_inf_signal(kappa, rho, delta, c, link, quad, us, tail_limit)
                    - _ub_lhs_signal(c, rho)
                )

            _, neg = _golden(negm, math.log(lo), math.log(hi), iters=30)
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


def delta_ub_signal_max(
    kappa,
    link: LinkFunction,
    quad: Quadrature = DEFAULT_QUADRATURE,
    n_rho: int = 201,
    rel_tol: float = 1e-3,
) -> float:
    """sup over rho in [-1, 1] of the per-alignment upper bound."""
    rhos = np.linspace(-1.0, 1.0, n_rho)
    vals = np.array([delta_ub_signal(kappa, r, link, quad, rel_tol) for r in rhos])
    i = int(np.argmax(vals))
    lo = rhos[max(i - 1, 0)]
    hi = rhos[min(i + 1, n_rho - 1)]
    _, neg = _golden(
        lambda r: -delta_ub_signal(kappa, r, link, quad, rel_tol), lo, hi, iters=24
    )
    return max(float(vals[i]), -neg)


def rho_band(
    kappa,
    delta,
    link: LinkFunction,
    quad: Quadrature = DEFAULT_QUADRATURE,
    n_rho: int = 201,
    rel_tol: float = 1e-3,
) -> RhoBand:
    """Alignment interval not excluded by the per-rho upper bound at delta.

    Scans the rho grid: alignments with delta_ub(kappa, rho) < delta cannot
    carry margin solutions.  rho_min is the top of the excluded prefix,
    rho_max the bottom of the excluded suffix.  If every alignment is
    excluded the whole solution set is empty and ``empty_flag`` is set.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    rhos = np.linspace(-1.0, 1.0, n_rho)
    vals = np.array([delta_ub_signal(kappa, r, link, quad, rel_tol) for r in rhos])
    excluded = vals < delta
    if np.all(excluded):
        return RhoBand(rho_min=0.0, rho_max=0.0, empty_flag=True)
    keep = np.nonzero(~excluded)[0]
    lo_idx, hi_idx = keep[0], keep[-1]
    rho_min = float(rhos[lo_idx - 1]) if lo_idx > 0 else -1.0
    rho_max = float(rhos[hi_idx + 1]) if hi_idx < n_rho - 1 else 1.0
    return RhoBand(rho_min=rho_min, rho_max=rho_max, empty_flag=False)


# ---------------------------------------------------------------------------
# the scale function of the upper bound
# ---------------------------------------------------------------------------


def _exp_decay_integral(t):
    """J(t) = int_0^inf 2 t s exp(-t s^2 - s) ds, full relative precision.

    Closed form 1 - 0.5 sqrt(pi/t) erfcx(1/(2 sqrt(t))) cancels badly for
    small t; there the asymptotic series 2t (1 - 6t + 60t^2 - 840t^3) takes
    over (truncation below 1e-12 relative at the 1e-4 crossover).
    """
    t = np.asarray(t, dtype=float)
    small = t < 1e-4
    ts = np.where(small, 1.0, t)
    closed = 1.0 - 0.5 * np.sqrt(np.pi / ts) * special.erfcx(1.0 / (2.0 * np.sqrt(ts)))
    series = 2.0 * t * (1.0 - 6.0 * t + 60.0 * t * t - 840.0 * t**3)
    return np.where(small, series, closed)


def _dee_lhs(c):
    c = np.asarray(c, dtype=float)
    root = np.sqrt(c * c + 4.0)
    return 1.0 / (root + c) + np.log1p(0.5 * (c + c * c / (root + 2.0))) / c


def _dee_inner_inf(a, b, c, tgrid):
    vals = c / (4.0 * tgrid * a) + (b / c) * _exp_decay_integral(tgrid)
    i = int(np.argmin(vals))
    lo = tgrid[max(i - 1, 0)]
    hi = tgrid[min(i + 1, len(tgrid) - 1)]

    def f(lt):
        t = math.exp(lt)
        return c / (4.0 * t * a) + (b / c) * float(_exp_decay_integral(t))

    _, refined = _golden(f, math.log(lo), math.log(hi), iters=60)
    return min(float(vals[i]), refined, b / c)  # include the t -> infinity limit


def _dee_feasible(a, b, cgrid, tgrid):
    if b <= 0:
        return False
    lhs = _dee_lhs(cgrid)
    rhs = cgrid[:, None] / (4.0 * tgrid[None, :] * a) + (b / cgrid)[:, None] * _exp_decay_integral(
        tgrid
    )[None, :]
    inner = np.minimum(rhs.min(axis=1), b / cgrid)
    order = np.argsort(inner - lhs)[::-1]
    for idx in order[:4]:
        lo = cgrid[max(idx - 1, 0)]
        hi = cgrid[min(idx + 1, len(cgrid) - 1)]

        def negm(lc):
            c = math.exp(lc)
            return -(_dee_inner_inf(a, b, c, tgrid) - float(_dee_lhs(c)))

        _, neg = _golden(negm, math.log(lo), math.log(hi), iters=50)
        if -neg > 0.0:
            return True
    return False


def dee(a: float, tol: float = 5e-8) -> float:
    """Scale function of the signal-model upper bound.

    Infimum over b >= 0 of a two-player feasibility inequality; equals a/2
    for a <= 2 and grows like (log a)/2.  The infimum is located by
    bisection on b; candidate multipliers c must reach very small values
    because the optimal c collapses to 0 at the feasibility edge for a <= 2.
    """
    if a < 0:
        raise ValueError("a must be nonnegative")
    if a == 0.0:
        return 0.0
    cgrid = np.logspace(-10, 9, 400)
    tgrid = np.logspace(-14, 10, 400)
    lo, hi = 0.0, max(1.0, math.log(max(a, 2.0)))
    while not _dee_feasible(a, hi, cgrid, tgrid):
        hi *= 2.0
        if hi > 1e9:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _dee_feasible(a, mid, cgrid, tgrid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# lower bound
# ---------------------------------------------------------------------------


def _min_below_fixed_q(q: float, a: np.ndarray, quad: Quadrature) -> np.ndarray:
    """P_q(min(G1,G2) < a_i) for one correlation and an array of corners."""
    a = np.asarray(a, dtype=float)
    cdf_a = std_normal_cdf(a)
    if q >= 1.0 - 1e-14:
        return cdf_a
    if q <= -1.0 + 1e-14:
        both = np.where(a > 0, np.maximum(2.0 * cdf_a - 1.0, 0.0), 0.0)
        return 2.0 * cdf_a - both
    x, w = quad.panel(a - quad.domain_halfwidth, a)
    s = math.sqrt(1.0 - q * q)
    inner = std_normal_cdf((a[:, None] - q * x) / s)
    both = np.sum(w * std_normal_pdf(x) * inner, axis=-1)
    return 2.0 * cdf_a - both


def _c_star_vec(kappas: np.ndarray) -> np.ndarray:
    """Vectorized positive root of the tilt equation over an array of kappas."""
    from .gauss_kernels import mills_ratio

    kappas = np.asarray(kappas, dtype=float)
    lo = np.zeros_like(kappas)
    hi = np.abs(kappas) + 1.0 / np.abs(kappas) + 1.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        neg = mid - 1.0 / mills_ratio(kappas + mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def delta_sec(
    rho: float,
    kappa_eff: float,
    kappa_t: float,
    link: LinkFunction,
    quad: Quadrature = DEFAULT_QUADRATURE,
    n_grid: int = 2001,
    fd_step: float = 1e-3,
    return_detail: bool = False,
):
    """Conditional tilted second-moment threshold.

    Per retained sample value s >= kappa_t the effective margin is
    kappa(s) = (kappa_eff - rho s)/sqrt(1-rho^2) with its own tilt
    c(s); the averaged pair-moment ratio

        e(q) = 1 + int_{kappa_t}^inf p_YG(s) (e(q, s)/e(0, s) - 1) ds

    satisfies e(0) = 1 exactly.  The threshold is the supremum of delta at
    which -log e(q) + I(q)/delta is uniquely minimized at q = 0 with
    positive curvature, computed by exact inversion of the per-q constraints
    (they are linear in 1/delta).
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    if not (0.0 > rho * kappa_t > kappa_eff):
        raise ValueError("need 0 > rho * kappa_t > kappa_eff")
    hw = quad.domain_halfwidth
    if kappa_t >= hw:
        raise ValueError("kappa_t beyond the quadrature domain")
    sroot = math.sqrt(1.0 - rho * rho)
    s_nodes, s_w = quad.panel(kappa_t, hw)
    from .link_model import yg_density

    s_weights = s_w * yg_density(s_nodes, link)
    ks = (kappa_eff - rho * s_nodes) / sroot  # all negative on the domain
    cs = _c_star_vec(ks)

    def log_e_ratio(q: float) -> np.ndarray:
        # log e(q, s) - log e(0, s) per node
        a_q = ks + cs * (1.0 + q)
        a_0 = ks + cs
        lq = cs * cs * (1.0 + q) + np.log1p(-_min_below_fixed_q(q, a_q, quad))
        l0 = cs * cs + np.log1p(-_min_below_fixed_q(0.0, a_0, quad))
        return lq - l0

    def log_e(q: float) -> float:
        ratio = np.expm1(log_e_ratio(q))
        return math.log1p(float(np.sum(s_weights * ratio)))

    qs = np.linspace(-1.0, 1.0, n_grid + 2)[1:-1]
    edge = 1.0 - 10.0 ** (-np.arange(1, 13, dtype=float))
    qs = np.unique(np.concatenate([qs, edge, -edge]))
    qs = qs[qs != 0.0]

    best = math.inf
    for q in qs:
        le = log_e(q)  # = F(0) - F(q)
        if le > 0.0:
            best = min(best, -0.5 * math.log1p(-q * q) / le)
    f2 = -(log_e(fd_step) + log_e(-fd_step)) / (fd_step * fd_step)
    if f2 < 0.0:
        best = min(best, 1.0 / (-f2))
    if return_detail:
        fd1 = (log_e(fd_step) - log_e(-fd_step)) / (2.0 * fd_step)
        return best, {"numeric_F_prime_0": -fd1}
    return best


def _pos_sq_vs_w(m):
    """E[(m - W)_+^2] for standard normal W."""
    return truncated_second_moment(np.asarray(m, dtype=float))


def _split_branch(
    kappa: float,
    rho: float,
    kappa1: float,
    kappa2: float,
    link: LinkFunction,
    quad: Quadrature,
    n_grid_sec: int,
) -> tuple:
    """Value of the split-sample branch: 1/delta_sec + inf_c (two moments)."""
    sroot = math.sqrt(1.0 - rho * rho)
    kappa0 = kappa / sroot
    y1 = sroot * kappa1 / rho  # retention cutoff for YG
    sec = delta_sec(rho, sroot * kappa2, y1, link, quad, n_grid=n_grid_sec)
    sn, wn = yg_weights(link, quad)
    total = float(np.sum(wn))
    mask_bad = sn < y1
    p_good = total - float(np.sum(wn[mask_bad]))

    def branch_val(c: float) -> float:
        first = p_good * float(_pos_sq_vs_w((kappa0 - kappa2) / c))
        scale = math.sqrt(1.0 + c * c)
        m_bad = kappa0 - rho * sn[mask_bad] / sroot
        second = float(np.sum(wn[mask_bad] * scale * scale * _pos_sq_vs_w(m_bad / scale)))
        return first + second / (c * c)

    cgrid = np.logspace(-3, 3, 80)
    vals = np.array([branch_val(c) for c in cgrid])
    i = int(np.argmin(vals))
    lo = cgrid[max(i - 1, 0)]
    hi = cgrid[min(i + 1, len(cgrid) - 1)]
    c_best, refined = _golden(lambda lc: branch_val(math.exp(lc)), math.log(lo), math.log(hi), 40)
    inf_c = min(float(vals[i]), refined)
    return 1.0 / sec + inf_c, math.exp(c_best)


def delta_lb_signal(
    kappa: float,
    link: LinkFunction,
    search_budget: tuple = (64, 256),
    seed: int = 0,
    quad: Quadrature = DEFAULT_QUADRATURE,
    n_grid_sec: int = 501,
    n_grid_final: int = 2001,
) -> SignalLowerBound:
    """Certified lower bound on the satisfiability threshold.

    Any parameter tuple in the admissible family certifies a bound (the
    definition is a union over parameters), so the budgeted grid-plus-random
    search is sound but possibly loose.  The best tuple found is re-verified
    on the full q-grid before being returned alongside the bound.
    """
    if kappa >= 0:
        raise ValueError("defined for negative kappa only")
    n_coarse, n_random = search_budget
    rng = np.random.default_rng(seed)

    def candidate(rho: float, f1: float, f2: float):
        """kappa1 = f1 * kappa0, kappa2 = f2 * kappa0 with 0 < f1 < f2 < 1."""
        sroot = math.sqrt(1.0 - rho * rho)
        kappa0 = kappa / sroot
        kappa1, kappa2 = f1 * kappa0, f2 * kappa0
        if not (0.0 > kappa1 > kappa2 > kappa0):
            return None
        # direct branch
        tail = mixture_tail(rho, 1.0, -kappa, link, quad)
        sn, wn = yg_weights(link, quad)
        second = float(np.sum(wn * _pos_sq_vs_w(kappa0 - rho * sn / sroot)))
        direct = max(tail, second)
        cand_direct = 1.0 / direct if direct > 0 else math.inf
        # split branch
        try:
            split, c_best = _split_branch(kappa, rho, kappa1, kappa2, link, quad, n_grid_sec)
        except (ValueError, ArithmeticError):
            return cand_direct, None, math.inf, 0.0
        return cand_direct, split, 1.0 / split, c_best

    best = SignalLowerBound(delta=0.0, params=None)

    def consider(rho, f1, f2):
        nonlocal best
        res = candidate(rho, f1, f2)
        if res is None:
            return
        cand_direct, _split, cand_split, c_best = res
        val = max(cand_direct, cand_split)
        if val > best.delta and math.isfinite(val):
            sroot = math.sqrt(1.0 - rho * rho)
            kappa0 = kappa / sroot
            best = SignalLowerBound(
                delta=val,
                params=SignalLowerParams(
                    rho=rho, kappa1=f1 * kappa0, kappa2=f2 * kappa0, kappa0=kappa0, c=c_best
                ),
                branch_direct=cand_direct,
                branch_split=cand_split,
            )

    grid_n = max(int(round(n_coarse ** (1.0 / 3.0))), 2)
    for tau in np.geomspace(0.2, 2.0, grid_n):
        rho = max(1.0 - tau / abs(kappa), 0.05)
        for f1 in np.linspace(0.15, 0.75, grid_n):
            for gap in np.linspace(0.1, 0.5, grid_n):
                consider(rho, f1, gap * (1.0 - f1) + f1)
    for _ in range(n_random):
        if best.params is not None:
            # jitter around the incumbent
            base = best.params
            rho = min(max(base.rho * math.exp(0.15 * rng.standard_normal()), 0.02), 0.999)
            f1 = min(max(base.kappa1 / base.kappa0 + 0.08 * rng.standard_normal(), 0.02), 0.9)
            f2 = min(max(base.kappa2 / base.kappa0 + 0.08 * rng.standard_normal(), f1 + 0.02), 0.98)
        else:
            rho = rng.uniform(0.1, 0.99)
            f1 = rng.uniform(0.05, 0.8)
            f2 = rng.uniform(f1 + 0.02, 0.99)
        consider(rho, f1, f2)
    if best.params is not None and best.branch_split == best.delta and n_grid_final > n_grid_sec:
        # re-verify the winning split-branch tuple on the full grid
        p = best.params
        sroot = math.sqrt(1.0 - p.rho * p.rho)
        try:
            split, _ = _split_branch(
                kappa, p.rho, p.kappa1, p.kappa2, link, quad, n_grid_final
            )
            best.branch_split = 1.0 / split
            best.delta = max(best.branch_direct or 0.0, best.branch_split)
        except (ValueError, ArithmeticError):
            best.delta = best.branch_direct or 0.0
    return best


# ---------------------------------------------------------------------------
# solution-geometry asymptotics
# ---------------------------------------------------------------------------


def rho_max_linbound(
    kappa,
    delta,
    link: LinkFunction,
    quad: Quadrature = DEFAULT_QUADRATURE,
) -> float:
    """Asymptotic cap on the top alignment: 1 - (delta/2) E[(kappa - YG)_+^2].

    The vanishing correction factor of the asymptotic statement is dropped;
    callers should treat the value as a large-|kappa| prediction and ensure
    delta is below the solver threshold.
    """
    hw = quad.domain_halfwidth
    if kappa <= -hw:
        return 1.0
    from .link_model import yg_density

    nodes, w = quad.panel(-hw, kappa)
    second = float(np.sum(w * yg_density(nodes, link) * (kappa - nodes) ** 2))
    return 1.0 - 0.5 * delta * second


def error_prediction(
    kappa,
    delta,
    link: LinkFunction,
    quad: Quadrature = DEFAULT_QUADRATURE,
) -> tuple:
    """Asymptotic estimation-error prediction of the LP solver.

    Returns (error_value, delta0) with

        error = 1/(2 m^2 delta) + delta/delta0,
        delta0 = kappa^2 exp(alpha |kappa|) / (2 cdf(kappa)),

    where m = E[YG].  This is an asymptotic prediction (no finite-kappa
    correction is applied).  Rejected for pure noise, where m = 0 makes the
    formula diverge.
    """
    if kappa >= 0:
        raise ValueError("defined for negative kappa only")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if link.is_pure_noise:
        raise ValueError("error prediction needs a signal link (m must be nonzero)")
    from .link_model import mean_yg

    m = mean_yg(link, quad)
    delta0 = kappa * kappa * math.exp(link.alpha * abs(kappa)) / (2.0 * float(std_normal_cdf(kappa)))
    return 1.0 / (2.0 * m * m * delta) + delta / delta0, delta0
