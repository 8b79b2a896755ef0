"""Label-generating links and the joint law of (Y, G, W).

The data model draws G, W as independent standard normals and a label Y in
{-1, +1} with P(Y = 1 | G) = link(G).  Pure noise is the constant-1/2 link.
This module provides the density of the product Y*G, its mean, the mixture
tail P(rho YG + sqrt(1-rho^2) r W < -t), the matching exponential-tail
envelope used for large-t asymptotics, and the squashing kernel
psi_{kappa,rho} that drives the signal-model upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .gauss_kernels import (
    DEFAULT_QUADRATURE,
    Quadrature,
    one_minus_psi_kappa,
    std_normal_cdf,
    std_normal_pdf,
)


@dataclass(frozen=True)
class LinkFunction:
    """Monotone link x -> P(Y = 1 | G = x) with an exponential tail exponent.

    ``kind`` is one of ``pure_noise``, ``logistic`` or ``tabulated``.  The
    logistic link with exponent alpha is 1 / (1 + exp(-alpha x)).  Tabulated
    links carry a monotone sample of the function plus a declared alpha whose
    validity is only probed by a finite-x diagnostic, not proven.
    """

    kind: str
    alpha: float | None = None
    table_x: tuple = None
    table_p: tuple = None

    @staticmethod
    def pure_noise() -> "LinkFunction":
        return LinkFunction(kind="pure_noise")

    @staticmethod
    def logistic(alpha: float) -> "LinkFunction":
        if alpha <= 0:
            raise ValueError("tail exponent alpha must be positive")
        return LinkFunction(kind="logistic", alpha=float(alpha))

    @staticmethod
    def tabulated(xs, ps, alpha: float) -> "LinkFunction":
        xs = tuple(float(v) for v in xs)
        ps = tuple(float(v) for v in ps)
        if len(xs) != len(ps) or len(xs) < 2:
            raise ValueError("need matching tables with at least two points")
        if any(b <= a for a, b in zip(xs[1:], xs[:-1])):
            raise ValueError("abscissae must be increasing")
        if any(b < a for a, b in zip(ps[1:], ps[:-1])):
            raise ValueError("tabulated link must be monotone nondecreasing")
        if min(ps) < 0 or max(ps) > 1:
            raise ValueError("link values must lie in [0, 1]")
        if alpha <= 0:
            raise ValueError("tail exponent alpha must be positive")
        return LinkFunction(kind="tabulated", alpha=float(alpha), table_x=xs, table_p=ps)

    @property
    def is_pure_noise(self) -> bool:
        return self.kind == "pure_noise"

    def prob(self, x):
        """P(Y = 1 | G = x)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "pure_noise":
            return np.full_like(x, 0.5)
        if self.kind == "logistic":
            # overflow-safe logistic
            out = np.empty_like(x)
            ax = self.alpha * x
            pos = ax >= 0
            out[pos] = 1.0 / (1.0 + np.exp(-ax[pos]))
            e = np.exp(ax[~pos])
            out[~pos] = e / (1.0 + e)
            return out
        if self.kind == "tabulated":
            xs = np.asarray(self.table_x)
            ps = np.asarray(self.table_p)
            return np.interp(x, xs, ps)
        raise ValueError(f"unknown link kind {self.kind!r}")

    def tail_ratio_diagnostic(self, xs=(-4.0, -6.0, -8.0)):
        """(1 + p(x) - p(-x)) / (2 exp(alpha x)) at finite probe points.

        Should approach 1 as x -> -infinity for a link whose declared alpha
        is the true tail exponent.  Finite-x values are a heuristic check
        only; tabulated links in particular are the caller's responsibility.
        """
        if self.is_pure_noise:
            raise ValueError("pure noise has no tail exponent")
        xs = np.asarray(xs, dtype=float)
        num = 1.0 + self.prob(xs) - self.prob(-xs)
        return num / (2.0 * np.exp(self.alpha * xs))


@dataclass(frozen=True)
class JointLaw:
    """The triple (Y, G, W): G, W independent standard normal, Y from the link."""

    link: LinkFunction


@lru_cache(maxsize=32)
def _yg_panel(link: LinkFunction, node_count: int, halfwidth: float):
    nodes, weights = leggauss(node_count)
    s = halfwidth * nodes
    w = halfwidth * weights
    dens = _yg_density_values(s, link)
    return s, w * dens


def yg_weights(link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE):
    """Quadrature nodes s and weights w p_YG(s) for integrals against YG."""
    return _yg_panel(link, quad.node_count, quad.domain_halfwidth)


def _yg_density_values(s, link: LinkFunction):
    s = np.asarray(s, dtype=float)
    bracket = link.prob(s) + 1.0 - link.prob(-s)
    return bracket * std_normal_pdf(s)


def yg_density(s, link: LinkFunction):
    """Density of Y*G at s: (p(s) + 1 - p(-s)) * normal_pdf(s)."""
    return _yg_density_values(s, link)


def mean_yg(link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """m = E[YG]; zero for pure noise, positive for an increasing link."""
    if link.is_pure_noise:
        return 0.0
    s, w = yg_weights(link, quad)
    return float(np.sum(w * s))


def yg_lower_mass(x, link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """P(YG < x) by quadrature of the YG density."""
    hw = quad.domain_halfwidth
    if x <= -hw:
        return 0.0
    s, w = yg_weights(link, quad)
    if x >= hw:
        return float(np.sum(w))
    nodes, weights = quad.panel(-hw, x)
    return float(np.sum(weights * _yg_density_values(nodes, link)))


def mixture_tail(rho, r, t, link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE) -> float:
    """P(rho YG + sqrt(1-rho^2) r W < -t)."""
    if abs(rho) > 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    if r < 0:
        raise ValueError("r must be nonnegative")
    sig = math.sqrt(max(1.0 - rho * rho, 0.0)) * r
    if sig == 0.0:
        if rho == 0.0:
            return 1.0 if t < 0 else 0.0
        # point mass in the W direction: P(rho YG < -t)
        if rho > 0:
            return yg_lower_mass(-t / rho, link, quad)
        return float(np.sum(yg_weights(link, quad)[1])) - yg_lower_mass(-t / rho, link, quad)
    s, w = yg_weights(link, quad)
    vals = std_normal_cdf((-t - rho * s) / sig)
    return float(np.sum(w * vals))


def tail_asymptotic(
    rho,
    t,
    link: LinkFunction,
    eta0: float = 0.05,
    quad: Quadrature = DEFAULT_QUADRATURE,
) -> float:
    """Large-t envelope for the unit-variance mixture tail (r = 1).

    Three branches split at |rho| = eta0: for |rho| >= eta0 the envelope is
    (1/t) sqrt(2/pi) exp(-t^2/2 - alpha rho t + (1 - rho^2) alpha^2 / 2) on
    the positive side and the alpha-free analogue on the negative side; in
    the middle band a link-dependent correction factor is integrated
    numerically.  The ratio mixture_tail / envelope tends to 1 uniformly in
    rho as t grows.
    """
    if not 0.0 < eta0 < 0.1:
        raise ValueError("eta0 must lie in (0, 0.1)")
    if t <= 0:
        raise ValueError("t must be positive")
    if abs(rho) > 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    alpha = 0.0 if link.is_pure_noise else link.alpha
    base = (1.0 / t) * math.sqrt(2.0 / math.pi) * math.exp(-0.5 * t * t)
    if rho >= eta0:
        return base * math.exp(-alpha * rho * t + 0.5 * (1.0 - rho * rho) * alpha * alpha)
    if rho <= -eta0:
        return base
    s2 = 1.0 - rho * rho
    scale = math.sqrt(s2)
    nodes, weights = quad.panel(-quad.domain_halfwidth * scale, quad.domain_halfwidth * scale)
    bracket = link.prob(nodes - rho * t) + 1.0 - link.prob(nodes + rho * t)
    integral = float(np.sum(weights * bracket * np.exp(-nodes * nodes / (2.0 * s2))))
    a_factor = integral / (2.0 * math.sqrt(2.0 * math.pi * s2))
    return base * a_factor


def one_minus_psi_kappa_rho(
    u, kappa, rho, link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE
) -> float:
    """1 - E[exp(-u (kappa - rho YG - sqrt(1-rho^2) W)_+^2)], stable form.

    Outer quadrature over YG with the closed-form one-dimensional complement
    conditional on YG = s; all contributions are small positive numbers, so
    the sum keeps relative precision in the far tail.
    """
    if u < 0:
        raise ValueError("u must be nonnegative")
    if abs(rho) > 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    s, w = yg_weights(link, quad)
    sig2 = 1.0 - rho * rho
    if sig2 <= 0.0:
        inner = -np.expm1(-u * np.maximum(kappa - rho * s, 0.0) ** 2)
    else:
        sig = math.sqrt(sig2)
        inner = one_minus_psi_kappa(u * sig2, (kappa - rho * s) / sig)
    return float(np.sum(w * inner))


def psi_kappa_rho(u, kappa, rho, link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE):
    """E[exp(-u (kappa - rho YG - sqrt(1-rho^2) W)_+^2)] for u >= 0."""
    return 1.0 - one_minus_psi_kappa_rho(u, kappa, rho, link, quad)


def log_psi_kappa_rho(u, kappa, rho, link: LinkFunction, quad: Quadrature = DEFAULT_QUADRATURE):
    return math.log1p(-one_minus_psi_kappa_rho(u, kappa, rho, link, quad))
