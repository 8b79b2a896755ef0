"""Gaussian special functions and tilted moments.

Everything downstream (threshold curves, order-parameter equations) is built
from the handful of kernels in this module: the normal cdf evaluated without
tail cancellation, the Mills ratio, truncated second moments, equicorrelated
bivariate orthant probabilities, and the exponential-tilt pair moment.

Quantities that approach 1 in the far tail (orthant masses, the squashing
kernel ``psi_kappa``) are also exposed in complement/log form so callers can
work at full relative precision down to kappa ~ -10 and beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

SQRT2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI


@dataclass
class Quadrature:
    """Fixed Gauss-Legendre panel used by every numerical integral.

    ``node_count`` >= 64 and ``halfwidth`` >= 8 so that the standard normal
    mass outside the truncated domain is below 1e-15.
    """

    node_count: int = 256
    domain_halfwidth: float = 10.0
    rule: str = "gauss-legendre"
    _nodes: np.ndarray = field(init=False, repr=False, default=None)
    _weights: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if self.node_count < 64:
            raise ValueError("node_count must be at least 64")
        if self.domain_halfwidth < 8.0:
            raise ValueError("domain_halfwidth must be at least 8")
        self._nodes, self._weights = leggauss(self.node_count)

    def panel(self, lo, hi):
        """Nodes and weights for integration over [lo, hi].

        ``lo``/``hi`` may be arrays; the node axis is appended last.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = mid[..., None] + half[..., None] * self._nodes
        w = half[..., None] * self._weights
        return x, w

    def gaussian_mass(self) -> float:
        """Integral of the standard normal density over the truncated domain."""
        x, w = self.panel(-self.domain_halfwidth, self.domain_halfwidth)
        return float(np.sum(w * std_normal_pdf(x)))


DEFAULT_QUADRATURE = Quadrature()


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return INV_SQRT_2PI * np.exp(-0.5 * x * x)


def std_normal_cdf(x):
    """Normal cdf via the complementary error function.

    Keeps ~14 significant digits in the lower tail (relative, not absolute),
    which the threshold formulas rely on: they divide by cdf values of order
    1e-23 at kappa = -10.
    """
    x = np.asarray(x, dtype=float)
    return special.ndtr(x)


def std_normal_logcdf(x):
    return special.log_ndtr(np.asarray(x, dtype=float))


def mills_ratio(u):
    """R(u) = (1 - cdf(u)) / pdf(u), computed through erfcx.

    The scaled complementary error function avoids the catastrophic
    cancellation of the naive quotient for large positive u.
    """
    u = np.asarray(u, dtype=float)
    return math.sqrt(math.pi / 2.0) * special.erfcx(u / SQRT2)


def truncated_second_moment(kappa):
    """E[(kappa - G)_+^2] for standard normal G.

    Closed form (1 + kappa^2) cdf(kappa) + kappa pdf(kappa); the subtraction
    loses ~3 digits per factor kappa^3 of cancellation, which stays harmless
    for |kappa| <= 25 or so.
    """
    kappa = np.asarray(kappa, dtype=float)
    return (1.0 + kappa * kappa) * std_normal_cdf(kappa) + kappa * std_normal_pdf(kappa)


def bivariate_orthant(q, a, quad: Quadrature = DEFAULT_QUADRATURE):
    """P(min(G1, G2) >= a) for unit-variance normals with correlation q."""
    if not np.isfinite(a):
        raise ValueError("orthant corner must be finite")
    q = float(q)
    if abs(q) > 1.0:
        raise ValueError("correlation must lie in [-1, 1]")
    if q >= 1.0 - 1e-14:
        return float(1.0 - std_normal_cdf(a))
    if q <= -1.0 + 1e-14:
        # min(G, -G) = -|G| >= a needs a <= 0; mass of {|G| <= -a}
        return float(max(1.0 - 2.0 * std_normal_cdf(a), 0.0)) if a <= 0 else 0.0
    hi = max(quad.domain_halfwidth, a + 2.0 * quad.domain_halfwidth)
    if a >= hi:
        return 0.0
    x, w = quad.panel(a, hi)
    s = math.sqrt(1.0 - q * q)
    vals = std_normal_pdf(x) * (1.0 - std_normal_cdf((a - q * x) / s))
    return float(np.sum(w * vals))


def bivariate_min_below(q, a, quad: Quadrature = DEFAULT_QUADRATURE):
    """P(min(G1, G2) < a) = 2 cdf(a) - P(G1 <= a, G2 <= a).

    Complement of :func:`bivariate_orthant`, evaluated so that the result
    keeps full relative precision when a is far in the lower tail.  Both
    terms are lower-tail masses of the same order, so their difference is
    computed without the 1-eps resolution loss the direct orthant has.
    """
    q = np.asarray(q, dtype=float)
    a = float(a)
    if np.any(np.abs(q) > 1.0):
        raise ValueError("correlation must lie in [-1, 1]")
    scalar = q.ndim == 0
    q = np.atleast_1d(q)
    out = np.empty_like(q)
    cdf_a = float(std_normal_cdf(a))
    hi_mask = q >= 1.0 - 1e-14
    lo_mask = q <= -1.0 + 1e-14
    mid = ~(hi_mask | lo_mask)
    out[hi_mask] = cdf_a
    # comonotone-negative: both below a impossible for a <= 0
    out[lo_mask] = 2.0 * cdf_a - (max(2.0 * cdf_a - 1.0, 0.0) if a > 0 else 0.0)
    if np.any(mid):
        qm = q[mid]
        x, w = quad.panel(a - quad.domain_halfwidth, a)
        s = np.sqrt(1.0 - qm * qm)
        inner = std_normal_cdf((a - qm[:, None] * x) / s[:, None])
        both = np.sum(w * std_normal_pdf(x) * inner, axis=-1)
        out[mid] = 2.0 * cdf_a - both
    return float(out[0]) if scalar else out


def log_tilted_pair_moment(q, kappa, c, quad: Quadrature = DEFAULT_QUADRATURE):
    """log E_q[exp(-c (G1 + G2)) 1{G1 >= kappa, G2 >= kappa}].

    Completing the square reduces the tilted moment to an orthant mass,
    exp(c^2 (1+q)) P_q(min(G1, G2) >= kappa + c (1+q)); the log form keeps
    relative accuracy when that orthant mass is 1 - (tiny).
    """
    if c < 0:
        raise ValueError("tilt must be nonnegative")
    q = np.asarray(q, dtype=float)
    a = kappa + c * (1.0 + q)
    scalar = q.ndim == 0
    qv = np.atleast_1d(q)
    av = np.atleast_1d(np.broadcast_to(a, qv.shape).astype(float))
    out = np.empty_like(qv)
    for i in range(qv.size):
        out[i] = c * c * (1.0 + qv[i]) + np.log1p(-bivariate_min_below(qv[i], av[i], quad))
    return float(out[0]) if scalar else out


def tilted_pair_moment(q, kappa, c, quad: Quadrature = DEFAULT_QUADRATURE):
    """E_q[exp(-c (G1 + G2)) 1{G1 >= kappa, G2 >= kappa}] for c >= 0."""
    return np.exp(log_tilted_pair_moment(q, kappa, c, quad))


def one_minus_psi_kappa(u, kappa):
    """1 - E[exp(-u (kappa - G)_+^2)], stable in the far lower tail.

    The complement equals cdf(kappa) - T(u) with
    T(u) = exp(-u kappa^2 / (1 + 2u)) cdf(kappa / sqrt(1 + 2u)) / sqrt(1 + 2u);
    both terms carry full relative precision, so the difference does too.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("u must be nonnegative")
    r = np.sqrt(1.0 + 2.0 * u)
    t = np.exp(-u * kappa * kappa / (1.0 + 2.0 * u) + std_normal_logcdf(kappa / r)) / r
    return std_normal_cdf(kappa) - t


def psi_kappa(u, kappa):
    """E[exp(-u (kappa - G)_+^2)] for standard normal G and u >= 0.

    Decreasing in u, from 1 at u = 0 down to P(G >= kappa) as u -> infinity.
    """
    return 1.0 - one_minus_psi_kappa(u, kappa)


def log_psi_kappa(u, kappa):
    return np.log1p(-one_minus_psi_kappa(u, kappa))


def gauss_max_sq_moment(mean, sd, s):
    """E[max(s, X)^2] for X ~ N(mean, sd^2).

    Splits at the threshold: s^2 cdf(a) below plus the upper truncated second
    moment, with a = (s - mean)/sd.
    """
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(sd <= 0):
        raise ValueError("sd must be positive")
    a = (s - mean) / sd
    upper = (mean * mean + sd * sd) * std_normal_cdf(-a) + sd * std_normal_pdf(a) * (
        2.0 * mean + sd * a
    )
    return s * s * std_normal_cdf(a) + upper


def gauss_relu_mean(mean, sd):
    """E[X_+] = mean cdf(mean/sd) + sd pdf(mean/sd) for X ~ N(mean, sd^2)."""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    if np.any(sd <= 0):
        raise ValueError("sd must be positive")
    z = mean / sd
    return mean * std_normal_cdf(z) + sd * std_normal_pdf(z)
