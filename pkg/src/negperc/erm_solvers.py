"""Synthetic data and the two margin solvers.

The linear-programming solver maximizes <v, theta> over the margin polytope
intersected with the unit ball, via projected subgradient steps on its dual;
the gradient-descent solver minimizes the norm-coupled smooth surrogate risk
and stops once the normalized iterate achieves the target margin.  Both are
deterministic given the dataset seed and an explicit solver seed.
"""

from __future__ import annotations

import math
import struct
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as sciopt
from scipy import special

from .link_model import LinkFunction
from .seeds import derive_seed

_MAGIC = b"NPERCDS1"


@dataclass
class Dataset:
    """Synthetic sample (X, y) with its generating-model metadata.

    Rows of ``features`` are i.i.d. standard normal; labels are +-1, either
    fair coin flips (pure noise) or Bernoulli through the link applied to the
    first coordinate (the planted direction is the first basis vector).
    """

    features: np.ndarray
    labels: np.ndarray
    model: str  # "pure_noise" | "linear_signal"
    link: LinkFunction | None
    theta_star: np.ndarray | None
    seed: int

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def signed_features(self) -> np.ndarray:
        """Rows y_i x_i; every solver works on this matrix."""
        return self.labels[:, None] * self.features

    # --- binary snapshot ---------------------------------------------------
    #
    # Layout (little endian):
    #   8 bytes   magic "NPERCDS1"
    #   u32 n, u32 d
    #   u8 model tag (0 = pure_noise, 1 = linear_signal)
    #   f64 alpha (0.0 when not applicable)
    #   u64 seed
    #   n*d f64 features, row major
    #   n   i8  labels
    #
    # The planted direction is definitionally the first basis vector and is
    # not stored.

    def save(self, path) -> None:
        if self.model == "linear_signal" and self.link.kind != "logistic":
            raise ValueError("snapshot format stores logistic links only")
        alpha = self.link.alpha if (self.link and self.link.alpha) else 0.0
        tag = 0 if self.model == "pure_noise" else 1
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<IIBdQ", self.n, self.d, tag, alpha, self.seed))
            fh.write(np.ascontiguousarray(self.features, dtype="<f8").tobytes())
            fh.write(self.labels.astype("<i1").tobytes())

    @staticmethod
    def load(path) -> "Dataset":
        with open(path, "rb") as fh:
            if fh.read(8) != _MAGIC:
                raise ValueError("not a dataset snapshot")
            n, d, tag, alpha, seed = struct.unpack("<IIBdQ", fh.read(25))
            feats = np.frombuffer(fh.read(n * d * 8), dtype="<f8").reshape(n, d).copy()
            labels = np.frombuffer(fh.read(n), dtype="<i1").astype(float)
        if tag == 0:
            return Dataset(feats, labels, "pure_noise", None, None, seed)
        theta = np.zeros(d)
        theta[0] = 1.0
        return Dataset(feats, labels, "linear_signal", LinkFunction.logistic(alpha), theta, seed)


def sample_dataset(n: int, d: int, model: str, seed: int, link: LinkFunction | None = None) -> Dataset:
    """Draw a dataset; bit-identical for identical arguments."""
    if n < 1 or d < 1:
        raise ValueError("need n, d >= 1")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    if model == "pure_noise":
        y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return Dataset(x, y, model, None, None, seed)
    if model == "linear_signal":
        if link is None or link.is_pure_noise:
            raise ValueError("linear_signal needs a signal link")
        p = link.prob(x[:, 0])  # planted direction = first basis vector
        y = np.where(rng.random(n) < p, 1.0, -1.0)
        theta = np.zeros(d)
        theta[0] = 1.0
        return Dataset(x, y, model, link, theta, seed)
    raise ValueError(f"unknown model {model!r}")


def margin(theta: np.ndarray, data: Dataset) -> float:
    """min_i y_i <x_i, theta/||theta||>."""
    theta = np.asarray(theta, dtype=float)
    nt = float(np.linalg.norm(theta))
    if nt == 0.0:
        raise ValueError("margin of the zero vector is undefined")
    return float(np.min(data.signed_features() @ (theta / nt)))


def lp_direction(data: Dataset) -> np.ndarray:
    """Seed direction of the LP solver: uniform on the sphere for pure
    noise, the label-weighted sample mean under a signal model."""
    if data.model == "pure_noise":
        rng = np.random.default_rng(derive_seed(data.seed, "lp-direction"))
        v = rng.standard_normal(data.d)
        return v / np.linalg.norm(v)
    return data.signed_features().mean(axis=0)


@dataclass
class SolverReport:
    theta_hat: np.ndarray
    norm: float
    margin: float
    success: bool
    iterations: int
    duality_gap: float | None = None
    grad_norm: float | None = None
    wall_time: float = 0.0
    converged: bool = True
    flags: list = field(default_factory=list)


def margin_tolerance(kappa: float) -> float:
    """Symmetric classification slack around the exact margin event."""
    return 1e-4 * (1.0 + abs(kappa))


def lp_solve(
    data: Dataset,
    kappa: float,
    v: np.ndarray | None = None,
    tol: float = 1e-6,
    max_iters: int | None = None,
    step_scale: float = 1.0,
) -> SolverReport:
    """Margin LP via projected subgradient on the dual.

    Dual objective g(lam) = ||v + A^T lam|| - kappa sum(lam) over lam >= 0,
    with A the signed-feature matrix; the primal direction is the unit vector
    along w = v + A^T lam.  Steps are step_scale/sqrt(n t); the averaged dual
    iterate provides the reported duality gap.  Success means the recovered
    unit vector achieves margin kappa within the classification slack (unit
    norm holds by construction).

    Early exits: the success certificate (margin reached within 1e-12) and a
    conservative infeasibility plateau (best margin far below kappa and no
    longer improving); everything else runs to ``max_iters`` and is reported
    unconverged.
    """
    t0 = time.perf_counter()
    A = data.signed_features()
    n, d = A.shape
    if v is None:
        v = lp_direction(data)
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0.0:
        raise ValueError("seed direction must be nonzero")
    if max_iters is None:
        max_iters = 20 * n
    mtol = margin_tolerance(kappa)
    step0 = step_scale / math.sqrt(n)

    lam = np.zeros(n)
    lam_sum = np.zeros(n)
    w = v.copy()
    best_margin = -math.inf
    best_u = v / np.linalg.norm(v)
    flags = []
    converged = False
    check_every = 1000
    last_check_margin = -math.inf
    t = 0
    for t in range(1, max_iters + 1):
        nw = float(np.linalg.norm(w))
        if nw < 1e-12 * max(1.0, float(np.linalg.norm(v))):
            flags.append("dual-collapse")  # w ~ 0: no unit-norm optimum
            converged = True
            break
        u = w / nw
        scores = A @ u
        m = float(scores.min())
        if m > best_margin:
            best_margin = m
            best_u = u
        if best_margin >= kappa - 1e-12:
            converged = True
            break
        if t % check_every == 0:
            # plateau: margin far below target and barely moving
            far = best_margin < kappa - max(0.2, 2000.0 * tol)
            slow = best_margin - last_check_margin < 0.05 * (kappa - best_margin)
            if t >= 8000 and far and slow:
                converged = True
                flags.append("infeasible-plateau")
                break
            last_check_margin = best_margin
        lam -= (step0 / math.sqrt(t)) * (scores - kappa)
        np.maximum(lam, 0.0, out=lam)
        lam_sum += lam
        w = v + lam @ A

    lam_bar = lam_sum / max(t, 1)
    w_bar = v + lam_bar @ A
    dual_value = float(np.linalg.norm(w_bar)) - kappa * float(lam_bar.sum())
    primal_value = float(v @ best_u)
    success = best_margin >= kappa - mtol
    return SolverReport(
        theta_hat=best_u,
        norm=1.0,
        margin=best_margin,
        success=success,
        iterations=t,
        duality_gap=dual_value - primal_value,
        wall_time=time.perf_counter() - t0,
        converged=converged or best_margin >= kappa - mtol,
        flags=flags,
    )


def lp_success_equivalence_check(data: Dataset, kappa: float, v: np.ndarray | None = None) -> bool:
    """Do the ball-constrained solve and the norm-free variant agree?

    The norm-free variant maximizes <v, theta> subject to the margin
    constraints only; success there means the optimizer has norm >= 1 (an
    unbounded program counts as success).  Solved with a simplex-based LP so
    the comparison is independent of the first-order path.
    """
    if v is None:
        v = lp_direction(data)
    A = data.signed_features()
    n, d = A.shape
    res = sciopt.linprog(
        -np.asarray(v, dtype=float),
        A_ub=-A,
        b_ub=-kappa * np.ones(n),
        bounds=[(None, None)] * d,
        method="highs",
    )
    if res.status == 3:
        free_success = True  # unbounded ray: norm blow-up
    elif res.status == 0:
        free_success = bool(np.linalg.norm(res.x) >= 1.0 - 1e-9)
    else:
        raise ArithmeticError(f"norm-free variant failed with status {res.status}")
    ball = lp_solve(data, kappa, v=v)
    return ball.success == free_success


@dataclass
class GdConfig:
    loss: str = "logistic_softplus"
    eta: float = 0.05
    max_iters: int = 100_000
    batch_size: int = 0  # 0 = full batch
    stop_margin: float | None = None  # defaults to the solve's kappa
    seed: int = 0


def softplus_loss(x):
    """l(x) = log(1 + exp(-x)), decreasing with a tight exponential tail."""
    x = np.asarray(x, dtype=float)
    return np.logaddexp(0.0, -x)


def softplus_loss_grad(x):
    """l'(x) = -1 / (1 + exp(x))."""
    return -special.expit(-np.asarray(x, dtype=float))


def gd_risk(theta: np.ndarray, data: Dataset, kappa: float) -> float:
    """(1/n) sum l(y_i <x_i, theta> - kappa ||theta||)."""
    theta = np.asarray(theta, dtype=float)
    scores = data.signed_features() @ theta
    return float(np.mean(softplus_loss(scores - kappa * np.linalg.norm(theta))))


def gd_gradient(theta: np.ndarray, data: Dataset, kappa: float) -> np.ndarray:
    """Exact gradient of :func:`gd_risk`, including the norm-coupling term."""
    theta = np.asarray(theta, dtype=float)
    A = data.signed_features()
    nt = float(np.linalg.norm(theta))
    lp = softplus_loss_grad(A @ theta - kappa * nt)
    return (lp @ A) / data.n - (kappa * float(np.mean(lp)) / nt) * theta


def gd_smoothness_bound(data: Dataset, kappa: float, norm_floor: float) -> float:
    """Operator-norm bound on the risk Hessian outside ||theta|| < norm_floor."""
    A = data.signed_features()
    op = float(np.linalg.norm(A, ord=2)) ** 2 / data.n
    colsum = float(np.linalg.norm(A.sum(axis=0))) / data.n
    return 0.25 * (op + 2.0 * abs(kappa) * colsum + kappa * kappa) + abs(kappa) / norm_floor


def gd_solve(data: Dataset, kappa: float, config: GdConfig | None = None):
    """Gradient descent on the norm-coupled surrogate risk.

    Full-batch by default; a positive batch size switches to minibatch
    passes sampled without replacement per epoch, with the stopping margin
    checked on the full sample at epoch boundaries.  Iterates whose norm
    collapses are re-projected to a small floor (flagged); NaN loss aborts.

    Returns (report, trajectory) where the trajectory records iterate norms
    and full-batch risks at checkpoints for monotonicity diagnostics.
    """
    if config is None:
        config = GdConfig()
    if config.loss != "logistic_softplus":
        raise ValueError(f"unsupported loss {config.loss!r}")
    t0 = time.perf_counter()
    A = data.signed_features()
    n, d = A.shape
    target = kappa if config.stop_margin is None else config.stop_margin
    rng = np.random.default_rng(derive_seed(data.seed, "gd-init", config.seed))
    theta = rng.standard_normal(d)
    theta /= np.linalg.norm(theta)

    norm_floor = 1e-3
    flags = []
    norms, risks, checkpoints = [], [], []
    achieved = -math.inf
    it = 0
    full_batch = config.batch_size <= 0 or config.batch_size >= n
    batch = n if full_batch else config.batch_size
    order = None

    while it < config.max_iters:
        nt = float(np.linalg.norm(theta))
        if nt < norm_floor:
            theta *= norm_floor / nt
            nt = norm_floor
            if "norm-collapse" not in flags:
                flags.append("norm-collapse")
        if full_batch:
            scores = A @ theta
            m = float(scores.min()) / nt
            achieved = max(achieved, m)
            if it % 200 == 0:
                norms.append(nt)
                risks.append(float(np.mean(softplus_loss(scores - kappa * nt))))
                checkpoints.append(it)
            if m >= target:
                break
            lp = softplus_loss_grad(scores - kappa * nt)
            if not np.all(np.isfinite(lp)):
                flags.append("nan-loss")
                break
            grad = (lp @ A) / n - (kappa * float(np.mean(lp)) / nt) * theta
            theta = theta - config.eta * grad
            it += 1
        else:
            # one epoch of minibatches, then a full-sample margin check
            epoch_rng = np.random.default_rng(derive_seed(data.seed, "gd-epoch", config.seed, it))
            order = epoch_rng.permutation(n)
            stop = False
            for start in range(0, n, batch):
                if it >= config.max_iters:
                    stop = True
                    break
                idx = order[start : start + batch]
                nt = float(np.linalg.norm(theta))
                if nt < norm_floor:
                    theta *= norm_floor / nt
                    nt = norm_floor
                    if "norm-collapse" not in flags:
                        flags.append("norm-collapse")
                sub = A[idx]
                lp = softplus_loss_grad(sub @ theta - kappa * nt)
                if not np.all(np.isfinite(lp)):
                    flags.append("nan-loss")
                    stop = True
                    break
                grad = (lp @ sub) / len(idx) - (kappa * float(np.mean(lp)) / nt) * theta
                theta = theta - config.eta * grad
                it += 1
            nt = float(np.linalg.norm(theta))
            m = float((A @ theta).min()) / nt
            achieved = max(achieved, m)
            norms.append(nt)
            risks.append(gd_risk(theta, data, kappa))
            checkpoints.append(it)
            if m >= target or stop:
                break

    nt = float(np.linalg.norm(theta))
    theta_hat = theta / nt
    final_margin = float((A @ theta_hat).min())
    achieved = max(achieved, final_margin)
    grad_norm = float(np.linalg.norm(gd_gradient(theta, data, kappa)))
    report = SolverReport(
        theta_hat=theta_hat,
        norm=nt,
        margin=achieved,
        success=achieved >= target - margin_tolerance(kappa),
        iterations=it,
        grad_norm=grad_norm,
        wall_time=time.perf_counter() - t0,
        converged=achieved >= target or "nan-loss" not in flags,
        flags=flags,
    )
    trajectory = {
        "checkpoints": np.asarray(checkpoints),
        "norms": np.asarray(norms),
        "risks": np.asarray(risks),
    }
    return report, trajectory


def max_margin_estimate(data: Dataset, budget: int = 12):
    """Certified lower bound on the best achievable margin.

    Every candidate direction certifies its own margin, so the running best
    is a valid lower bound and is monotone in the budget.  Candidates come
    from the least-squares interpolator (exact when n <= d), the LP solver,
    and a margin-target bisection driven by gradient descent.
    """
    A = data.signed_features()
    n, d = A.shape
    best_theta = None
    best = -math.inf

    def offer(theta):
        nonlocal best, best_theta
        theta = np.asarray(theta, dtype=float)
        nt = np.linalg.norm(theta)
        if nt == 0 or not np.all(np.isfinite(theta)):
            return
        m = float((A @ theta).min()) / nt
        if m > best:
            best = m
            best_theta = theta / nt

    # interpolating direction: solve y_i <x_i, theta> = 1 in least squares
    theta_ls, *_ = np.linalg.lstsq(A, np.ones(n), rcond=None)
    offer(theta_ls)
    spent = 0
    lp = lp_solve(data, best - 1e-6 if math.isfinite(best) else -1.0)
    offer(lp.theta_hat)
    spent += 1
    lo = best
    hi = float(np.min(np.linalg.norm(data.features, axis=1)))  # margin <= min ||x_i||
    while spent < budget and hi - lo > 1e-3 * (1.0 + abs(lo)):
        target = 0.5 * (lo + hi)
        rep, _ = gd_solve(data, target, GdConfig(seed=spent))
        offer(rep.theta_hat / np.linalg.norm(rep.theta_hat))
        spent += 1
        if best >= target:
            lo = best
        else:
            hi = target
    return best, best_theta


@dataclass
class RadiusPair:
    outer: float  # radius of the slab-intersection polytope
    inner: float  # radius of the dual hull


def radius_from_margin(kappa_hat: float) -> RadiusPair:
    """Polytope radii from an achieved margin: outer = -1/kappa, inner = -kappa.

    Only defined for negative margins; at kappa >= 0 the polytope is
    unbounded and no finite radius exists.
    """
    if kappa_hat >= 0:
        raise ValueError("radius undefined for nonnegative margin (unbounded polytope)")
    return RadiusPair(outer=-1.0 / kappa_hat, inner=-kappa_hat)
