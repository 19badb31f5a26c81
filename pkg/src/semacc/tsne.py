"""Exact t-SNE: perplexity-calibrated Gaussian affinities, Student-t output
kernel, early exaggeration and momentum gradient descent with adaptive gains.

Everything is O(n^2) in memory and time; there is no Barnes-Hut
approximation.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numba
import numpy as np

from .errors import AllZeroDistances, CalibrationFailed, NumericalDivergence

log = logging.getLogger(__name__)

PROB_FLOOR = 1e-12
INIT_SCALE = 1e-4
MIN_GAIN = 0.01


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    n_iter: int = 1000
    learning_rate: float = 200.0
    early_exaggeration_factor: float = 12.0
    early_exaggeration_iters: int = 250
    momentum_initial: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 42
    perplexity_tolerance: float = 1e-3
    max_calibration_iters: int = 64
    adaptive_gains: bool = True

    def __post_init__(self):
        if not self.perplexity > 0:
            raise ValueError("perplexity must be positive")
        if self.n_iter < 1:
            raise ValueError("n_iter must be positive")
        if not self.learning_rate > 0 or not self.early_exaggeration_factor > 0:
            raise ValueError("learning_rate and early_exaggeration_factor must be positive")
        if not 0 <= self.early_exaggeration_iters <= self.n_iter:
            raise ValueError("early_exaggeration_iters must lie in [0, n_iter]")
        if not 0 <= self.momentum_switch_iter <= self.n_iter:
            raise ValueError("momentum_switch_iter must lie in [0, n_iter]")
        for m in (self.momentum_initial, self.momentum_final):
            if not 0 <= m < 1:
                raise ValueError("momentum must lie in [0, 1)")
        if not self.perplexity_tolerance > 0 or self.max_calibration_iters < 1:
            raise ValueError("calibration tolerance and iteration budget must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


class RowCalibration(NamedTuple):
    probs: np.ndarray
    precision: float  # beta = 1 / (2 sigma^2)
    perplexity: float
    converged: bool

    @property
    def sigma(self):
        return float(np.sqrt(0.5 / self.precision))


def _row_perplexity(shifted, beta):
    w = np.exp(-beta * shifted)
    total = w.sum()
    entropy = np.log(total) + beta * np.dot(shifted, w) / total
    return w / total, float(np.exp(entropy))


def calibrate_row(distances_sq, perplexity, tolerance=1e-3, max_iters=64):
    """Find the Gaussian precision whose conditional row has the target perplexity.

    Starts at precision 1, doubles or halves it until the target is
    bracketed, then bisects. If the tolerance is not met within
    ``max_iters`` evaluations the closest row found is returned with
    ``converged=False``.
    """
    d = np.asarray(distances_sq, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("distances_sq must be a non-empty vector")
    if not (d > 0).any():
        raise AllZeroDistances("row has no strictly positive distance")
    # exp(-beta * d) normalises identically after shifting by the minimum
    shifted = d - d.min()

    beta, lo, hi = 1.0, 0.0, np.inf
    best = None
    for _ in range(max_iters):
        probs, perp = _row_perplexity(shifted, beta)
        err = perp - perplexity
        if best is None or abs(err) < abs(best[1] - perplexity):
            best = (probs, perp, beta)
        if abs(err) <= tolerance:
            return RowCalibration(probs, beta, perp, True)
        if err > 0:  # too flat: sharpen
            lo = beta
            beta = beta * 2.0 if np.isinf(hi) else 0.5 * (beta + hi)
        else:
            hi = beta
            beta = 0.5 * (lo + beta) if lo > 0 else beta * 0.5
    probs, perp, b = best
    return RowCalibration(probs, b, perp, False)


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetric joint affinities with zero diagonal, summing to one."""

    P: np.ndarray
    precisions: np.ndarray = field(repr=False)
    row_perplexities: np.ndarray = field(repr=False)
    failed_rows: tuple = ()

    @property
    def n(self):
        return self.P.shape[0]


def squared_distances(points):
    x = np.asarray(points, dtype=float)
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def _check_points(x, perplexity):
    if x.ndim != 2:
        raise ValueError("points must be a 2-D matrix")
    n = x.shape[0]
    if n < 3:
        raise ValueError("t-SNE needs at least 3 points")
    if not perplexity < n:
        raise ValueError(f"perplexity {perplexity} must be smaller than the number of points {n}")
    if not np.isfinite(x).all():
        raise ValueError("points must be finite")


def build_affinities(points, config):
    """Calibrate every conditional row, then symmetrise: P = (P_cond + P_cond^T) / 2n."""
    x = np.asarray(points, dtype=float)
    _check_points(x, config.perplexity)
    n = x.shape[0]
    dist = squared_distances(x)
    cond = np.zeros((n, n))
    precisions = np.empty(n)
    perps = np.empty(n)
    failed = []
    mask = ~np.eye(n, dtype=bool)
    for i in range(n):
        try:
            row = calibrate_row(dist[i, mask[i]], config.perplexity,
                                config.perplexity_tolerance, config.max_calibration_iters)
        except AllZeroDistances:
            raise AllZeroDistances(f"row {i}: every other point coincides with it") from None
        cond[i, mask[i]] = row.probs
        precisions[i] = row.precision
        perps[i] = row.perplexity
        if not row.converged:
            failed.append(i)
    if failed:
        msg = (f"perplexity calibration missed tolerance {config.perplexity_tolerance} "
               f"on {len(failed)} row(s), first: {failed[:10]}")
        log.warning(msg)
        warnings.warn(msg, CalibrationFailed, stacklevel=2)
    P = (cond + cond.T) / (2.0 * n)
    return AffinityMatrix(P=P, precisions=precisions, row_perplexities=perps, failed_rows=tuple(failed))


def _as_p(P):
    return P.P if isinstance(P, AffinityMatrix) else np.asarray(P, dtype=float)


def _floored(P):
    pf = np.maximum(P, PROB_FLOOR)
    np.fill_diagonal(pf, 0.0)
    return pf


def _student_t(Y):
    num = 1.0 / (1.0 + squared_distances(Y))
    np.fill_diagonal(num, 0.0)
    return num


def kl_divergence(P, embedding):
    """KL(P || Q) with both matrices floored at ``PROB_FLOOR`` off the diagonal."""
    p = _as_p(P)
    Y = np.asarray(embedding, dtype=float)
    if p.shape != (Y.shape[0], Y.shape[0]):
        raise ValueError(f"P of shape {p.shape} does not match {Y.shape[0]} embedded points")
    num = _student_t(Y)
    q = _floored(num / num.sum())
    pf = _floored(p)
    off = ~np.eye(len(p), dtype=bool)
    return float(np.sum(pf[off] * np.log(pf[off] / q[off])))


def kl_gradient(P, embedding):
    """Analytic gradient 4 * sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2)."""
    pf = _floored(_as_p(P))
    Y = np.asarray(embedding, dtype=float)
    num = _student_t(Y)
    q = np.maximum(num / num.sum(), PROB_FLOOR)
    w = (pf - q) * num
    return 4.0 * (w.sum(axis=1)[:, None] * Y - w @ Y)


@numba.njit(cache=True)
def _gradient_step(Y, P, exag, want_kl, grad):
    """One fused pass: Student-t normaliser, gradient into ``grad``, optional KL.

    Accumulation order is fixed so results are bit-reproducible.
    """
    n = Y.shape[0]
    s = 0.0
    for i in range(n):
        a0 = Y[i, 0]
        a1 = Y[i, 1]
        for j in range(i + 1, n):
            d0 = a0 - Y[j, 0]
            d1 = a1 - Y[j, 1]
            s += 1.0 / (1.0 + d0 * d0 + d1 * d1)
    inv = 1.0 / (2.0 * s)
    kl = 0.0
    for i in range(n):
        a0 = Y[i, 0]
        a1 = Y[i, 1]
        g0 = 0.0
        g1 = 0.0
        for j in range(n):
            if j == i:
                continue
            d0 = a0 - Y[j, 0]
            d1 = a1 - Y[j, 1]
            w = 1.0 / (1.0 + d0 * d0 + d1 * d1)
            q = max(w * inv, PROB_FLOOR)
            p = P[i, j]
            if want_kl:
                kl += p * np.log(p / q)
            m = (exag * p - q) * w
            g0 += m * d0
            g1 += m * d1
        grad[i, 0] = 4.0 * g0
        grad[i, 1] = 4.0 * g1
    return kl


@dataclass(eq=False)
class TsneResult:
    coords: np.ndarray
    affinities: AffinityMatrix
    kl_trace: list  # (t, KL of the un-exaggerated P) after t updates


def run_tsne(points, config, affinities=None, record_kl=False):
    x = np.asarray(points, dtype=float)
    _check_points(x, config.perplexity)
    if affinities is None:
        affinities = build_affinities(x, config)
    n = x.shape[0]
    P = np.ascontiguousarray(_floored(affinities.P))

    rng = np.random.Generator(np.random.PCG64(config.seed))
    Y = INIT_SCALE * rng.standard_normal((n, 2))
    Y -= Y.mean(axis=0)
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    grad = np.empty_like(Y)
    trace = []

    for t in range(config.n_iter + 1):
        exag = config.early_exaggeration_factor if t < config.early_exaggeration_iters else 1.0
        if t == config.n_iter:
            if record_kl:
                trace.append((t, kl_divergence(P, Y)))
            break
        kl = _gradient_step(Y, P, exag, record_kl, grad)
        if record_kl:
            trace.append((t, kl))

        momentum = config.momentum_initial if t < config.momentum_switch_iter else config.momentum_final
        if config.adaptive_gains:
            same = (grad > 0) == (update > 0)
            gains = np.where(same, gains * 0.8, gains + 0.2)
            np.maximum(gains, MIN_GAIN, out=gains)
            update = momentum * update - config.learning_rate * gains * grad
        else:
            update = momentum * update - config.learning_rate * grad
        Y = Y + update
        Y -= Y.mean(axis=0)
        if not np.isfinite(Y).all():
            raise NumericalDivergence(t + 1)

    return TsneResult(coords=Y, affinities=affinities, kl_trace=trace)


def tsne_embed(points, config):
    """Embed ``points`` (n x k) into 2-D; deterministic for a fixed seed."""
    return run_tsne(points, config).coords
