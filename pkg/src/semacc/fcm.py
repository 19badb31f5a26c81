"""Fuzzy C-means on the real embedding, cluster labelling and scoring of
synthetic points against the labelled clusters."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptyClusterCollapse, InsufficientClasses

log = logging.getLogger(__name__)

COLLAPSE_DIST = 1e-12
MAX_RESTARTS = 5


@dataclass(frozen=True, eq=False)
class FuzzyClusterModel:
    centroids: np.ndarray  # c x d
    m: float
    memberships: np.ndarray  # n x c, for the points the model was fit on
    objective_trace: tuple
    labels: tuple | None = None
    n_iter: int = 0
    seed: int = 0

    @property
    def n_clusters(self):
        return self.centroids.shape[0]

    def hard_assignments(self):
        return np.argmax(self.memberships, axis=1)


def _sq_dist(points, centroids):
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def memberships_from_sq_dist(d2, m):
    """Memberships u_ij = 1 / sum_k (d_ij / d_ik)^(2/(m-1)), row-wise.

    Evaluated in log space so small fuzzifiers do not overflow. A point
    that coincides with a centroid belongs to it with membership 1 (split
    evenly if it coincides with several).
    """
    d2 = np.atleast_2d(np.asarray(d2, dtype=float))
    u = np.empty_like(d2)
    zero = d2 <= 0.0
    hard = zero.any(axis=1)
    if hard.any():
        z = zero[hard].astype(float)
        u[hard] = z / z.sum(axis=1, keepdims=True)
    soft = ~hard
    if soft.any():
        logw = -np.log(d2[soft]) / (m - 1.0)
        logw -= logw.max(axis=1, keepdims=True)
        w = np.exp(logw)
        u[soft] = w / w.sum(axis=1, keepdims=True)
    return u


def fcm_membership(centroids, m, point):
    """Membership vector of a single point (or matrix of points) to each centroid."""
    c = np.asarray(centroids, dtype=float)
    p = np.asarray(point, dtype=float)
    single = p.ndim == 1
    u = memberships_from_sq_dist(_sq_dist(np.atleast_2d(p), c), m)
    return u[0] if single else u


def _objective(points, centroids, u, m):
    return float(np.sum((u ** m) * _sq_dist(points, centroids)))


def _init_centroids(points, c, rng):
    """Spread-out seeding: each new seed drawn with probability proportional to
    squared distance from the seeds chosen so far."""
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, c):
        total = d2.sum()
        if total <= 0:
            raise EmptyClusterCollapse(f"fewer than {c} distinct points to seed centroids")
        idx = int(rng.choice(n, p=d2 / total))
        chosen.append(idx)
        np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1), out=d2)
    return points[chosen].copy()


def _collapsed(centroids):
    if len(centroids) < 2:
        return False
    d2 = _sq_dist(centroids, centroids)
    np.fill_diagonal(d2, np.inf)
    return bool((np.sqrt(d2) <= COLLAPSE_DIST).any())


def _fit_once(x, c, m, seed, tol, max_iters):
    rng = np.random.Generator(np.random.PCG64(seed))
    v = _init_centroids(x, c, rng)
    trace = []
    it = 0
    for it in range(1, max_iters + 1):
        u = memberships_from_sq_dist(_sq_dist(x, v), m)
        trace.append(_objective(x, v, u, m))
        um = u ** m
        v_new = (um.T @ x) / um.sum(axis=0)[:, None]
        if _collapsed(v_new):
            raise EmptyClusterCollapse(f"centroids coincided at iteration {it}")
        shift = float(np.max(np.sqrt(np.sum((v_new - v) ** 2, axis=1))))
        v = v_new
        if shift < tol:
            break
    u = memberships_from_sq_dist(_sq_dist(x, v), m)
    trace.append(_objective(x, v, u, m))
    return FuzzyClusterModel(centroids=v, m=m, memberships=u, objective_trace=tuple(trace),
                             n_iter=it, seed=seed)


def fcm_fit(points, c, m=2.0, seed=0, tol=1e-5, max_iters=300):
    """Alternate membership and centroid updates until the largest centroid
    move drops below ``tol``.

    A run whose centroids coincide is restarted with ``seed + 1`` and so on,
    at most five times.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if not 1 <= c <= len(x):
        raise ValueError(f"need 1 <= c <= n, got c={c}, n={len(x)}")
    if not m > 1:
        raise ValueError("fuzzifier m must exceed 1")
    if not np.isfinite(x).all():
        raise ValueError("points must be finite")
    last = None
    for attempt in range(MAX_RESTARTS + 1):
        try:
            return _fit_once(x, c, m, seed + attempt, tol, max_iters)
        except EmptyClusterCollapse as exc:
            log.warning("fuzzy c-means restart %d: %s", attempt + 1, exc)
            last = exc
    raise EmptyClusterCollapse(f"clusters collapsed after {MAX_RESTARTS} restarts: {last}")


def assign_cluster_labels(model, real_labels):
    """Give each cluster a distinct class label by greedy majority.

    Real points are hard-assigned to their highest-membership cluster.
    The (cluster, class) pair with the largest count is labelled first,
    then the next largest among the remaining clusters and classes, and
    so on. Ties go to the lower cluster index, then the smaller label.
    """
    labels = [str(lab) for lab in real_labels]
    if len(labels) != len(model.memberships):
        raise ValueError("one label per clustered point is required")
    classes = sorted(set(labels))
    c = model.n_clusters
    if len(classes) < c:
        raise InsufficientClasses(len(classes), c)
    col = {name: k for k, name in enumerate(classes)}
    counts = np.zeros((c, len(classes)), dtype=np.int64)
    np.add.at(counts, (model.hard_assignments(), [col[lab] for lab in labels]), 1)

    assigned = [None] * c
    avail = counts.astype(float)
    for _ in range(c):
        # row-major argmax: first hit is the lowest cluster, then the smallest label
        j, k = np.unravel_index(np.argmax(avail), avail.shape)
        assigned[j] = classes[k]
        avail[j, :] = -np.inf
        avail[:, k] = -np.inf
    return tuple(assigned)


def with_labels(model, labels):
    return replace(model, labels=tuple(labels))


def clustering_accuracy_real(model, real_labels):
    """Fraction of real points whose hard cluster carries their own class label."""
    if model.labels is None:
        raise ValueError("cluster labels have not been assigned")
    pred = np.array(model.labels, dtype=object)[model.hard_assignments()]
    truth = np.array([str(lab) for lab in real_labels], dtype=object)
    return float(np.mean(pred == truth))


@dataclass(frozen=True, eq=False)
class ClassificationResult:
    ids: tuple
    true_labels: tuple
    predicted_labels: tuple
    memberships: np.ndarray = field(repr=False)
    correct: np.ndarray = field(repr=False)

    @property
    def n(self):
        return len(self.ids)

    @property
    def n_correct(self):
        return int(self.correct.sum())

    @property
    def accuracy(self):
        return float(self.correct.mean()) if self.n else 0.0

    def csv_text(self):
        lines = ["id,true_label,pred_label,correct"]
        for i, t, p, ok in zip(self.ids, self.true_labels, self.predicted_labels, self.correct):
            lines.append(f"{_quote(i)},{_quote(t)},{_quote(p)},{int(ok)}")
        return "\n".join(lines) + "\n"


def _quote(s):
    if any(ch in s for ch in ',"\r\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def classify_synthetic(model, synth_coords, synth_labels, synth_ids=None, m=None):
    """Predict each synthetic point's class as the label of its highest-membership cluster.

    ``m`` overrides the fuzzifier used for the reported membership
    vectors; the argmax (and therefore the prediction) does not depend on it.
    """
    if model.labels is None:
        raise ValueError("cluster labels have not been assigned")
    coords = np.asarray(synth_coords, dtype=float).reshape(-1, model.centroids.shape[1])
    truth = tuple(str(lab) for lab in synth_labels)
    if len(truth) != len(coords):
        raise ValueError("one label per synthetic point is required")
    ids = tuple(str(i) for i in synth_ids) if synth_ids is not None else tuple(str(i) for i in range(len(coords)))
    u = fcm_membership(model.centroids, model.m if m is None else m, coords)
    u = u.reshape(len(coords), model.n_clusters)
    best = np.argmax(u, axis=1)  # first maximum on ties
    pred = tuple(model.labels[j] for j in best)
    correct = np.array([p == t for p, t in zip(pred, truth)], dtype=bool)
    return ClassificationResult(ids=ids, true_labels=truth, predicted_labels=pred,
                                memberships=u, correct=correct)
