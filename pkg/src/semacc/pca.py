"""Principal component analysis by dense symmetric eigendecomposition.

The covariance (``D x D``) or Gram (``n x n``) matrix is decomposed,
whichever is smaller. Components are sign-normalised so that the entry of
largest magnitude in each is non-negative, which makes the fit
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, KTooLarge


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # k x D, orthonormal rows
    explained_variance: np.ndarray

    @property
    def k(self):
        return self.components.shape[0]

    @property
    def dim(self):
        return self.components.shape[1]

    def transform(self, data):
        return pca_transform(self, data)


def _fix_signs(components):
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(len(components)), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def _complete_basis(partial, dim, count):
    """Return ``count`` orthonormal rows orthogonal to the rows of ``partial``."""
    proj = np.eye(dim) - partial.T @ partial
    _, vecs = np.linalg.eigh(proj)
    # eigenvalue-1 directions are the orthogonal complement; eigh sorts ascending
    return vecs[:, ::-1][:, :count].T


def pca_fit(data, k):
    """Fit the top-``k`` principal subspace of ``data`` (rows are samples).

    Variances use the ``n - 1`` divisor. Constant data yields zero
    explained variance and an arbitrary (but deterministic) orthonormal
    basis instead of an error.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    n, d = x.shape
    if not 1 <= k <= min(n, d):
        raise KTooLarge(k, n, d)
    mean = x.mean(axis=0)
    xc = x - mean
    denom = max(n - 1, 1)

    if d <= n:
        cov = xc.T @ xc / denom
        vals, vecs = np.linalg.eigh(cov)
        vals = vals[::-1][:k]
        comps = vecs[:, ::-1][:, :k].T
    else:
        gram = xc @ xc.T / denom
        gvals, gvecs = np.linalg.eigh(gram)
        gvals, gvecs = gvals[::-1], gvecs[:, ::-1]
        cutoff = max(n, d) * np.finfo(float).eps * max(gvals[0], 0.0)
        rank = int(np.sum(gvals[:k] > cutoff)) if gvals[0] > 0 else 0
        comps = np.empty((k, d))
        if rank:
            v = xc.T @ gvecs[:, :rank] / np.sqrt(denom * gvals[:rank])
            q, r = np.linalg.qr(v)
            comps[:rank] = (q * np.sign(np.diag(r))).T
        if rank < k:
            comps[rank:] = _complete_basis(comps[:rank], d, k - rank)
        vals = np.r_[gvals[:rank], np.zeros(k - rank)]

    comps = _fix_signs(np.ascontiguousarray(comps))
    return PcaModel(mean=mean, components=comps, explained_variance=np.clip(vals, 0.0, None))


def pca_transform(model, data):
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.dim:
        raise DimensionMismatch(model.dim, x.shape[1])
    return (x - model.mean) @ model.components.T
