"""Gaussian-blob stand-in for real/synthetic feature sets."""
from __future__ import annotations

import numpy as np

from .data import FeatureDataset, Source


def blob_means(n_classes, dim, separation):
    """Class means on scaled basis vectors, so every pair is ``separation`` apart."""
    return np.eye(n_classes, dim) * (separation / np.sqrt(2.0))


def make_blobs(n_classes=5, dim=50, per_class=120, separation=10.0, sigma=1.0, seed=0,
               source=Source.REAL, prefix=None):
    rng = np.random.Generator(np.random.PCG64(seed))
    means = blob_means(n_classes, dim, separation * sigma)
    labels = np.repeat([f"class{k}" for k in range(n_classes)], per_class)
    feats = means[np.repeat(np.arange(n_classes), per_class)] + sigma * rng.standard_normal(
        (n_classes * per_class, dim))
    prefix = prefix or ("real" if Source(source) is Source.REAL else "synth")
    ids = [f"{prefix}_{i:05d}" for i in range(len(labels))]
    return FeatureDataset(ids, labels.tolist(), feats, source)


def blob_benchmark(n_classes=5, dim=50, per_class=120, separation=10.0, seed=0):
    """Real and synthetic sets drawn from the same class distributions."""
    real = make_blobs(n_classes, dim, per_class, separation, seed=seed, source=Source.REAL)
    synth = make_blobs(n_classes, dim, per_class, separation, seed=seed + 1, source=Source.SYNTHETIC)
    return real, synth
