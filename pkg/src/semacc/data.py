"""Labeled feature sets, CSV I/O and the joint real+synthetic dataset."""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    InvalidDataset,
    MalformedHeader,
    MalformedValue,
    MissingFile,
    NonFiniteValue,
    RaggedRow,
    UnknownSyntheticLabel,
)


class Source(str, enum.Enum):
    REAL = "real"
    SYNTHETIC = "synthetic"


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FeatureDataset:
    """An ``n x D`` matrix of feature vectors with one id and class label per row."""

    ids: tuple
    labels: tuple
    features: np.ndarray
    source: Source

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        labels = tuple(str(lab) for lab in self.labels)
        features = _frozen(self.features)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "source", Source(self.source))

        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise InvalidDataset(f"features must be a non-empty 2-D matrix, got shape {features.shape}")
        n = features.shape[0]
        if len(ids) != n or len(labels) != n:
            raise InvalidDataset(f"{len(ids)} ids / {len(labels)} labels for {n} feature rows")
        seen = set()
        for i in ids:
            if i in seen:
                raise DuplicateId(i)
            seen.add(i)
        bad = np.flatnonzero(~np.isfinite(features).all(axis=1))
        if bad.size:
            raise NonFiniteValue(int(bad[0]) + 1)
        if any(lab == "" for lab in labels):
            raise InvalidDataset("class labels must be non-empty strings")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    @property
    def classes(self):
        """Sorted distinct class labels."""
        return sorted(set(self.labels))


@dataclass(frozen=True, eq=False)
class CombinedDataset:
    real: FeatureDataset
    synthetic: FeatureDataset

    def __post_init__(self):
        if self.real.dim != self.synthetic.dim:
            raise DimensionMismatch(self.real.dim, self.synthetic.dim)
        known = set(self.real.labels)
        for lab in self.synthetic.labels:
            if lab not in known:
                raise UnknownSyntheticLabel(lab)

    @property
    def n_total(self):
        return self.real.n + self.synthetic.n

    @property
    def features(self):
        """Stacked feature matrix, real rows first."""
        return np.vstack([self.real.features, self.synthetic.features])

    @property
    def ids(self):
        return self.real.ids + self.synthetic.ids

    @property
    def labels(self):
        return self.real.labels + self.synthetic.labels

    @property
    def is_synthetic(self):
        return np.r_[np.zeros(self.real.n, bool), np.ones(self.synthetic.n, bool)]


def combine(real, synthetic):
    """Join real and synthetic feature sets for a joint embedding."""
    return CombinedDataset(real, synthetic)


@dataclass(frozen=True, eq=False)
class Embedding2D:
    """2-D coordinates for the combined dataset, in input order (real rows first)."""

    ids: tuple
    labels: tuple
    is_synthetic: np.ndarray
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "labels", tuple(str(lab) for lab in self.labels))
        object.__setattr__(self, "is_synthetic", _frozen(self.is_synthetic, bool))
        coords = _frozen(self.coords)
        object.__setattr__(self, "coords", coords)
        n = len(self.ids)
        if coords.shape != (n, 2) or len(self.labels) != n or self.is_synthetic.shape != (n,):
            raise InvalidDataset("embedding ids, labels, flags and coordinates disagree in length")
        if not np.isfinite(coords).all():
            raise InvalidDataset("embedding coordinates must be finite")
        first_synth = int(np.argmax(self.is_synthetic)) if self.is_synthetic.any() else n
        if not self.is_synthetic[first_synth:].all():
            raise InvalidDataset("real rows must precede synthetic rows")

    @property
    def n(self):
        return len(self.ids)

    @property
    def n_real(self):
        return int((~self.is_synthetic).sum())

    @property
    def real_coords(self):
        return self.coords[~self.is_synthetic]

    @property
    def synthetic_coords(self):
        return self.coords[self.is_synthetic]

    @property
    def real_labels(self):
        return tuple(lab for lab, s in zip(self.labels, self.is_synthetic) if not s)

    @property
    def synthetic_labels(self):
        return tuple(lab for lab, s in zip(self.labels, self.is_synthetic) if s)

    @property
    def synthetic_ids(self):
        return tuple(i for i, s in zip(self.ids, self.is_synthetic) if s)


# -- CSV ------------------------------------------------------------------------

def load_feature_csv(path, source):
    """Read a feature file with header ``id,label,f0,...,f{D-1}``.

    Data rows are numbered from 1 (the header is not counted) in error
    messages.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    with open(path, encoding="utf-8-sig", newline="") as fh:
        return _parse_feature_rows(csv.reader(fh), source, prefix="f")


def parse_feature_csv(text, source):
    return _parse_feature_rows(csv.reader(io.StringIO(text, newline="")), source, prefix="f")


def _check_header(header, prefix):
    if header is None:
        raise MalformedHeader("file is empty")
    if len(header) < 3 or header[0] != "id" or header[1] != "label":
        raise MalformedHeader(f"expected 'id,label,{prefix}0,...', got {','.join(header)[:80]!r}")
    expected = [f"{prefix}{j}" for j in range(len(header) - 2)]
    if header[2:] != expected:
        raise MalformedHeader(f"value columns must be named {prefix}0..{prefix}{len(expected) - 1} in order")
    return len(expected)


def _parse_feature_rows(reader, source, prefix):
    header = next(reader, None)
    dim = _check_header(header, prefix)
    ids, labels, rows = [], [], []
    seen = set()
    for r, rec in enumerate(reader, start=1):
        if not rec:
            continue
        if len(rec) != dim + 2:
            raise RaggedRow(r)
        point_id = rec[0]
        if point_id in seen:
            raise DuplicateId(point_id)
        seen.add(point_id)
        values = np.empty(dim)
        for j, tok in enumerate(rec[2:]):
            try:
                values[j] = float(tok)
            except ValueError:
                raise MalformedValue(r, tok) from None
        if not np.isfinite(values).all():
            raise NonFiniteValue(r)
        ids.append(point_id)
        labels.append(rec[1])
        rows.append(values)
    if not rows:
        raise InvalidDataset("feature file contains no data rows")
    return FeatureDataset(ids, labels, np.vstack(rows), source)


def format_float(x):
    """Shortest repr that round-trips a float64 exactly."""
    return repr(float(x))


def feature_csv_text(dataset):
    out = io.StringIO()
    out.write(",".join(["id", "label"] + [f"f{j}" for j in range(dataset.dim)]) + "\n")
    for point_id, label, row in zip(dataset.ids, dataset.labels, dataset.features):
        out.write(_csv_field(point_id) + "," + _csv_field(label) + ",")
        out.write(",".join(map(format_float, row.tolist())) + "\n")
    return out.getvalue()


def write_feature_csv(dataset, path):
    Path(path).write_text(feature_csv_text(dataset), encoding="utf-8", newline="")


def _csv_field(s):
    if any(ch in s for ch in ',"\r\n'):
        return '"' + s.replace('"', '""') + '"'
    return s
