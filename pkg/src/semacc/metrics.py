"""Classifier-probability baselines: Inception Score and direct accuracy."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    InvalidDistribution,
    MalformedHeader,
    MalformedValue,
    MissingFile,
    RaggedRow,
    TooFewRows,
    UnknownLabel,
)

ROW_SUM_TOL = 1e-6
MARGINAL_FLOOR = 1e-12
CLASSES_PREFIX = "# classes:"


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Per-image class distributions (``n x C``) with ids and optional true labels."""

    ids: tuple
    rows: np.ndarray
    class_names: tuple
    labels: tuple = ()

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "class_names", tuple(str(c) for c in self.class_names))
        object.__setattr__(self, "labels", tuple(str(lab) for lab in self.labels))
        if rows.ndim != 2 or rows.shape[1] != len(self.class_names):
            raise ValueError(f"rows of shape {rows.shape} do not match {len(self.class_names)} class names")
        if len(self.ids) != len(rows) or (self.labels and len(self.labels) != len(rows)):
            raise ValueError("ids/labels do not match the number of rows")
        ok = (np.isfinite(rows).all(axis=1)
              & (rows >= 0).all(axis=1) & (rows <= 1).all(axis=1)
              & (np.abs(rows.sum(axis=1) - 1.0) <= ROW_SUM_TOL))
        if not ok.all():
            raise InvalidDistribution(int(np.argmin(ok)))

    @classmethod
    def from_rows(cls, rows, labels=(), class_names=None):
        rows = np.asarray(rows, dtype=float)
        if class_names is None:
            class_names = [str(k) for k in range(rows.shape[1])]
        return cls(ids=[str(i) for i in range(len(rows))], rows=rows,
                   class_names=class_names, labels=labels)


def inception_score(probs, splits=10, shuffle_seed=None):
    """exp(E_x KL(p(y|x) || p(y))) per split; returns (mean, std) over splits.

    Splits are contiguous; when ``n`` is not divisible the first splits get
    one extra row. ``shuffle_seed`` permutes rows first.
    """
    p = probs.rows if isinstance(probs, ProbabilityMatrix) else np.asarray(probs, dtype=float)
    if not isinstance(probs, ProbabilityMatrix):
        ProbabilityMatrix.from_rows(p)  # validates
    if splits < 1 or len(p) < splits:
        raise TooFewRows(f"{len(p)} rows cannot be divided into {splits} splits")
    if shuffle_seed is not None:
        p = p[np.random.Generator(np.random.PCG64(shuffle_seed)).permutation(len(p))]
    scores = []
    for part in np.array_split(p, splits):
        marginal = np.maximum(part.mean(axis=0), MARGINAL_FLOOR)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(part > 0, part * (np.log(part) - np.log(marginal)), 0.0)
        scores.append(np.exp(terms.sum(axis=1).mean()))
    scores = np.asarray(scores)
    return float(scores.mean()), float(scores.std())


def direct_accuracy(probs, true_labels=None):
    """Fraction of rows whose argmax class (first on ties) equals the true label."""
    labels = tuple(probs.labels if true_labels is None else (str(t) for t in true_labels))
    if len(labels) != len(probs.rows):
        raise ValueError("one true label per row is required")
    index = {name: k for k, name in enumerate(probs.class_names)}
    for lab in labels:
        if lab not in index:
            raise UnknownLabel(lab)
    truth = np.array([index[lab] for lab in labels])
    return float(np.mean(np.argmax(probs.rows, axis=1) == truth))


def load_probability_csv(path):
    """Read ``id,label,p0,...,p{C-1}`` rows.

    An optional first line ``# classes: name0,name1,...`` names the
    columns; without it the classes are called ``"0"``..``"C-1"``.
    The label column may be empty when true labels are unknown.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    return parse_probability_csv(path.read_text(encoding="utf-8-sig"))


def parse_probability_csv(text):
    lines = io.StringIO(text, newline="")
    first = lines.readline()
    names = None
    if first.startswith(CLASSES_PREFIX):
        names = next(csv.reader([first[len(CLASSES_PREFIX):].strip()]))
        names = [n.strip() for n in names]
    else:
        lines.seek(0)
    reader = csv.reader(lines)
    header = next(reader, None)
    if not header or header[:2] != ["id", "label"] or len(header) < 3:
        raise MalformedHeader("expected header 'id,label,p0,...'")
    n_cls = len(header) - 2
    if header[2:] != [f"p{k}" for k in range(n_cls)]:
        raise MalformedHeader(f"probability columns must be named p0..p{n_cls - 1} in order")
    if names is None:
        names = [str(k) for k in range(n_cls)]
    elif len(names) != n_cls:
        raise MalformedHeader(f"{len(names)} class names for {n_cls} probability columns")
    ids, labels, rows = [], [], []
    for r, rec in enumerate(reader, start=1):
        if not rec:
            continue
        if len(rec) != n_cls + 2:
            raise RaggedRow(r)
        try:
            rows.append([float(v) for v in rec[2:]])
        except ValueError:
            raise MalformedValue(r, ",".join(rec[2:])[:40]) from None
        ids.append(rec[0])
        labels.append(rec[1])
    if not rows:
        raise TooFewRows("probability file has no rows")
    if any(lab == "" for lab in labels):
        labels = []
    return ProbabilityMatrix(ids=ids, rows=np.array(rows), class_names=names, labels=labels)


def probability_csv_text(probs):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    out.write(CLASSES_PREFIX + " ")
    w.writerow(probs.class_names)
    w.writerow(["id", "label"] + [f"p{k}" for k in range(len(probs.class_names))])
    labels = probs.labels or ("",) * len(probs.ids)
    for i, lab, row in zip(probs.ids, labels, probs.rows):
        w.writerow([i, lab] + [repr(float(v)) for v in row])
    return out.getvalue()
