"""End-to-end evaluation: joint PCA + t-SNE embedding, fuzzy C-means on the
real points, classification of the synthetic points, report and plots.

Each stage writes plain-text artifacts whose header records the digests of
the inputs they were computed from, so stages can be re-run individually
and stale inputs are detected.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import shutil
import tempfile
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .data import Embedding2D, Source, combine, format_float, load_feature_csv
from .errors import (
    CalibrationFailed,
    MalformedHeader,
    MissingClassification,
    MissingFile,
    SemaccError,
    StageError,
    StaleArtifact,
    TooManyPoints,
)
from .fcm import (
    ClassificationResult,
    FuzzyClusterModel,
    assign_cluster_labels,
    classify_synthetic,
    clustering_accuracy_real,
    fcm_fit,
    with_labels,
)
from .metrics import direct_accuracy, inception_score, load_probability_csv
from .pca import pca_fit, pca_transform
from .plot import PlotMode, PlotSpec, legend, render_scatter
from .tsne import TsneConfig, kl_divergence, run_tsne

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EMBEDDING_MAGIC = "# semacc-embedding v1"
CLASSIFICATION_MAGIC = "# semacc-classification v1"

PLOT_FILES = {
    PlotMode.CORRECT_INCORRECT: "plot_correct.svg",
    PlotMode.COLOR_BY_CLASS: "plot_class.svg",
    PlotMode.REAL_VS_SYNTHETIC: "plot_real_vs_synthetic.svg",
}
DEFAULT_PLOT_MODES = (PlotMode.CORRECT_INCORRECT, PlotMode.COLOR_BY_CLASS)


@dataclass(frozen=True)
class Options:
    pca_dims: int = 50
    pca_fit: str = "combined"  # or "real"
    perplexity: float | None = None  # None: synthetic points per class
    tsne_iters: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    early_exaggeration_iters: int = 250
    fuzzifier: float = 2.0
    membership_fuzzifier: float | None = None  # None: same as fuzzifier
    clusters: int | None = None  # None: number of real classes
    fcm_tol: float = 1e-5
    fcm_max_iters: int = 300
    seed: int = 42
    plot_modes: tuple = DEFAULT_PLOT_MODES
    splits: int = 10
    max_points: int = 10000
    kl_trace: bool = False

    def __post_init__(self):
        if self.pca_fit not in ("combined", "real"):
            raise ValueError("pca_fit must be 'combined' or 'real'")
        object.__setattr__(self, "plot_modes", tuple(PlotMode(m) for m in self.plot_modes))
        if self.pca_dims < 1:
            raise ValueError("pca_dims must be positive")


def derived_seed(seed, stage):
    """Stage-specific 32-bit seed derived from the run seed."""
    stages = {"tsne": 1, "fcm": 2}
    return int(np.random.SeedSequence([seed, stages[stage]]).generate_state(1)[0])


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


@contextmanager
def _stage(name, timings):
    t0 = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except (SemaccError, ValueError, ArithmeticError) as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = round(time.perf_counter() - t0, 6)


# -- embedding stage ----------------------------------------------------------------

@dataclass(eq=False)
class EmbedResult:
    embedding: Embedding2D
    meta: dict
    kl_trace: list = field(default_factory=list)


def default_perplexity(n_synthetic, n_classes):
    return n_synthetic / n_classes


def embed(combined, options, input_digests=None):
    """Joint PCA + t-SNE of the real and synthetic features."""
    n, d = combined.n_total, combined.real.dim
    if n > options.max_points:
        raise TooManyPoints(f"{n} points exceed --max-points {options.max_points}; "
                            "exact t-SNE needs O(n^2) memory")
    fit_rows = combined.features if options.pca_fit == "combined" else combined.real.features
    k = min(options.pca_dims, fit_rows.shape[0], d)
    if k < options.pca_dims:
        log.warning("PCA dimension clamped from %d to %d (n=%d, D=%d)", options.pca_dims, k, fit_rows.shape[0], d)
    model = pca_fit(fit_rows, k)
    reduced = pca_transform(model, combined.features)

    n_classes = len(combined.real.classes)
    perplexity = options.perplexity
    if perplexity is None:
        perplexity = default_perplexity(combined.synthetic.n, n_classes)
        if perplexity < 2.0:
            log.warning("default perplexity %.3g raised to 2", perplexity)
            perplexity = 2.0
    tsne_seed = derived_seed(options.seed, "tsne")
    cfg = TsneConfig(perplexity=float(perplexity), n_iter=options.tsne_iters,
                     learning_rate=options.learning_rate,
                     early_exaggeration_factor=options.early_exaggeration,
                     early_exaggeration_iters=min(options.early_exaggeration_iters, options.tsne_iters),
                     momentum_switch_iter=min(250, options.tsne_iters),
                     seed=tsne_seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CalibrationFailed)
        result = run_tsne(reduced, cfg, record_kl=options.kl_trace)
    emb = Embedding2D(ids=combined.ids, labels=combined.labels,
                      is_synthetic=combined.is_synthetic, coords=result.coords)

    total_var = float(np.sum(np.var(fit_rows, axis=0, ddof=1))) if fit_rows.shape[0] > 1 else 0.0
    meta = {
        "inputs": input_digests or {},
        "n_real": combined.real.n,
        "n_synthetic": combined.synthetic.n,
        "feature_dim": d,
        "pca": {
            "requested_dims": options.pca_dims,
            "dims": k,
            "fit_on": options.pca_fit,
            "explained_variance_ratio": (float(model.explained_variance.sum() / total_var)
                                         if total_var > 0 else 0.0),
        },
        "tsne": {
            **dataclasses.asdict(cfg),
            "calibration_failed_rows": len(result.affinities.failed_rows),
            "final_kl": kl_divergence(result.affinities, result.coords),
        },
        "seed": options.seed,
    }
    return EmbedResult(embedding=emb, meta=meta, kl_trace=result.kl_trace)


def embedding_csv_text(embedding, meta):
    out = io.StringIO()
    out.write(EMBEDDING_MAGIC + "\n")
    out.write("# meta=" + json.dumps(meta, sort_keys=True, allow_nan=False) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", "label", "source", "x", "y"])
    for i, lab, s, (x, y) in zip(embedding.ids, embedding.labels, embedding.is_synthetic,
                                 embedding.coords.tolist()):
        w.writerow([i, lab, Source.SYNTHETIC.value if s else Source.REAL.value,
                    format_float(x), format_float(y)])
    return out.getvalue()


def read_embedding_csv(path):
    """Return (Embedding2D, meta, sha256 of the file)."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if len(lines) < 3 or lines[0] != EMBEDDING_MAGIC or not lines[1].startswith("# meta="):
        raise MalformedHeader(f"{path} is not an embedding artifact")
    meta = json.loads(lines[1][len("# meta="):])
    reader = csv.reader(lines[2:])
    if next(reader) != ["id", "label", "source", "x", "y"]:
        raise MalformedHeader("embedding columns must be id,label,source,x,y")
    ids, labels, synth, coords = [], [], [], []
    for rec in reader:
        if not rec:
            continue
        ids.append(rec[0])
        labels.append(rec[1])
        synth.append(Source(rec[2]) is Source.SYNTHETIC)
        coords.append((float(rec[3]), float(rec[4])))
    emb = Embedding2D(ids=ids, labels=labels, is_synthetic=np.array(synth, dtype=bool),
                      coords=np.array(coords, dtype=float).reshape(-1, 2))
    return emb, meta, sha256_text(text)


# -- clustering stage -------------------------------------------------------------

@dataclass(eq=False)
class ClusterResult:
    model: FuzzyClusterModel
    classification: ClassificationResult
    accuracy_real: float
    params: dict


def cluster(embedding, options):
    real_labels = embedding.real_labels
    c = options.clusters or len(set(real_labels))
    fcm_seed = derived_seed(options.seed, "fcm")
    model = fcm_fit(embedding.real_coords, c, m=options.fuzzifier, seed=fcm_seed,
                    tol=options.fcm_tol, max_iters=options.fcm_max_iters)
    model = with_labels(model, assign_cluster_labels(model, real_labels))
    result = classify_synthetic(model, embedding.synthetic_coords, embedding.synthetic_labels,
                                embedding.synthetic_ids, m=options.membership_fuzzifier)
    params = {
        "clusters": c,
        "fuzzifier": options.fuzzifier,
        "membership_fuzzifier": options.membership_fuzzifier or options.fuzzifier,
        "tol": options.fcm_tol,
        "max_iters": options.fcm_max_iters,
        "seed": fcm_seed,
        "seed_used": model.seed,
        "iterations": model.n_iter,
    }
    return ClusterResult(model=model, classification=result,
                         accuracy_real=clustering_accuracy_real(model, real_labels), params=params)


def classification_csv_text(result, embedding_digest):
    return (f"{CLASSIFICATION_MAGIC}\n# embedding_sha256={embedding_digest}\n" + result.csv_text())


def read_classification_csv(path):
    """Return (ids, true, pred, correct flags, embedding digest)."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if len(lines) < 3 or lines[0] != CLASSIFICATION_MAGIC or not lines[1].startswith("# embedding_sha256="):
        raise MalformedHeader(f"{path} is not a classification artifact")
    digest = lines[1].split("=", 1)[1]
    reader = csv.reader(lines[2:])
    if next(reader) != ["id", "true_label", "pred_label", "correct"]:
        raise MalformedHeader("classification columns must be id,true_label,pred_label,correct")
    rows = [rec for rec in reader if rec]
    ids = tuple(r[0] for r in rows)
    true = tuple(r[1] for r in rows)
    pred = tuple(r[2] for r in rows)
    correct = np.array([r[3] == "1" for r in rows], dtype=bool)
    return ids, true, pred, correct, digest


def confusion_matrix(true_labels, pred_labels, classes):
    index = {c: k for k, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true_labels, pred_labels):
        counts[index[t], index[p]] += 1
    return counts


def build_report(embed_meta, clustered, real_classes, baseline=None, timings=None):
    res = clustered.classification
    classes = sorted(real_classes)
    counts = confusion_matrix(res.true_labels, res.predicted_labels, classes)
    per_class = {}
    for k, name in enumerate(classes):
        n = int(counts[k].sum())
        if n:
            per_class[name] = {"n": n, "correct": int(counts[k, k]), "accuracy": float(counts[k, k] / n)}
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": f"semacc {__version__}",
        "config": {"embedding": embed_meta, "clustering": clustered.params},
        "clusters": {
            "labels": list(clustered.model.labels),
            "centroids": clustered.model.centroids.tolist(),
            "final_objective": clustered.model.objective_trace[-1],
        },
        "clustering_accuracy_real": clustered.accuracy_real,
        "clustering_accuracy_synthetic": res.accuracy,
        "n_synthetic_correct": res.n_correct,
        "per_class": per_class,
        "confusion_matrix": {"classes": classes, "rows": "true", "columns": "predicted",
                             "counts": counts.tolist()},
        "baseline": baseline,
        "timings": timings or {},
    }


def baseline_metrics(probs_path, splits):
    probs = load_probability_csv(probs_path)
    mean, std = inception_score(probs, splits)
    out = {
        "probs_sha256": sha256_file(probs_path),
        "n": len(probs.rows),
        "inception_score": {"mean": mean, "std": std, "splits": splits},
        "direct_accuracy": direct_accuracy(probs) if probs.labels else None,
    }
    return out


def report_without_timings(report):
    return {k: v for k, v in report.items() if k != "timings"}


# -- writing -------------------------------------------------------------------------

@contextmanager
def _staged_output(out_dir):
    """Write into a temporary sibling directory, then move files into ``out_dir``.

    Nothing is left behind if the body raises.
    """
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".semacc-", dir=out_dir.parent))
    try:
        yield staging
        out_dir.mkdir(parents=True, exist_ok=True)
        for f in sorted(staging.iterdir()):
            f.replace(out_dir / f.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def _write_plots(dirpath, embedding, classification, modes):
    for mode in modes:
        spec = PlotSpec(mode=mode)
        name = PLOT_FILES[mode]
        (dirpath / name).write_text(render_scatter(embedding, classification, spec), encoding="utf-8")
        (dirpath / name.replace(".svg", ".legend.json")).write_text(
            legend(embedding, classification, spec), encoding="utf-8")


def _write_cluster_outputs(dirpath, embedding, emb_digest, meta, options, probs, timings):
    with _stage("cluster", timings):
        clustered = cluster(embedding, options)
    (dirpath / "classification.csv").write_text(
        classification_csv_text(clustered.classification, emb_digest), encoding="utf-8")
    (dirpath / "clusters.json").write_text(_json({
        "embedding_sha256": emb_digest,
        "m": clustered.model.m,
        "labels": list(clustered.model.labels),
        "centroids": clustered.model.centroids.tolist(),
        "objective_trace": list(clustered.model.objective_trace),
    }), encoding="utf-8")
    baseline = None
    if probs is not None:
        with _stage("score", timings):
            baseline = baseline_metrics(probs, options.splits)
    with _stage("plot", timings):
        _write_plots(dirpath, embedding, clustered.classification, options.plot_modes)
    report = build_report(meta, clustered, set(embedding.real_labels), baseline, timings)
    (dirpath / "report.json").write_text(_json(report), encoding="utf-8")
    return report


def _load_inputs(real_csv, synth_csv, timings):
    with _stage("load", timings):
        real = load_feature_csv(real_csv, Source.REAL)
        synth = load_feature_csv(synth_csv, Source.SYNTHETIC)
        combined = combine(real, synth)
    digests = {"real_sha256": sha256_file(real_csv), "synthetic_sha256": sha256_file(synth_csv)}
    return combined, digests


def _write_embedding(dirpath, combined, digests, options, timings):
    with _stage("embed", timings):
        er = embed(combined, options, digests)
    text = embedding_csv_text(er.embedding, er.meta)
    (dirpath / "embedding.csv").write_text(text, encoding="utf-8")
    if options.kl_trace:
        lines = ["iter,kl"] + [f"{t},{format_float(v)}" for t, v in er.kl_trace]
        (dirpath / "kl_trace.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return er, sha256_text(text)


def cmd_evaluate(real_csv, synth_csv, out_dir, options=None, probs=None):
    """Run every stage and write report.json, embedding.csv, classification.csv and plots."""
    options = options or Options()
    timings = {}
    with _staged_output(out_dir) as tmp:
        combined, digests = _load_inputs(real_csv, synth_csv, timings)
        er, emb_digest = _write_embedding(tmp, combined, digests, options, timings)
        return _write_cluster_outputs(tmp, er.embedding, emb_digest, er.meta, options, probs, timings)


def cmd_embed(real_csv, synth_csv, out_dir, options=None):
    options = options or Options()
    timings = {}
    with _staged_output(out_dir) as tmp:
        combined, digests = _load_inputs(real_csv, synth_csv, timings)
        er, _ = _write_embedding(tmp, combined, digests, options, timings)
    return er.meta


def _check_inputs_fresh(meta, real_csv, synth_csv):
    for key, path in (("real_sha256", real_csv), ("synthetic_sha256", synth_csv)):
        if path is None:
            continue
        recorded = meta.get("inputs", {}).get(key)
        if recorded != sha256_file(path):
            raise StaleArtifact(f"embedding was computed from a different {key.split('_')[0]} feature file")


def cmd_cluster(embedding_csv, out_dir, options=None, probs=None, real_csv=None, synth_csv=None):
    """Cluster and score an existing embedding artifact.

    Passing the original feature files checks that the embedding is not stale.
    """
    options = options or Options()
    embedding, meta, digest = read_embedding_csv(embedding_csv)
    _check_inputs_fresh(meta, real_csv, synth_csv)
    timings = {}
    with _staged_output(out_dir) as tmp:
        return _write_cluster_outputs(tmp, embedding, digest, meta, options, probs, timings)


def cmd_plot(embedding_csv, out_dir, modes=DEFAULT_PLOT_MODES, classification_csv=None):
    embedding, _, digest = read_embedding_csv(embedding_csv)
    modes = tuple(PlotMode(m) for m in modes)
    classification = None
    if classification_csv is not None:
        ids, true, pred, correct, recorded = read_classification_csv(classification_csv)
        if recorded != digest:
            raise StaleArtifact("classification was computed from a different embedding")
        classification = ClassificationResult(ids=ids, true_labels=true, predicted_labels=pred,
                                              memberships=np.zeros((len(ids), 0)), correct=correct)
    elif PlotMode.CORRECT_INCORRECT in modes:
        raise MissingClassification("correct-incorrect plots need --classification")
    with _staged_output(out_dir) as tmp:
        _write_plots(tmp, embedding, classification, modes)
    return [PLOT_FILES[m] for m in modes]


def cmd_score(probs_csv, splits=10, shuffle_seed=None):
    probs = load_probability_csv(probs_csv)
    mean, std = inception_score(probs, splits, shuffle_seed=shuffle_seed)
    return {
        "n": len(probs.rows),
        "classes": len(probs.class_names),
        "inception_score": {"mean": mean, "std": std, "splits": splits},
        "direct_accuracy": direct_accuracy(probs) if probs.labels else None,
    }
