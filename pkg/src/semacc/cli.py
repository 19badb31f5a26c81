"""Command line interface: ``semacc {evaluate,embed,cluster,plot,score,blobs}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .benchmark import blob_benchmark
from .data import write_feature_csv
from .errors import SemaccError
from .pipeline import Options, cmd_cluster, cmd_embed, cmd_evaluate, cmd_plot, cmd_score
from .plot import PlotMode

MODE_ALIASES = {
    "correct": PlotMode.CORRECT_INCORRECT,
    "class": PlotMode.COLOR_BY_CLASS,
    "real-vs-synth": PlotMode.REAL_VS_SYNTHETIC,
}


def _plot_modes(text):
    modes = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        try:
            modes.append(MODE_ALIASES.get(tok) or PlotMode(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown plot mode {tok!r}") from None
    return tuple(modes)


def _add_embed_flags(p):
    p.add_argument("--pca-dims", type=int, default=50)
    p.add_argument("--pca-fit", choices=("combined", "real"), default="combined")
    p.add_argument("--perplexity", type=float, default=None,
                   help="default: number of synthetic points / number of classes")
    p.add_argument("--tsne-iters", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=200.0)
    p.add_argument("--max-points", type=int, default=10000,
                   help="refuse larger inputs (exact t-SNE is O(n^2) in memory)")
    p.add_argument("--kl-trace", action="store_true", help="also write kl_trace.csv (slower)")


def _add_cluster_flags(p):
    p.add_argument("--fuzzifier", type=float, default=2.0)
    p.add_argument("--membership-fuzzifier", type=float, default=None,
                   help="fuzzifier for synthetic membership vectors (default: --fuzzifier)")
    p.add_argument("--clusters", type=int, default=None, help="default: number of real classes")
    p.add_argument("--plot-modes", type=_plot_modes, default="correct,class",
                   help="comma list of correct-incorrect, color-by-class, real-vs-synthetic")
    p.add_argument("--probs", type=Path, default=None,
                   help="classifier probability CSV for the baseline metrics")
    p.add_argument("--splits", type=int, default=10)


def build_parser():
    parser = argparse.ArgumentParser(prog="semacc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="full pipeline: embed, cluster, classify, report, plot")
    p.add_argument("--real", type=Path, required=True)
    p.add_argument("--synthetic", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=42)
    _add_embed_flags(p)
    _add_cluster_flags(p)

    p = sub.add_parser("embed", help="joint PCA + t-SNE, writes embedding.csv")
    p.add_argument("--real", type=Path, required=True)
    p.add_argument("--synthetic", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=42)
    _add_embed_flags(p)

    p = sub.add_parser("cluster", help="fuzzy C-means + classification on embedding.csv")
    p.add_argument("--embedding", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--real", type=Path, default=None, help="check the embedding is not stale")
    p.add_argument("--synthetic", type=Path, default=None, help="check the embedding is not stale")
    _add_cluster_flags(p)

    p = sub.add_parser("plot", help="render SVG plots from stage artifacts")
    p.add_argument("--embedding", type=Path, required=True)
    p.add_argument("--classification", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--plot-modes", type=_plot_modes, default="correct,class")

    p = sub.add_parser("score", help="Inception Score and direct accuracy from a probability CSV")
    p.add_argument("--probs", type=Path, required=True)
    p.add_argument("--splits", type=int, default=10)
    p.add_argument("--shuffle-seed", type=int, default=None)

    p = sub.add_parser("blobs", help="write a Gaussian-blob benchmark (real.csv, synthetic.csv)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--per-class", type=int, default=120)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _options(args):
    kw = {"seed": args.seed}
    for name in ("pca_dims", "pca_fit", "perplexity", "max_points", "kl_trace", "learning_rate",
                 "fuzzifier", "membership_fuzzifier", "clusters", "plot_modes", "splits"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if hasattr(args, "tsne_iters"):
        kw["tsne_iters"] = args.tsne_iters
    return Options(**kw)


def _summary(report):
    return {k: report[k] for k in ("clustering_accuracy_real", "clustering_accuracy_synthetic", "baseline")}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "evaluate":
            report = cmd_evaluate(args.real, args.synthetic, args.out, _options(args), probs=args.probs)
            print(json.dumps(_summary(report), indent=2))
        elif args.command == "embed":
            cmd_embed(args.real, args.synthetic, args.out, _options(args))
            print(args.out / "embedding.csv")
        elif args.command == "cluster":
            report = cmd_cluster(args.embedding, args.out, _options(args), probs=args.probs,
                                 real_csv=args.real, synth_csv=args.synthetic)
            print(json.dumps(_summary(report), indent=2))
        elif args.command == "plot":
            for name in cmd_plot(args.embedding, args.out, args.plot_modes, args.classification):
                print(args.out / name)
        elif args.command == "score":
            print(json.dumps(cmd_score(args.probs, args.splits, args.shuffle_seed), indent=2))
        elif args.command == "blobs":
            real, synth = blob_benchmark(args.classes, args.dim, args.per_class, args.separation, args.seed)
            args.out.mkdir(parents=True, exist_ok=True)
            write_feature_csv(real, args.out / "real.csv")
            write_feature_csv(synth, args.out / "synthetic.csv")
            print(args.out / "real.csv")
            print(args.out / "synthetic.csv")
    except (SemaccError, ValueError) as exc:
        print(f"semacc: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
