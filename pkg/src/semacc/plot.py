"""Static SVG scatter plots of the joint embedding."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyEmbedding, MissingClassification

BLACK = "#000000"
BLUE = "#1f5fbf"
RED = "#cc2222"
GRAY = "#9a9a9a"

# 20-colour categorical cycle; indices past 20 reuse it with shifted shade
PALETTE_20 = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
)
MARGIN = 0.05


class PlotMode(str, enum.Enum):
    CORRECT_INCORRECT = "correct-incorrect"
    REAL_VS_SYNTHETIC = "real-vs-synthetic"
    COLOR_BY_CLASS = "color-by-class"


@dataclass(frozen=True)
class PlotSpec:
    mode: PlotMode = PlotMode.CORRECT_INCORRECT
    width: int = 800
    height: int = 800
    point_radius: float = 2.0
    palette: tuple = field(default=PALETTE_20)

    def __post_init__(self):
        object.__setattr__(self, "mode", PlotMode(self.mode))
        if self.width < 100 or self.height < 100:
            raise ValueError("width and height must be at least 100 px")
        if self.point_radius < 1:
            raise ValueError("point radius must be at least 1 px")
        if not self.palette:
            raise ValueError("palette must not be empty")


def _shade(hex_color, amount):
    """Blend toward black (amount < 0) or white (amount > 0)."""
    rgb = np.array([int(hex_color[k:k + 2], 16) for k in (1, 3, 5)], dtype=float)
    target = 255.0 if amount > 0 else 0.0
    rgb = rgb + (target - rgb) * abs(amount)
    return "#" + "".join(f"{int(round(v)):02x}" for v in rgb)


def class_color(index, palette=PALETTE_20):
    base = palette[index % len(palette)]
    cycle = index // len(palette)
    if cycle == 0:
        return base
    step = (cycle + 1) // 2
    amount = min(0.3 * step, 0.9)
    return _shade(base, -amount if cycle % 2 else amount)


def _viewport_transform(coords, width, height):
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    avail = np.array([width, height]) * (1 - 2 * MARGIN)
    scale = float(np.min(avail / span))
    mid = (lo + hi) / 2.0
    cx = width / 2.0 + (coords[:, 0] - mid[0]) * scale
    cy = height / 2.0 - (coords[:, 1] - mid[1]) * scale
    return cx, cy


def _point_colors(embedding, classification, spec):
    """Fill colour per point plus legend entries, in drawing order."""
    synth = embedding.is_synthetic
    n = embedding.n
    colors = [None] * n
    legend = []
    if spec.mode is PlotMode.CORRECT_INCORRECT:
        if classification is None:
            raise MissingClassification("correct/incorrect plot needs a classification result")
        sids = embedding.synthetic_ids
        if tuple(classification.ids) != tuple(sids):
            raise MissingClassification("classification does not cover the embedding's synthetic points")
        flags = iter(classification.correct)
        for i in range(n):
            colors[i] = (BLUE if next(flags) else RED) if synth[i] else BLACK
        legend = [{"color": BLACK, "category": "real"},
                  {"color": BLUE, "category": "synthetic, correctly classified"},
                  {"color": RED, "category": "synthetic, misclassified"}]
    elif spec.mode is PlotMode.REAL_VS_SYNTHETIC:
        colors = [GRAY if s else BLACK for s in synth]
        legend = [{"color": BLACK, "category": "real"}, {"color": GRAY, "category": "synthetic"}]
    else:
        classes = sorted(set(embedding.labels))
        lookup = {c: class_color(k, spec.palette) for k, c in enumerate(classes)}
        colors = [lookup[lab] for lab in embedding.labels]
        legend = [{"color": lookup[c], "category": c} for c in classes]
    return colors, legend


def render_scatter(embedding, classification=None, spec=None):
    """Return a standalone SVG 1.1 document with one circle per embedded point.

    Real points are drawn first so synthetic points sit on top.
    """
    spec = spec or PlotSpec()
    if embedding.n == 0:
        raise EmptyEmbedding("nothing to plot")
    colors, _ = _point_colors(embedding, classification, spec)
    cx, cy = _viewport_transform(np.asarray(embedding.coords), spec.width, spec.height)
    r = f"{spec.point_radius:g}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f"<title>{escape(spec.mode.value)}</title>",
        f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>',
    ]
    for layer, keep in (("real", False), ("synthetic", True)):
        out.append(f'<g id="{layer}">')
        for i in np.flatnonzero(embedding.is_synthetic == keep):
            out.append(f'<circle cx="{cx[i]:.2f}" cy="{cy[i]:.2f}" r="{r}" fill="{colors[i]}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def legend(embedding, classification=None, spec=None):
    """Sidecar mapping of fill colours to categories, as a JSON string."""
    spec = spec or PlotSpec()
    _, entries = _point_colors(embedding, classification, spec)
    return json.dumps({"mode": spec.mode.value, "entries": entries}, indent=2) + "\n"
