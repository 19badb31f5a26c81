import re
import json

import numpy as np
import pytest

from semacc.data import Embedding2D
from semacc.errors import EmptyEmbedding, MissingClassification
from semacc.fcm import ClassificationResult
from semacc.plot import BLACK, BLUE, RED, PlotMode, PlotSpec, class_color, legend, render_scatter

CIRCLE = re.compile(r'<circle cx="([-\d.]+)" cy="([-\d.]+)" r="[\d.]+" fill="(#[0-9a-f]{6})"/>')


def circles(svg):
    return [(float(x), float(y), fill) for x, y, fill in CIRCLE.findall(svg)]


def _classification(ids, flags):
    n = len(ids)
    return ClassificationResult(ids=tuple(ids), true_labels=("a",) * n, predicted_labels=("a",) * n,
                                memberships=np.zeros((n, 1)), correct=np.array(flags, dtype=bool))


@pytest.fixture
def tiny():
    emb = Embedding2D(["r", "s1", "s2"], ["a", "a", "b"], [False, True, True],
                      np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 1.0]]))
    return emb, _classification(["s1", "s2"], [True, False])


def test_three_points_three_colours(tiny):
    emb, cls = tiny
    svg = render_scatter(emb, cls, PlotSpec(PlotMode.CORRECT_INCORRECT))
    assert [c[2] for c in circles(svg)] == [BLACK, BLUE, RED]
    assert svg.count("<circle") == 3


def test_colour_by_class_is_consistent():
    rng = np.random.default_rng(0)
    labels = [f"c{k}" for k in rng.integers(0, 5, 40)]
    labels[:5] = [f"c{k}" for k in range(5)]
    emb = Embedding2D([str(i) for i in range(40)], labels, [i >= 20 for i in range(40)],
                      rng.standard_normal((40, 2)))
    svg = render_scatter(emb, None, PlotSpec(PlotMode.COLOR_BY_CLASS))
    fills = [c[2] for c in circles(svg)]
    order = list(np.flatnonzero(~emb.is_synthetic)) + list(np.flatnonzero(emb.is_synthetic))
    by_label = {}
    for idx, fill in zip(order, fills):
        by_label.setdefault(labels[idx], set()).add(fill)
    assert len(set(fills)) == 5
    assert all(len(v) == 1 for v in by_label.values())


def test_real_vs_synthetic(tiny):
    emb, _ = tiny
    fills = [c[2] for c in circles(render_scatter(emb, None, PlotSpec(PlotMode.REAL_VS_SYNTHETIC)))]
    assert fills[0] == BLACK and len(set(fills[1:])) == 1 and fills[1] != BLACK


def test_byte_identical_rerender(tiny):
    emb, cls = tiny
    assert render_scatter(emb, cls) == render_scatter(emb, cls)


def test_centres_inside_viewport_and_aspect_preserved():
    rng = np.random.default_rng(1)
    coords = rng.standard_normal((50, 2)) * [100, 1]
    emb = Embedding2D([str(i) for i in range(50)], ["a"] * 50, [False] * 50, coords)
    spec = PlotSpec(PlotMode.REAL_VS_SYNTHETIC, width=300, height=200)
    pts = np.array([c[:2] for c in circles(render_scatter(emb, None, spec))])
    assert np.all((pts[:, 0] >= 0) & (pts[:, 0] <= 300) & (pts[:, 1] >= 0) & (pts[:, 1] <= 200))
    # same scale on both axes: pixel offsets proportional to data offsets (y flipped)
    dx = np.ptp(pts[:, 0]) / np.ptp(coords[:, 0])
    dy = np.ptp(pts[:, 1]) / np.ptp(coords[:, 1])
    assert dx == pytest.approx(dy, rel=1e-2)


def test_single_point_is_centred():
    emb = Embedding2D(["a"], ["x"], [False], [[5.0, 5.0]])
    assert circles(render_scatter(emb, None, PlotSpec(PlotMode.COLOR_BY_CLASS)))[0][:2] == (400.0, 400.0)


def test_missing_classification(tiny):
    emb, cls = tiny
    with pytest.raises(MissingClassification):
        render_scatter(emb, None, PlotSpec(PlotMode.CORRECT_INCORRECT))
    with pytest.raises(MissingClassification):
        render_scatter(emb, _classification(["s1"], [True]), PlotSpec(PlotMode.CORRECT_INCORRECT))


def test_empty_embedding():
    emb = Embedding2D([], [], np.zeros(0, bool), np.zeros((0, 2)))
    with pytest.raises(EmptyEmbedding):
        render_scatter(emb, None, PlotSpec(PlotMode.COLOR_BY_CLASS))


def test_spec_validation():
    with pytest.raises(ValueError):
        PlotSpec(width=50)
    with pytest.raises(ValueError):
        PlotSpec(point_radius=0.5)


def test_palette_distinct_beyond_twenty():
    colours = [class_color(k) for k in range(60)]
    assert len(set(colours)) == 60


def test_legend_sidecar(tiny):
    emb, cls = tiny
    data = json.loads(legend(emb, cls, PlotSpec(PlotMode.CORRECT_INCORRECT)))
    assert [e["color"] for e in data["entries"]] == [BLACK, BLUE, RED]
    data = json.loads(legend(emb, None, PlotSpec(PlotMode.COLOR_BY_CLASS)))
    assert [e["category"] for e in data["entries"]] == ["a", "b"]
