import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from semacc.data import (
    Embedding2D,
    FeatureDataset,
    Source,
    combine,
    load_feature_csv,
    parse_feature_csv,
    write_feature_csv,
)
from semacc.errors import (
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


def _ds(n, d, labels=None, source=Source.REAL, prefix="p"):
    labels = labels or ["a"] * n
    return FeatureDataset([f"{prefix}{i}" for i in range(n)], labels, np.arange(n * d, dtype=float).reshape(n, d), source)


def test_load_two_rows(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("id,label,f0,f1,f2\nimg_0,a,1,2,3\nimg_1,b,4.5,-1e-3,0\n")
    ds = load_feature_csv(f, Source.REAL)
    assert (ds.n, ds.dim) == (2, 3)
    assert ds.ids == ("img_0", "img_1")
    assert ds.labels == ("a", "b")
    assert ds.features[1].tolist() == [4.5, -1e-3, 0.0]
    assert ds.source is Source.REAL


def test_crlf_and_bom_accepted(tmp_path):
    f = tmp_path / "x.csv"
    f.write_bytes("﻿id,label,f0\r\na,x,1\r\nb,y,2\r\n".encode("utf-8"))
    assert load_feature_csv(f, "synthetic").features[:, 0].tolist() == [1.0, 2.0]


def test_nan_row_reported_with_its_number():
    rows = "".join(f"p{i},a,{i}.0\n" for i in range(1, 5))
    with pytest.raises(NonFiniteValue) as exc:
        parse_feature_csv("id,label,f0\n" + rows + "p5,a,nan\n", Source.REAL)
    assert exc.value.row == 5


def test_inf_is_non_finite():
    with pytest.raises(NonFiniteValue):
        parse_feature_csv("id,label,f0\np,a,inf\n", Source.REAL)


def test_duplicate_id():
    with pytest.raises(DuplicateId) as exc:
        parse_feature_csv("id,label,f0\nimg_001,a,1\nimg_001,b,2\n", Source.REAL)
    assert exc.value.id == "img_001"


def test_ragged_row():
    with pytest.raises(RaggedRow) as exc:
        parse_feature_csv("id,label,f0,f1\na,x,1,2\nb,x,1\n", Source.REAL)
    assert exc.value.row == 2


@pytest.mark.parametrize("header", ["id,label", "name,label,f0", "id,label,f1", "id,label,f0,f2", ""])
def test_malformed_header(header):
    with pytest.raises(MalformedHeader):
        parse_feature_csv(header + "\n" if header else "", Source.REAL)


def test_unparsable_value():
    with pytest.raises(MalformedValue):
        parse_feature_csv("id,label,f0\na,x,1;2\n", Source.REAL)


def test_missing_file(tmp_path):
    with pytest.raises(MissingFile):
        load_feature_csv(tmp_path / "nope.csv", Source.REAL)


def test_empty_label_rejected():
    with pytest.raises(InvalidDataset):
        FeatureDataset(["a"], [""], [[1.0]], Source.REAL)


def test_dataset_is_immutable():
    ds = _ds(2, 2)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 5.0


def test_combine_orders_real_first():
    real = _ds(4, 50, ["a", "a", "b", "b"], Source.REAL, "r")
    synth = _ds(4, 50, ["b", "a", "a", "b"], Source.SYNTHETIC, "s")
    comb = combine(real, synth)
    assert comb.n_total == 8
    assert comb.ids[:4] == real.ids and comb.ids[4:] == synth.ids
    assert comb.is_synthetic.tolist() == [False] * 4 + [True] * 4
    np.testing.assert_array_equal(comb.features[4:], synth.features)


def test_combine_dimension_mismatch():
    with pytest.raises(DimensionMismatch) as exc:
        combine(_ds(2, 50), _ds(2, 49, source=Source.SYNTHETIC))
    assert (exc.value.expected, exc.value.got) == (50, 49)


def test_combine_unknown_synthetic_label():
    with pytest.raises(UnknownSyntheticLabel) as exc:
        combine(_ds(2, 3, ["a", "b"]), _ds(2, 3, ["a", "z"], Source.SYNTHETIC))
    assert exc.value.label == "z"


def test_embedding_requires_real_rows_first():
    with pytest.raises(InvalidDataset):
        Embedding2D(["a", "b"], ["x", "x"], [True, False], np.zeros((2, 2)))


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 5)), elements=finite),
       st.lists(st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=6),
                min_size=1, max_size=1))
def test_csv_round_trip_is_bit_exact(tmp_path_factory, feats, label_pool):
    n = feats.shape[0]
    labels = [label_pool[0] + ("," if i % 2 else '"') for i in range(n)]
    ds = FeatureDataset([f"id{i}" for i in range(n)], labels, feats, Source.REAL)
    path = tmp_path_factory.mktemp("rt") / "f.csv"
    write_feature_csv(ds, path)
    back = load_feature_csv(path, Source.REAL)
    assert back.ids == ds.ids
    assert back.labels == ds.labels
    assert back.features.tobytes() == ds.features.tobytes()
