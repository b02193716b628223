import numpy as np
import pytest

from tfcr.corpus import LabelSet
from tfcr.embed import EmbeddingModel
from tfcr.represent import (FeatureVector, load_feature_matrix, save_feature_matrix, unweighted_matrix,
                            unweighted_repr, weighted_matrix, weighted_repr)
from tfcr.weights import WeightTable, build_weight_table, count_statistics

LS2 = LabelSet(("c1", "c2"))


def test_single_term_hand_computation():
    model = EmbeddingModel.from_dict({"w1": [2.0, -2.0]})
    wt = WeightTable("tfcr", ("w1",), np.array([[0.5, 0.0]]), LS2)
    fv = weighted_repr(["w1"], wt, model)
    np.testing.assert_array_equal(fv.values, [1.0, -1.0, 0.0, 0.0])
    assert fv.layout == "concat_kd" and fv.k == 2 and fv.d == 2
    np.testing.assert_array_equal(fv.block(1), [0.0, 0.0])


def test_empty_document_is_zero():
    model = EmbeddingModel.from_dict({"w1": [2.0, -2.0, 1.0]})
    wt = WeightTable("tfcr", ("w1",), np.array([[0.5, 0.25]]), LS2)
    fv = weighted_repr([], wt, model)
    np.testing.assert_array_equal(fv.values, np.zeros(6))


def test_repeat_doubles():
    model = EmbeddingModel.from_dict({"w1": [0.3, -0.7]})
    wt = WeightTable("tfcr", ("w1",), np.array([[0.1, 0.9]]), LS2)
    once = weighted_repr(["w1"], wt, model).values
    twice = weighted_repr(["w1", "w1"], wt, model).values
    np.testing.assert_array_equal(twice, 2 * once)


def test_oov_and_untrained_tokens_skipped():
    model = EmbeddingModel.from_dict({"a": [1.0, 0.0], "b": [0.0, 1.0]})
    wt = WeightTable("tfcr", ("a", "zzz"), np.array([[1.0, 0.5], [3.0, 3.0]]), LS2)
    # "b" has a vector but no weight; "zzz" has a weight but no vector
    fv = weighted_repr(["a", "b", "zzz", "q"], wt, model)
    np.testing.assert_array_equal(fv.values, [1.0, 0.0, 0.5, 0.0])


def test_unweighted_mean_and_sum():
    model = EmbeddingModel.from_dict({"a": [1.0, 0.0], "b": [0.0, 1.0]})
    np.testing.assert_array_equal(unweighted_repr(["a", "b"], model, "mean").values, [0.5, 0.5])
    np.testing.assert_array_equal(unweighted_repr(["a", "a", "b"], model, "sum").values, [2.0, 1.0])
    np.testing.assert_array_equal(unweighted_repr(["x", "y"], model, "mean").values, [0.0, 0.0])
    assert unweighted_repr([], model).layout == "plain_d"


def test_unweighted_bad_mode():
    with pytest.raises(ValueError):
        unweighted_repr(["a"], EmbeddingModel.from_dict({"a": [1.0]}), "max")


def test_normalize_flag():
    model = EmbeddingModel.from_dict({"a": [3.0, 4.0]})
    wt = WeightTable("tfcr", ("a",), np.array([[1.0, 0.0]]), LS2)
    np.testing.assert_allclose(weighted_repr(["a"], wt, model, normalize=True).values, [0.6, 0.8, 0, 0])
    np.testing.assert_array_equal(weighted_repr([], wt, model, normalize=True).values, np.zeros(4))


def test_matrix_rows_equal_single_document_calls():
    rng = np.random.default_rng(0)
    words = [f"w{i}" for i in range(12)]
    model = EmbeddingModel.from_dict({w: rng.normal(size=4) for w in words})
    docs = [list(rng.choice(words + ["oov"], size=rng.integers(0, 9))) for _ in range(20)]
    labels = ["c1" if i % 2 else "c2" for i in range(20)]
    wt = build_weight_table(count_statistics(zip(docs, labels), LS2), "tfcr")
    mat = weighted_matrix(docs, wt, model)
    assert mat.shape == (20, 8)
    for i, doc in enumerate(docs):
        np.testing.assert_array_equal(mat[i], weighted_repr(doc, wt, model).values)
    base = unweighted_matrix(docs, model, "mean")
    for i, doc in enumerate(docs):
        np.testing.assert_array_equal(base[i], unweighted_repr(doc, model, "mean").values)


def test_feature_vector_length_checked():
    with pytest.raises(ValueError):
        FeatureVector(np.zeros(5), "concat_kd", d=2, k=2)


def test_feature_tsv_roundtrip(tmp_path):
    feats = np.array([[0.1, -2.5e-300], [3.0, 1 / 3]])
    save_feature_matrix(tmp_path / "f.tsv", feats, ["a", "b"])
    again, labels = load_feature_matrix(tmp_path / "f.tsv")
    np.testing.assert_array_equal(again, feats)
    assert labels == ["a", "b"]
