"""Document vectors from word embeddings.

``weighted_*`` builds the category-weighted concatenation: block ``c`` is
the sum over the document's tokens of ``score(t, c) * emb(t)``, blocks are
laid out in label-set order, giving ``k * d`` features.  ``unweighted_*``
is the plain sum/mean baseline with ``d`` features.

Both routes go through a sparse document-term count matrix whose columns
follow the embedding model's row order, so token order never affects the
summation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from .embed import EmbeddingModel
from .weights import WeightTable

MODES = ("sum", "mean")


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    layout: str
    d: int
    k: int | None = None

    def __post_init__(self):
        if self.layout == "concat_kd":
            expected = self.k * self.d
        elif self.layout == "plain_d":
            expected = self.d
        else:
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.values.shape != (expected,):
            raise ValueError(f"{self.layout} vector must have length {expected}, got {self.values.shape}")

    def block(self, c: int) -> np.ndarray:
        if self.layout != "concat_kd":
            raise ValueError("plain_d vectors have no category blocks")
        return self.values[c * self.d:(c + 1) * self.d]


def _count_matrix(docs: Sequence[Sequence[str]], column_of: dict) -> sparse.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    for tokens in docs:
        cols = [column_of[t] for t in tokens if t in column_of]
        indices.extend(cols)
        indptr.append(len(indices))
    data = np.ones(len(indices), dtype=np.float64)
    mat = sparse.csr_matrix((data, np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
                            shape=(len(docs), len(column_of)))
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def _weighted_columns(weights: WeightTable, model: EmbeddingModel):
    """Rows of the model also present in the weight vocabulary, in model order."""
    rows = sorted(model.index[w] for w in weights.vocab if w in model.index)
    words = [model.words[r] for r in rows]
    scores = weights.score[[weights.index[w] for w in words]] if words else np.zeros((0, weights.label_set.k))
    return {w: j for j, w in enumerate(words)}, model.matrix[rows], scores


def weighted_matrix(docs: Sequence[Sequence[str]], weights: WeightTable, model: EmbeddingModel,
                    normalize: bool = False) -> np.ndarray:
    """``(n_docs, k*d)`` weighted concatenated features for token lists."""
    column_of, emb, scores = _weighted_columns(weights, model)
    k, d = weights.label_set.k, model.dim
    # (V, k*d): block c of row v is score(v, c) * emb(v)
    proj = (scores[:, :, None] * emb[:, None, :]).reshape(len(column_of), k * d)
    counts = _count_matrix(docs, column_of)
    out = np.asarray(counts @ proj) if len(column_of) else np.zeros((len(docs), k * d))
    if normalize:
        out = _l2_normalize(out)
    return out


def unweighted_matrix(docs: Sequence[Sequence[str]], model: EmbeddingModel, mode: str = "mean",
                      normalize: bool = False) -> np.ndarray:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    counts = _count_matrix(docs, model.index)
    out = np.asarray(counts @ model.matrix)
    if mode == "mean":
        n_in_vocab = np.asarray(counts.sum(axis=1)).ravel()
        nz = n_in_vocab > 0
        out[nz] /= n_in_vocab[nz, None]
    if normalize:
        out = _l2_normalize(out)
    return out


def _l2_normalize(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    return np.divide(mat, norms, out=np.zeros_like(mat), where=norms > 0)


def weighted_repr(tokens: Sequence[str], weights: WeightTable, model: EmbeddingModel,
                  normalize: bool = False) -> FeatureVector:
    values = weighted_matrix([tokens], weights, model, normalize)[0]
    return FeatureVector(values, "concat_kd", model.dim, weights.label_set.k)


def unweighted_repr(tokens: Sequence[str], model: EmbeddingModel, mode: str = "mean",
                    normalize: bool = False) -> FeatureVector:
    values = unweighted_matrix([tokens], model, mode, normalize)[0]
    return FeatureVector(values, "plain_d", model.dim)


def save_feature_matrix(path, features: np.ndarray, labels: Sequence[str] | None = None) -> None:
    """One row per document: ``id<TAB>label<TAB>v1<TAB>...``; ``repr`` floats."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, row in enumerate(np.asarray(features)):
            label = "" if labels is None else labels[i]
            fh.write("\t".join([str(i), label, *(repr(float(v)) for v in row)]) + "\n")


def load_feature_matrix(path) -> tuple[np.ndarray, list[str]]:
    labels, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 3:
                raise ValueError(f"{path} line {lineno}: expected id, label and values")
            labels.append(parts[1])
            rows.append([float(v) for v in parts[2:]])
    if len({len(r) for r in rows}) > 1:
        raise ValueError(f"{path}: rows have differing feature counts")
    return np.array(rows, dtype=np.float64), labels
