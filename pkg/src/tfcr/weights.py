"""Category-level count statistics and per-(word, category) weights.

Four schemes share one :class:`CountTable`:

* ``none``  - 1 for every word seen in training
* ``tfidf`` - ``TF(w,c) * ln(k / cf(w))`` with categories as the document unit
* ``kld``   - pointwise in-category vs out-of-category divergence, clamped at 0
* ``tfcr``  - ``|w_c|**2 / (N_c * |w|)``

Words unseen in training get weight 0 under every scheme.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import LabelSet

SCHEMES = ("none", "tfidf", "kld", "tfcr")


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class SmoothingConfig:
    epsilon: float = 1e-10

    def __post_init__(self):
        if not self.epsilon > 0:
            raise WeightError(f"epsilon must be > 0, got {self.epsilon}")


def _category_index(label_set: LabelSet, c) -> int:
    if isinstance(c, (int, np.integer)) and not isinstance(c, bool):
        if not 0 <= c < label_set.k:
            raise WeightError(f"category index {c} out of range for k={label_set.k}")
        return int(c)
    if c not in label_set:
        raise WeightError(f"unknown category {c!r}")
    return label_set.index(c)


@dataclass(frozen=True, eq=False)
class CountTable:
    """|w_c| as a ``(V, k)`` integer matrix over ``vocab``, plus N_c and |w|."""

    vocab: tuple[str, ...]
    wc: np.ndarray
    label_set: LabelSet
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        wc = np.asarray(self.wc, dtype=np.int64)
        if wc.shape != (len(self.vocab), self.label_set.k):
            raise WeightError(f"count matrix shape {wc.shape} != ({len(self.vocab)}, {self.label_set.k})")
        if (wc < 0).any():
            raise WeightError("negative counts")
        wc.setflags(write=False)
        object.__setattr__(self, "wc", wc)
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.vocab)})

    @property
    def n_c(self) -> np.ndarray:
        return self.wc.sum(axis=0)

    @property
    def w_total(self) -> np.ndarray:
        return self.wc.sum(axis=1)

    def count(self, w: str, c) -> int:
        ci = _category_index(self.label_set, c)
        row = self.index.get(w)
        return 0 if row is None else int(self.wc[row, ci])

    def category_total(self, c) -> int:
        return int(self.n_c[_category_index(self.label_set, c)])

    def word_total(self, w: str) -> int:
        row = self.index.get(w)
        return 0 if row is None else int(self.wc[row].sum())


def count_statistics(train_docs: Iterable[tuple[Sequence[str], str]], label_set: LabelSet) -> CountTable:
    """Exact token counts per category from training documents only.

    Vocabulary rows are sorted so the table does not depend on document order.
    """
    counters = [Counter() for _ in range(label_set.k)]
    n_docs = 0
    for tokens, label in train_docs:
        counters[_category_index(label_set, label)].update(tokens)
        n_docs += 1
    if n_docs == 0:
        raise WeightError("empty training set")
    vocab = sorted(set().union(*counters))
    index = {w: i for i, w in enumerate(vocab)}
    wc = np.zeros((len(vocab), label_set.k), dtype=np.int64)
    for ci, counter in enumerate(counters):
        for w, n in counter.items():
            wc[index[w], ci] = n
    return CountTable(tuple(vocab), wc, label_set)


# ---------------------------------------------------------------------------
# whole-table formulas used by build_weight_table


def _tfcr_matrix(counts: CountTable) -> np.ndarray:
    wc = counts.wc
    denom = counts.n_c[None, :] * counts.w_total[:, None]
    out = np.zeros(wc.shape, dtype=np.float64)
    np.divide(wc * wc, denom, out=out, where=wc > 0)
    return out


def _tf_matrix(counts: CountTable) -> np.ndarray:
    wc = counts.wc
    out = np.zeros(wc.shape, dtype=np.float64)
    np.divide(wc, np.broadcast_to(counts.n_c, wc.shape), out=out, where=wc > 0)
    return out


def _tfidf_matrix(counts: CountTable) -> np.ndarray:
    k = counts.label_set.k
    cf = (counts.wc > 0).sum(axis=1)
    # math.log per distinct cf keeps results bit-identical to scalar evaluation
    idf_of = np.array([0.0] + [math.log(k / n) for n in range(1, k + 1)])
    return _tf_matrix(counts) * idf_of[cf][:, None]


def _kld_matrix(counts: CountTable, smoothing: SmoothingConfig) -> np.ndarray:
    wc = counts.wc
    n_c = counts.n_c
    rest_n = n_c.sum() - n_c
    if counts.label_set.k < 2 or (rest_n == 0).any():
        raise WeightError("KLD needs token mass outside every category (q undefined)")
    eps = smoothing.epsilon
    p = _tf_matrix(counts)
    q = (counts.w_total[:, None] - wc) / rest_n[None, :]
    out = np.zeros(wc.shape, dtype=np.float64)
    mask = wc > 0
    out[mask] = p[mask] * np.log((p[mask] + eps) / (q[mask] + eps))
    return np.maximum(out, 0.0)


def tf(counts: CountTable, w: str, c) -> float:
    """Share of category ``c``'s tokens that are ``w``."""
    nc = counts.category_total(c)
    return counts.count(w, c) / nc if nc else 0.0


def cr(counts: CountTable, w: str, c) -> float:
    """Share of ``w``'s occurrences that fall in category ``c``."""
    total = counts.word_total(w)
    return counts.count(w, c) / total if total else 0.0


def tfcr(counts: CountTable, w: str, c) -> float:
    """TF * CR = |w_c|**2 / (N_c * |w|); 0 when |w_c| = 0."""
    n = counts.count(w, c)
    if n == 0:
        return 0.0
    return (n * n) / (counts.category_total(c) * counts.word_total(w))


def tfidf(counts: CountTable, w: str, c) -> float:
    n = counts.count(w, c)
    if n == 0:
        return 0.0
    k = counts.label_set.k
    cf = int((counts.wc[counts.index[w]] > 0).sum())
    return (n / counts.category_total(c)) * math.log(k / cf)


def kld(counts: CountTable, w: str, c, smoothing: SmoothingConfig = SmoothingConfig()) -> float:
    """max(0, p ln((p+eps)/(q+eps))) with p the in-category and q the
    out-of-category unigram probability of ``w``."""
    ci = _category_index(counts.label_set, c)
    n_c = counts.n_c
    rest_n = n_c.sum() - n_c
    if counts.label_set.k < 2 or (rest_n == 0).any():
        raise WeightError("KLD needs token mass outside every category (q undefined)")
    n = counts.count(w, ci)
    if n == 0:
        return 0.0
    eps = smoothing.epsilon
    p = n / int(n_c[ci])
    q = (counts.word_total(w) - n) / int(rest_n[ci])
    return max(0.0, p * math.log((p + eps) / (q + eps)))


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Scheme scores over the training vocabulary; absent words score 0."""

    scheme: str
    vocab: tuple[str, ...]
    score: np.ndarray
    label_set: LabelSet
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise WeightError(f"unknown scheme {self.scheme!r}")
        score = np.asarray(self.score, dtype=np.float64)
        if score.shape != (len(self.vocab), self.label_set.k):
            raise WeightError(f"score shape {score.shape} != ({len(self.vocab)}, {self.label_set.k})")
        if not np.isfinite(score).all() or (score < 0).any():
            raise WeightError("scores must be finite and non-negative")
        score.setflags(write=False)
        object.__setattr__(self, "score", score)
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.vocab)})

    def get(self, w: str, c) -> float:
        ci = _category_index(self.label_set, c)
        row = self.index.get(w)
        return 0.0 if row is None else float(self.score[row, ci])

    def as_dict(self) -> dict:
        return {(w, lab): float(self.score[i, j])
                for i, w in enumerate(self.vocab) for j, lab in enumerate(self.label_set)}


def build_weight_table(counts: CountTable, scheme: str,
                       smoothing: SmoothingConfig = SmoothingConfig()) -> WeightTable:
    if scheme == "none":
        score = np.ones(counts.wc.shape, dtype=np.float64)
    elif scheme == "tfcr":
        score = _tfcr_matrix(counts)
    elif scheme == "tfidf":
        score = _tfidf_matrix(counts)
    elif scheme == "kld":
        score = _kld_matrix(counts, smoothing)
    else:
        raise WeightError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return WeightTable(scheme, counts.vocab, score, counts.label_set)


def save_weight_table(table: WeightTable, path) -> None:
    """TSV ``word<TAB>category<TAB>score``; the first line names the scheme."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# scheme={table.scheme}\n")
        for i, w in enumerate(table.vocab):
            for j, lab in enumerate(table.label_set):
                fh.write(f"{w}\t{lab}\t{float(table.score[i, j])!r}\n")


def load_weight_table(path, label_set: LabelSet | None = None) -> WeightTable:
    path = Path(path)
    scheme = None
    entries: dict[tuple[str, str], float] = {}
    words: dict[str, None] = {}
    labels: dict[str, None] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# scheme="):
                scheme = line.split("=", 1)[1].strip()
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise WeightError(f"{path} line {lineno}: expected word, category, score")
            w, lab, s = parts
            try:
                entries[(w, lab)] = float(s)
            except ValueError:
                raise WeightError(f"{path} line {lineno}: bad score {s!r}") from None
            words.setdefault(w)
            labels.setdefault(lab)
    if label_set is None:
        label_set = LabelSet.from_labels(labels)
    vocab = tuple(words)
    score = np.zeros((len(vocab), label_set.k))
    for i, w in enumerate(vocab):
        for j, lab in enumerate(label_set):
            score[i, j] = entries.get((w, lab), 0.0)
    return WeightTable(scheme or "none", vocab, score, label_set)
