"""Pre-trained word vectors in word2vec / GloVe text formats."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

FORMATS = ("word2vec_text", "glove_text", "auto")


class EmbeddingFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingModel:
    """Immutable word -> vector map backed by one ``(n_words, dim)`` float64 matrix."""

    name: str
    dim: int
    words: tuple[str, ...]
    matrix: np.ndarray
    n_duplicates: int = 0
    header_count: int | None = None
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape != (len(self.words), self.dim):
            raise EmbeddingFormatError(
                f"matrix shape {matrix.shape} does not match {len(self.words)} words x dim {self.dim}")
        if self.dim < 1:
            raise EmbeddingFormatError("dim must be positive")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "words", tuple(self.words))
        index = {w: i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise EmbeddingFormatError("words must be unique")
        object.__setattr__(self, "index", index)

    @classmethod
    def from_dict(cls, vectors: dict, name: str = "memory") -> "EmbeddingModel":
        words = list(vectors)
        if not words:
            raise EmbeddingFormatError("no vectors")
        mat = np.array([np.asarray(vectors[w], dtype=np.float64) for w in words])
        return cls(name, mat.shape[1], tuple(words), mat)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self.index

    def restrict(self, vocab) -> "EmbeddingModel":
        """Sub-model holding only ``vocab`` words, in this model's row order."""
        rows = sorted(self.index[w] for w in set(vocab) if w in self.index)
        return EmbeddingModel(self.name, self.dim, tuple(self.words[r] for r in rows),
                              self.matrix[rows], self.n_duplicates, self.header_count)


def lookup(model: EmbeddingModel, token: str) -> np.ndarray | None:
    row = model.index.get(token)
    return None if row is None else model.matrix[row]


def _is_header(parts: list[str]) -> bool:
    return len(parts) == 2 and all(p.lstrip("-").isdigit() for p in parts)


def _parse_vector(parts: list[str], lineno: int) -> list[float]:
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise EmbeddingFormatError(f"line {lineno}: non-numeric vector component") from None
    if not all(math.isfinite(v) for v in values):
        raise EmbeddingFormatError(f"line {lineno}: non-finite vector component")
    return values


def load_embeddings(path, format: str = "auto", name: str | None = None, vocab=None) -> EmbeddingModel:
    """Parse a word2vec text or GloVe text file.

    With ``format="auto"`` a first line of exactly two integers is read as a
    word2vec header. The header vocabulary count is advisory: a mismatch is
    logged, not raised. Duplicate words keep their first vector.

    ``vocab``, if given, keeps only those words (rows are still validated).
    """
    if format not in FORMATS:
        raise EmbeddingFormatError(f"unknown embedding format {format!r}; expected one of {FORMATS}")
    path = Path(path)
    keep = None if vocab is None else set(vocab)
    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    n_dup = 0
    dim = None
    header_count = None
    n_lines = 0
    with open(path, encoding="utf-8", errors="strict") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\r\n").rstrip(" ").split(" ")
            if parts == [""]:
                continue
            if lineno == 1 and format != "glove_text" and (format == "word2vec_text" or _is_header(parts)):
                if not _is_header(parts):
                    raise EmbeddingFormatError(f"line 1: expected '<vocab_count> <dim>' header")
                header_count, dim = int(parts[0]), int(parts[1])
                if dim < 1 or header_count < 0:
                    raise EmbeddingFormatError(f"line 1: invalid header {' '.join(parts)!r}")
                continue
            if dim is None:
                dim = len(parts) - 1
                if dim < 1:
                    raise EmbeddingFormatError(f"line {lineno}: no vector components")
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(
                    f"line {lineno}: expected {dim + 1} fields (word + {dim} components), got {len(parts)}")
            word = parts[0]
            n_lines += 1
            if word in seen:
                n_dup += 1
                continue
            seen.add(word)
            if keep is not None and word not in keep:
                # still reject malformed numbers in skipped rows
                _parse_vector(parts[1:], lineno)
                continue
            words.append(word)
            rows.append(_parse_vector(parts[1:], lineno))
    if dim is None:
        raise EmbeddingFormatError(f"{path}: no vectors")
    if n_dup:
        log.warning("%s: %d duplicate word(s) ignored (first occurrence kept)", path, n_dup)
    if header_count is not None and header_count != n_lines:
        log.warning("%s: header announces %d vectors, file has %d", path, header_count, n_lines)
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return EmbeddingModel(name or path.stem, dim, tuple(words), matrix, n_dup, header_count)


def save_embeddings(model: EmbeddingModel, path, format: str = "glove_text") -> None:
    """Write ``model`` as text; ``repr`` floats round-trip exactly."""
    if format not in ("glove_text", "word2vec_text"):
        raise EmbeddingFormatError(f"cannot write format {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        if format == "word2vec_text":
            fh.write(f"{len(model)} {model.dim}\n")
        for word, vec in zip(model.words, model.matrix):
            fh.write(word + " " + " ".join(repr(float(v)) for v in vec) + "\n")
