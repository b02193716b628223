"""Labeled corpora, stratified folds and nested training subsets."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

#: Name of the PRNG used for every shuffle in this package (recorded in manifests).
PRNG_NAME = "numpy.random.PCG64"

FORMATS = ("tsv", "csv", "jsonl")


class CorpusError(ValueError):
    pass


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class LabelSet:
    """Ordered, duplicate-free category labels.

    The order is fixed once and reused for weight-table columns, the
    concatenation order of feature blocks and classifier outputs.
    """

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise CorpusError("label set is empty")
        if len(set(labels)) != len(labels):
            raise CorpusError(f"duplicate labels in {labels!r}")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "LabelSet":
        return cls(tuple(sorted(set(labels))))

    @property
    def k(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise CorpusError(f"unknown label {label!r}") from None

    def __contains__(self, label) -> bool:
        return label in self._index

    def __iter__(self):
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class LabeledDocument:
    id: int
    text: str
    label: str


@dataclass(frozen=True)
class LabeledCorpus:
    documents: tuple[LabeledDocument, ...]
    label_set: LabelSet

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        for i, doc in enumerate(self.documents):
            if doc.id != i:
                raise CorpusError(f"document ids must be 0..n-1, got {doc.id} at position {i}")
            if doc.label not in self.label_set:
                raise CorpusError(f"document {i} has label {doc.label!r} outside the label set")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], label_set: LabelSet | None = None):
        """Build a corpus from ``(label, text)`` pairs, ids assigned in order."""
        pairs = list(pairs)
        if label_set is None:
            label_set = LabelSet.from_labels(lab for lab, _ in pairs)
        docs = tuple(LabeledDocument(i, text, lab) for i, (lab, text) in enumerate(pairs))
        return cls(docs, label_set)

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def labels(self) -> list[str]:
        return [d.label for d in self.documents]

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    def label_ids(self, ids: Sequence[int] | None = None) -> np.ndarray:
        docs = self.documents if ids is None else [self.documents[i] for i in ids]
        return np.array([self.label_set.index(d.label) for d in docs], dtype=np.int64)


def _read_delimited(text: str, fmt: str) -> list[tuple[int, str, str]]:
    records = []
    if fmt == "tsv":
        rows = ((n, line.split("\t")) for n, line in enumerate(text.splitlines(), 1))
    else:
        # csv.reader tracks physical lines itself; quoted fields may span lines.
        reader = csv.reader(io.StringIO(text, newline=""), strict=True)
        rows = _csv_rows(reader)
    header = ["label", "text"]
    first = True
    for lineno, fields in rows:
        if fields == [""] or fields == []:
            continue
        if first:
            first = False
            if fields == header:
                continue
        if len(fields) != 2:
            raise CorpusError(f"line {lineno}: expected 2 fields (label, text), got {len(fields)}")
        records.append((lineno, fields[0], fields[1]))
    return records


def _csv_rows(reader):
    start = 1
    try:
        for fields in reader:
            yield start, fields
            start = reader.line_num + 1
    except csv.Error as exc:
        raise CorpusError(f"line {reader.line_num}: {exc}") from None


def _read_jsonl(text: str) -> list[tuple[int, str, str]]:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise CorpusError(f"line {lineno}: expected a JSON object")
        for key in ("label", "text"):
            if not isinstance(obj.get(key), str):
                raise CorpusError(f"line {lineno}: missing or non-string field {key!r}")
        records.append((lineno, obj["label"], obj["text"]))
    return records


def load_corpus(path, format: str | None = None) -> LabeledCorpus:
    """Read a labeled corpus from a TSV, CSV or JSONL file.

    ``format`` defaults to the file suffix. Labels are sorted
    lexicographically to form the label set; document order is file order.
    Blank lines are ignored.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in FORMATS:
        raise CorpusError(f"unsupported corpus format {fmt!r}; expected one of {FORMATS}")
    text = path.read_text(encoding="utf-8")
    records = _read_jsonl(text) if fmt == "jsonl" else _read_delimited(text, fmt)
    if not records:
        raise CorpusError(f"{path}: no records")
    label_set = LabelSet.from_labels(lab for _, lab, _ in records)
    if label_set.k < 2:
        raise CorpusError(f"{path}: need at least 2 distinct labels, found {list(label_set)}")
    return LabeledCorpus.from_pairs(((lab, txt) for _, lab, txt in records), label_set)


def write_corpus(corpus: LabeledCorpus, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            for d in corpus.documents:
                fh.write(json.dumps({"label": d.label, "text": d.text}, ensure_ascii=False) + "\n")
        elif fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["label", "text"])
            writer.writerows((d.label, d.text) for d in corpus.documents)
        elif fmt == "tsv":
            fh.write("label\ttext\n")
            for d in corpus.documents:
                if any(ch in d.text or ch in d.label for ch in "\t\n\r"):
                    raise CorpusError(f"document {d.id}: tabs/newlines cannot be written to TSV")
                fh.write(f"{d.label}\t{d.text}\n")
        else:
            raise CorpusError(f"unsupported corpus format {fmt!r}")


@dataclass(frozen=True)
class FoldAssignment:
    n_folds: int
    fold_of: tuple[int, ...]

    def test_ids(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.fold_of) if f == fold]

    def train_ids(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.fold_of) if f != fold]

    def sizes(self) -> list[int]:
        return np.bincount(self.fold_of, minlength=self.n_folds).tolist()


def make_folds(corpus: LabeledCorpus, n_folds: int, seed: int) -> FoldAssignment:
    """Stratified fold assignment.

    Within each label (in label-set order) the documents are shuffled and
    dealt round-robin. The dealing position carries over from one label to
    the next so overall fold sizes stay balanced as well.
    """
    if n_folds < 2:
        raise CorpusError(f"n_folds must be >= 2, got {n_folds}")
    by_label: dict[str, list[int]] = {lab: [] for lab in corpus.label_set}
    for doc in corpus.documents:
        by_label[doc.label].append(doc.id)
    for lab, ids in by_label.items():
        if len(ids) < n_folds:
            raise CorpusError(f"label {lab!r} has {len(ids)} documents, fewer than n_folds={n_folds}")

    rng = rng_for(seed)
    fold_of = [0] * len(corpus)
    offset = 0
    for lab in corpus.label_set:
        ids = np.asarray(by_label[lab], dtype=np.int64)
        for pos, doc_id in enumerate(rng.permutation(ids)):
            fold_of[int(doc_id)] = (offset + pos) % n_folds
        offset = (offset + len(ids)) % n_folds
    return FoldAssignment(n_folds, tuple(fold_of))


@dataclass(frozen=True)
class SubsetChain:
    sizes: tuple[int, ...]
    prefix: tuple[int, ...]

    def subset(self, size: int) -> list[int]:
        if size not in self.sizes:
            raise CorpusError(f"size {size} not in chain sizes {self.sizes}")
        return list(self.prefix[:size])

    def __iter__(self):
        for s in self.sizes:
            yield s, list(self.prefix[:s])


def check_sizes(sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if not sizes:
        raise CorpusError("sizes must be non-empty")
    if sizes[0] < 1:
        raise CorpusError(f"sizes must be positive, got {sizes[0]}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise CorpusError(f"sizes must be strictly increasing, got {list(sizes)}")
    return sizes


def make_subset_chain(train_ids: Sequence[int], sizes: Sequence[int], seed: int) -> SubsetChain:
    """Shuffle the pool once; subset ``i`` is the first ``sizes[i]`` ids."""
    sizes = check_sizes(sizes)
    if sizes[-1] > len(train_ids):
        raise CorpusError(f"largest size {sizes[-1]} exceeds the pool of {len(train_ids)} ids")
    order = rng_for(seed).permutation(np.asarray(train_ids, dtype=np.int64))
    return SubsetChain(sizes, tuple(int(i) for i in order))
