import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def make_separable_corpus(n_docs=500, vocab_per_class=50, dim=20, seed=0, labels=("alpha", "beta"),
                          doc_len=(5, 15)):
    """Categories with disjoint vocabularies plus random embeddings.

    Returns ``(pairs, vectors)`` with ``pairs`` a list of (label, text) and
    ``vectors`` a word -> vector dict covering every word.
    """
    rng = np.random.default_rng(seed)
    vocab = {lab: [f"{lab}{i}" for i in range(vocab_per_class)] for lab in labels}
    pairs = []
    for i in range(n_docs):
        lab = labels[i % len(labels)]
        n = int(rng.integers(doc_len[0], doc_len[1] + 1))
        words = rng.choice(vocab[lab], size=n)
        pairs.append((lab, " ".join(words)))
    vectors = {w: rng.normal(size=dim) for lab in labels for w in vocab[lab]}
    return pairs, vectors


def write_glove(path, vectors):
    with open(path, "w", encoding="utf-8") as fh:
        for w, v in vectors.items():
            fh.write(w + " " + " ".join(repr(float(x)) for x in v) + "\n")


def write_tsv(path, pairs):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("label\ttext\n")
        for lab, text in pairs:
            fh.write(f"{lab}\t{text}\n")


@pytest.fixture
def separable_files(tmp_path):
    pairs, vectors = make_separable_corpus()
    data, emb = tmp_path / "data.tsv", tmp_path / "vecs.txt"
    write_tsv(data, pairs)
    write_glove(emb, vectors)
    return data, emb


# -- acceptance summary --------------------------------------------------------

_criteria: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for marker in getattr(report, "_criteria", ()):
        _criteria.setdefault(marker, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report._criteria = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        if all(o == "passed" for o in outcomes):
            status = "PASS"
        elif any(o == "failed" for o in outcomes):
            status = "FAIL"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"criterion {n}: {status} ({len(outcomes)} check(s))")
