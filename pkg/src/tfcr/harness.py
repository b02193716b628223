"""Cross-validated learning-curve experiments over weighting schemes.

For every fold ``f`` the training pool is every document outside ``f``.  The
pool is shuffled once with seed ``base_seed + f`` and each training size takes
a prefix of that order, so larger training sets contain the smaller ones.
Weights are recomputed from each training subset alone and the model is
always evaluated on the whole of fold ``f``.
"""

from __future__ import annotations

import csv
import json
import logging
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from . import __version__
from .clf import TrainConfig, macro_f1, predict, train
from .corpus import PRNG_NAME, check_sizes, load_corpus, make_folds, make_subset_chain
from .embed import load_embeddings
from .represent import MODES, unweighted_matrix, weighted_matrix
from .tokenize import TokenizerConfig, tokenize_all
from .weights import SCHEMES, SmoothingConfig, build_weight_table, count_statistics

log = logging.getLogger(__name__)

DEFAULT_SIZES = tuple(range(1000, 10000, 1000))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    embeddings: str
    dataset_format: str | None = None
    embedding_format: str = "auto"
    schemes: tuple[str, ...] = SCHEMES
    sizes: tuple[int, ...] = DEFAULT_SIZES
    n_folds: int = 10
    baseline_mode: str = "mean"
    normalize: bool = False
    tokenizer: TokenizerConfig = TokenizerConfig()
    smoothing: SmoothingConfig = SmoothingConfig()
    train: TrainConfig = TrainConfig()
    base_seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        try:
            object.__setattr__(self, "sizes", check_sizes(self.sizes))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad or len(set(self.schemes)) != len(self.schemes):
            raise ConfigError(f"schemes must be distinct members of {SCHEMES}, got {list(self.schemes)}")
        if self.baseline_mode not in MODES:
            raise ConfigError(f"baseline_mode must be one of {MODES}")
        if self.n_folds < 2:
            raise ConfigError("n_folds must be >= 2")

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "ExperimentConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, typ in (("tokenizer", TokenizerConfig), ("smoothing", SmoothingConfig), ("train", TrainConfig)):
            if isinstance(data.get(key), dict):
                try:
                    data[key] = typ(**data[key])
                except TypeError as exc:
                    raise ConfigError(f"{key}: {exc}") from None
        if base_dir is not None:
            for key in ("dataset", "embeddings", "output_dir"):
                if data.get(key) is not None and not Path(data[key]).is_absolute():
                    data[key] = str(Path(base_dir) / data[key])
        for key in ("dataset", "embeddings"):
            if key not in data:
                raise ConfigError(f"missing required config key {key!r}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = list(self.schemes)
        d["sizes"] = list(self.sizes)
        return d


def load_config(path) -> ExperimentConfig:
    """Read a YAML (or JSON) experiment config; relative paths resolve
    against the config file's directory."""
    path = Path(path)
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return ExperimentConfig.from_dict(data, base_dir=path.parent)


@dataclass(frozen=True)
class FoldResult:
    scheme: str
    train_size: int
    fold: int
    macro_f1: float


@dataclass(frozen=True)
class Aggregate:
    scheme: str
    train_size: int
    mean: float
    std: float
    n_folds: int


@dataclass
class ResultsTable:
    rows: list[FoldResult]
    failures: list[dict] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def aggregates(self) -> list[Aggregate]:
        groups: dict[tuple[str, int], list[float]] = {}
        for r in self.rows:
            groups.setdefault((r.scheme, r.train_size), []).append(r.macro_f1)
        return [Aggregate(s, n, float(np.mean(v)), float(np.std(v)), len(v)) for (s, n), v in groups.items()]

    def mean(self, scheme: str, train_size: int) -> float:
        for a in self.aggregates():
            if a.scheme == scheme and a.train_size == train_size:
                return a.mean
        raise KeyError((scheme, train_size))

    def format_table(self) -> str:
        """Schemes as rows, training sizes as columns (mean macro-F1)."""
        aggs = {(a.scheme, a.train_size): a for a in self.aggregates()}
        schemes = list(dict.fromkeys(a[0] for a in aggs))
        sizes = sorted({a[1] for a in aggs})
        lines = ["scheme  " + "".join(f"{s:>10d}" for s in sizes)]
        for sch in schemes:
            cells = "".join(f"{aggs[(sch, s)].mean:>10.3f}" if (sch, s) in aggs else f"{'-':>10}" for s in sizes)
            lines.append(f"{sch:<8}" + cells)
        return "\n".join(lines)


class Experiment:
    """Loaded inputs for one config; cells can be run in any order."""

    def __init__(self, cfg: ExperimentConfig, corpus=None, model=None):
        self.cfg = cfg
        self.corpus = corpus if corpus is not None else load_corpus(cfg.dataset, cfg.dataset_format)
        self.tokens = tokenize_all(self.corpus.texts, cfg.tokenizer)
        self.y = self.corpus.label_ids()
        if model is None:
            vocab = {t for doc in self.tokens for t in doc}
            model = load_embeddings(cfg.embeddings, cfg.embedding_format, vocab=vocab)
        self.model = model
        self.folds = make_folds(self.corpus, cfg.n_folds, cfg.base_seed)
        self.chains = {}
        for f in range(cfg.n_folds):
            pool = self.folds.train_ids(f)
            if cfg.sizes[-1] > len(pool):
                raise ConfigError(f"largest size {cfg.sizes[-1]} exceeds fold {f} training pool of {len(pool)}")
            self.chains[f] = make_subset_chain(pool, cfg.sizes, self.fold_seed(f))
        self._baseline = None

    def fold_seed(self, fold: int) -> int:
        return self.cfg.base_seed + fold

    def baseline_features(self) -> np.ndarray:
        # depends on no training statistics, so it is shared by all cells
        if self._baseline is None:
            self._baseline = unweighted_matrix(self.tokens, self.model, self.cfg.baseline_mode, self.cfg.normalize)
        return self._baseline

    def weight_table(self, scheme: str, train_ids: Sequence[int]):
        labels = self.corpus.label_set.labels
        counts = count_statistics(((self.tokens[i], labels[self.y[i]]) for i in train_ids), self.corpus.label_set)
        return build_weight_table(counts, scheme, self.cfg.smoothing)

    def features(self, scheme: str, train_ids: Sequence[int], test_ids: Sequence[int]):
        if scheme == "none":
            feats = self.baseline_features()
            return feats[train_ids], feats[test_ids]
        table = self.weight_table(scheme, train_ids)
        norm = self.cfg.normalize
        return (weighted_matrix([self.tokens[i] for i in train_ids], table, self.model, norm),
                weighted_matrix([self.tokens[i] for i in test_ids], table, self.model, norm))

    def run_cell(self, scheme: str, size: int, fold: int) -> float:
        train_ids = self.chains[fold].subset(size)
        test_ids = self.folds.test_ids(fold)
        X_train, X_test = self.features(scheme, train_ids, test_ids)
        model = train(X_train, self.y[train_ids], self.cfg.train, self.corpus.label_set)
        return macro_f1(self.y[test_ids], predict(model, X_test), self.corpus.label_set)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1, experiment: Experiment | None = None) -> ResultsTable:
    started = time.time()
    exp = experiment or Experiment(cfg)
    grid = [(s, n, f) for s in cfg.schemes for n in cfg.sizes for f in range(cfg.n_folds)]

    def job(cell):
        t0 = time.perf_counter()
        try:
            return cell, exp.run_cell(*cell), None, time.perf_counter() - t0
        except Exception as exc:  # a failed cell must not abort the grid
            log.warning("cell %s failed: %s", cell, exc)
            return cell, None, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(job, grid))
    else:
        outcomes = [job(c) for c in grid]

    rows, failures, timings = [], [], []
    for (scheme, size, fold), score, error, seconds in outcomes:
        timings.append({"scheme": scheme, "train_size": size, "fold": fold, "seconds": round(seconds, 4)})
        if error is None:
            rows.append(FoldResult(scheme, size, fold, score))
        else:
            failures.append({"scheme": scheme, "train_size": size, "fold": fold, "error": error})

    manifest = {
        "library": "tfcr",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": cfg.to_dict(),
        "prng": PRNG_NAME,
        "base_seed": cfg.base_seed,
        "fold_seeds": {str(f): exp.fold_seed(f) for f in range(cfg.n_folds)},
        "protocol": ("per fold f: training pool = documents outside f, shuffled once with seed base_seed+f; "
                     "each size takes a prefix (nested subsets); weights from the subset only; "
                     "evaluation on all of fold f"),
        "corpus": {"n_documents": len(exp.corpus), "labels": list(exp.corpus.label_set.labels),
                   "fold_sizes": exp.folds.sizes()},
        "embeddings": {"name": exp.model.name, "dim": exp.model.dim, "n_words_loaded": len(exp.model)},
        "jobs": jobs,
        "cells": timings,
        "failures": failures,
        "wall_seconds": round(time.time() - started, 3),
    }
    return ResultsTable(rows, failures, manifest)


def _fmt_float(x: float) -> str:
    return repr(float(x))


def emit_results(table: ResultsTable, out_dir) -> list[Path]:
    """Write results.csv, aggregates.csv, curve_<scheme>.csv and manifest.json."""
    if not table.rows and not table.failures:
        raise ValueError("results table is empty")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def write_csv(name, header, rows):
        path = out / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        written.append(path)

    write_csv("results.csv", ["scheme", "train_size", "fold", "macro_f1"],
              [(r.scheme, r.train_size, r.fold, _fmt_float(r.macro_f1)) for r in table.rows])
    aggs = table.aggregates()
    write_csv("aggregates.csv", ["scheme", "train_size", "mean_macro_f1", "std_macro_f1"],
              [(a.scheme, a.train_size, _fmt_float(a.mean), _fmt_float(a.std)) for a in aggs])
    for scheme in dict.fromkeys(a.scheme for a in aggs):
        write_csv(f"curve_{scheme}.csv", ["train_size", "mean_macro_f1"],
                  [(a.train_size, _fmt_float(a.mean)) for a in aggs if a.scheme == scheme])
    path = out / "manifest.json"
    path.write_text(json.dumps(table.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)
    return written


def read_results_csv(path) -> list[FoldResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [FoldResult(r["scheme"], int(r["train_size"]), int(r["fold"]), float(r["macro_f1"]))
                for r in csv.DictReader(fh)]


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
