"""Command line entry point: ``tfcr <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clf import TrainConfig, load_model, macro_f1, predict, save_model, train
from .corpus import LabelSet, load_corpus, write_corpus
from .embed import load_embeddings
from .harness import emit_results, load_config, run_experiment, with_overrides
from .represent import MODES, load_feature_matrix, save_feature_matrix, unweighted_matrix, weighted_matrix
from .tokenize import TokenizerConfig, tokenize_all
from .weights import (SCHEMES, SmoothingConfig, build_weight_table, count_statistics,
                      load_weight_table, save_weight_table)

log = logging.getLogger("tfcr")


def _tokenizer_args(p):
    p.add_argument("--no-lowercase", action="store_true", help="keep original case")
    p.add_argument("--min-token-len", type=int, default=1)


def _tokenizer(args) -> TokenizerConfig:
    return TokenizerConfig(lowercase=not args.no_lowercase, min_token_len=args.min_token_len)


def _dataset_args(p):
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=["tsv", "csv", "jsonl"], help="default: file suffix")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    cfg = with_overrides(cfg, base_seed=args.seed, output_dir=args.output)
    out_dir = cfg.output_dir or "results"
    table = run_experiment(cfg, jobs=args.jobs)
    emit_results(table, out_dir)
    print(table.format_table())
    print(f"wrote results to {out_dir}")
    if table.failures:
        print(f"{len(table.failures)} cell(s) failed; see manifest.json", file=sys.stderr)
        return 1
    return 0


def cmd_weights(args) -> int:
    corpus = load_corpus(args.dataset, args.format)
    tokens = tokenize_all(corpus.texts, _tokenizer(args))
    counts = count_statistics(zip(tokens, corpus.labels), corpus.label_set)
    table = build_weight_table(counts, args.scheme, SmoothingConfig(args.epsilon))
    save_weight_table(table, args.out)
    print(f"{len(table.vocab)} words x {table.label_set.k} categories -> {args.out}")
    return 0


def cmd_repr(args) -> int:
    corpus = load_corpus(args.dataset, args.format)
    tokens = tokenize_all(corpus.texts, _tokenizer(args))
    model = load_embeddings(args.embeddings, args.embedding_format, vocab={t for d in tokens for t in d})
    if args.weights:
        table = load_weight_table(args.weights, corpus.label_set)
        feats = weighted_matrix(tokens, table, model, args.normalize)
    else:
        feats = unweighted_matrix(tokens, model, args.baseline, args.normalize)
    save_feature_matrix(args.out, feats, corpus.labels)
    print(f"{feats.shape[0]} documents x {feats.shape[1]} features -> {args.out}")
    return 0


def cmd_train(args) -> int:
    X, labels = load_feature_matrix(args.features)
    label_set = LabelSet.from_labels(labels)
    y = np.array([label_set.index(lab) for lab in labels])
    cfg = TrainConfig(l2_lambda=args.l2, learning_rate=args.lr, max_epochs=args.epochs,
                      tolerance=args.tol, seed=args.seed or 0)
    model = train(X, y, cfg, label_set)
    save_model(model, args.out)
    print(f"trained on {len(y)} rows, final loss {model.history[-1]:.6f} -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    X, labels = load_feature_matrix(args.features)
    gold = np.array([model.label_set.index(lab) for lab in labels])
    print(f"macro_f1\t{macro_f1(gold, predict(model, X), model.label_set):.6f}")
    return 0


def cmd_fetch_20ng(args) -> int:
    # optional helper; needs scikit-learn and network access
    from sklearn.datasets import fetch_20newsgroups

    from .corpus import LabeledCorpus

    remove = ("headers", "footers", "quotes") if args.strip else ()
    data = fetch_20newsgroups(subset="all", remove=remove, data_home=args.data_home)
    pairs = [(data.target_names[t], " ".join(text.split())) for text, t in zip(data.data, data.target)]
    write_corpus(LabeledCorpus.from_pairs(pairs), args.out)
    print(f"{len(pairs)} documents -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfcr", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tfcr {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="override the base seed")
    parser.add_argument("--jobs", type=int, default=1, help="parallel grid cells for `run`")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a full experiment from a YAML/JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="override output_dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("weights", help="compute and dump a weight table")
    _dataset_args(p)
    _tokenizer_args(p)
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--epsilon", type=float, default=1e-10, help="KLD smoothing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("repr", help="dump document feature vectors as TSV")
    _dataset_args(p)
    _tokenizer_args(p)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--embedding-format", default="auto", choices=["auto", "word2vec_text", "glove_text"])
    p.add_argument("--weights", help="weight table TSV; omit for the unweighted baseline")
    p.add_argument("--baseline", choices=MODES, default="mean")
    p.add_argument("--normalize", action="store_true", help="L2-normalize each vector")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_repr)

    p = sub.add_parser("train", help="train logistic regression on a feature TSV")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--l2", type=float, default=TrainConfig.l2_lambda)
    p.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--epochs", type=int, default=TrainConfig.max_epochs)
    p.add_argument("--tol", type=float, default=TrainConfig.tolerance)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="macro-F1 of a saved model on a feature TSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fetch-20ng", help="download 20 Newsgroups and write a corpus file")
    p.add_argument("--out", required=True)
    p.add_argument("--data-home")
    p.add_argument("--strip", action="store_true", help="remove headers, footers and quotes")
    p.set_defaults(func=cmd_fetch_20ng)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
