"""Multinomial logistic regression (full-batch gradient descent) and macro-F1."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import LabelSet


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    l2_lambda: float = 1e-4
    learning_rate: float = 0.1
    max_epochs: int = 200
    tolerance: float = 1e-6
    seed: int = 0
    max_halvings: int = 30
    standardize: bool = True

    def __post_init__(self):
        if self.l2_lambda < 0:
            raise TrainingError("l2_lambda must be >= 0")
        if not self.learning_rate > 0 or not self.tolerance > 0:
            raise TrainingError("learning_rate and tolerance must be > 0")
        if self.max_epochs < 1:
            raise TrainingError("max_epochs must be >= 1")


@dataclass
class LogRegModel:
    W: np.ndarray                 # (n_classes, n_features)
    b: np.ndarray                 # (n_classes,)
    label_set: LabelSet
    mean: np.ndarray              # standardization, fitted on training data
    std: np.ndarray
    history: list = field(default_factory=list, repr=False, compare=False)

    @property
    def n_features(self) -> int:
        return self.W.shape[1]

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise TrainingError(f"expected {self.n_features} features, got shape {X.shape}")
        return (X - self.mean) / self.std

    def logits(self, X) -> np.ndarray:
        return self.transform(X) @ self.W.T + self.b


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grad(W, b, X, y, l2_lambda):
    """Mean softmax cross-entropy + (l2/2)||W||^2 and its gradient in (W, b)."""
    m = X.shape[0]
    z = X @ W.T + b
    z = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    loss = (log_norm - z[np.arange(m), y]).mean() + 0.5 * l2_lambda * np.sum(W * W)
    P = np.exp(z - log_norm[:, None])
    P[np.arange(m), y] -= 1.0
    P /= m
    return loss, P.T @ X + l2_lambda * W, P.sum(axis=0)


def _loss(W, b, X, y, l2_lambda):
    z = X @ W.T + b
    zmax = z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z - zmax).sum(axis=1)) + zmax[:, 0]
    return (log_norm - z[np.arange(X.shape[0]), y]).mean() + 0.5 * l2_lambda * np.sum(W * W)


def train(X, y, cfg: TrainConfig = TrainConfig(), label_set: LabelSet | None = None) -> LogRegModel:
    """Fit by full-batch gradient descent on the cross-entropy, with the L2
    term applied as its exact proximal step ``W / (1 + lr * l2)`` so a large
    ``l2_lambda`` does not force a tiny learning rate on the bias.

    A step that raises the (regularized) loss is retried at half the
    learning rate; the reduced rate is kept for later epochs. Stops after
    ``max_epochs``, when the relative loss improvement drops below
    ``tolerance``, or when no halving yields a decrease.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise TrainingError(f"X has shape {X.shape} but y has {y.shape[0]} labels")
    if not np.isfinite(X).all():
        raise TrainingError("X contains NaN or Inf")
    n_classes = label_set.k if label_set is not None else int(y.max()) + 1
    if label_set is None:
        label_set = LabelSet(tuple(str(i) for i in range(n_classes)))
    if y.min() < 0 or y.max() >= n_classes:
        raise TrainingError("label ids out of range")
    if np.unique(y).size < 2:
        raise TrainingError("training labels contain a single class")

    if cfg.standardize:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std[std == 0] = 1.0
    else:
        mean, std = np.zeros(X.shape[1]), np.ones(X.shape[1])
    Xs = (X - mean) / std

    W = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)
    lr = cfg.learning_rate
    loss, gW, gb = loss_and_grad(W, b, Xs, y, cfg.l2_lambda)
    history = [loss]
    for _ in range(cfg.max_epochs):
        for _ in range(cfg.max_halvings + 1):
            W_new = (W - lr * (gW - cfg.l2_lambda * W)) / (1.0 + lr * cfg.l2_lambda)
            b_new = b - lr * gb
            new_loss = _loss(W_new, b_new, Xs, y, cfg.l2_lambda)
            if new_loss <= loss:
                break
            lr *= 0.5
        else:
            break
        improvement = (loss - new_loss) / max(abs(loss), 1e-300)
        W, b = W_new, b_new
        loss, gW, gb = loss_and_grad(W, b, Xs, y, cfg.l2_lambda)
        history.append(loss)
        if improvement < cfg.tolerance:
            break
    return LogRegModel(W, b, label_set, mean, std, history)


def predict_proba(model: LogRegModel, X) -> np.ndarray:
    return softmax(model.logits(X))


def predict(model: LogRegModel, X) -> np.ndarray:
    # np.argmax returns the first maximum: ties go to the lowest class index
    return np.argmax(model.logits(X), axis=1)


def per_class_f1(gold, pred, n_classes: int) -> np.ndarray:
    gold = np.asarray(gold, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if gold.shape != pred.shape or gold.ndim != 1 or gold.size == 0:
        raise ValueError("gold and pred must be non-empty sequences of equal length")
    for arr in (gold, pred):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise ValueError(f"label id outside [0, {n_classes})")
    tp = np.bincount(gold[gold == pred], minlength=n_classes).astype(np.float64)
    n_pred = np.bincount(pred, minlength=n_classes)
    n_gold = np.bincount(gold, minlength=n_classes)
    # F1 = 2PR/(P+R) = 2tp/(n_pred+n_gold); 0 where nothing was predicted or gold
    denom = n_pred + n_gold
    return np.divide(2 * tp, denom, out=np.zeros(n_classes), where=denom > 0)


def macro_f1(gold, pred, label_set) -> float:
    """Unweighted mean of per-class F1 over every class in ``label_set``.

    ``label_set`` may be a :class:`LabelSet` or a class count.
    """
    n_classes = label_set if isinstance(label_set, int) else label_set.k
    return float(per_class_f1(gold, pred, n_classes).mean())


# ---------------------------------------------------------------------------
# text model format

_MAGIC = "tfcr-logreg v1"


def _fmt(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in np.ravel(values))


def save_model(model: LogRegModel, path) -> None:
    k, n = model.W.shape
    lines = [
        _MAGIC,
        f"k {k}",
        f"n_features {n}",
        "labels " + json.dumps(list(model.label_set.labels), ensure_ascii=False),
        "mean " + _fmt(model.mean),
        "std " + _fmt(model.std),
        "bias " + _fmt(model.b),
    ]
    lines += [_fmt(row) for row in model.W]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> LogRegModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != _MAGIC:
        raise TrainingError(f"{path}: not a {_MAGIC} file")

    def field_(i, name):
        key, _, rest = lines[i].partition(" ")
        if key != name:
            raise TrainingError(f"{path} line {i + 1}: expected {name!r}")
        return rest

    def floats(s, n, what):
        vals = np.array([float(v) for v in s.split()]) if s.strip() else np.zeros(0)
        if vals.size != n:
            raise TrainingError(f"{path}: {what} has {vals.size} values, expected {n}")
        return vals

    k = int(field_(1, "k"))
    n = int(field_(2, "n_features"))
    labels = json.loads(field_(3, "labels"))
    mean = floats(field_(4, "mean"), n, "mean")
    std = floats(field_(5, "std"), n, "std")
    b = floats(field_(6, "bias"), k, "bias")
    if len(lines) != 7 + k:
        raise TrainingError(f"{path}: expected {k} weight rows")
    W = np.vstack([floats(line, n, f"weight row {r}") for r, line in enumerate(lines[7:])]) if k else np.zeros((0, n))
    return LogRegModel(W.reshape(k, n), b, LabelSet(tuple(labels)), mean, std)
