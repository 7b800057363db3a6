"""Supervised training: per-sentence Adam steps, early stopping on val F1.

One sentence per step (the data is short sentences; epoch shuffling
provides the stochasticity), optional minority-class upsampling before the
first epoch, and model selection by best validation F1 with patience.
Everything is driven by seeded streams derived from TrainConfig.seed, so a
fixed config reproduces bitwise-identical parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .embeddings import EmbeddingSource, embed_sentence
from .models import DanConfig, CnnConfig, ModelParams, forward, init_params, predict
from .numerics import Adam, backward, softmax_cross_entropy
from .seeds import derive_seed
from .text_prep import Dataset, Sentence


@dataclass
class TrainConfig:
    lr: float = 1e-3
    max_epochs: int = 30
    patience: int = 3
    upsample: bool = False
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be at least 1, got {self.max_epochs}")
        if not 0 <= self.patience <= self.max_epochs:
            raise ValueError(f"patience must be in [0, max_epochs], got {self.patience}")


@dataclass
class Metrics:
    """Positive-class precision/recall/F1 plus the confusion counts."""

    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1,
                "tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def metrics_from_counts(tp: int, fp: int, fn: int, tn: int) -> Metrics:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(precision, recall, f1, tp, fp, fn, tn)


def metrics_from_predictions(preds: dict[str, int], d: Dataset) -> Metrics:
    """Score a prediction map against a labelled dataset."""
    tp = fp = fn = tn = 0
    for s in d:
        if s.label is None:
            raise ValueError(f"sentence {s.id!r} is unlabelled")
        if s.id not in preds:
            raise ValueError(f"no prediction for sentence {s.id!r}")
        pred = preds[s.id]
        if pred == 1 and s.label == 1:
            tp += 1
        elif pred == 1 and s.label == 0:
            fp += 1
        elif pred == 0 and s.label == 1:
            fn += 1
        else:
            tn += 1
    return metrics_from_counts(tp, fp, fn, tn)


def evaluate(m: ModelParams, src: EmbeddingSource, d: Dataset) -> Metrics:
    """Eval-mode predictions over the whole dataset, scored on the positive class."""
    if len(d) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    preds = {s.id: predict(m, src, s)[0] for s in d}
    return metrics_from_predictions(preds, d)


def upsample(d: Dataset, rng: np.random.Generator) -> Dataset:
    """Duplicate random positives until classes balance; identity if pos >= neg.

    Originals are all kept in order; duplicates get "#up<n>" id suffixes and
    are appended. Requires at least one sentence of each class.
    """
    if not d.fully_labelled:
        raise ValueError(f"dataset {d.name!r} has unlabelled sentences")
    pos, neg = d.positives(), d.negatives()
    if not pos or not neg:
        raise ValueError(f"dataset {d.name!r} has a single class; cannot upsample")
    if len(pos) >= len(neg):
        return d
    need = len(neg) - len(pos)
    picks = rng.integers(0, len(pos), size=need)
    duplicates = [
        replace(pos[j], id=f"{pos[j].id}#up{n}") for n, j in enumerate(picks)
    ]
    return Dataset(list(d.sentences) + duplicates, name=d.name)


def train_supervised(arch: DanConfig | CnnConfig, src: EmbeddingSource,
                     train: Dataset, val: Dataset,
                     cfg: TrainConfig) -> tuple[ModelParams, Metrics, list[dict]]:
    """Train one classifier; returns (best model, its val metrics, epoch log).

    Per epoch: seeded shuffle, one Adam step per sentence, then a full val
    evaluation. The parameters of the best-val-F1 epoch are kept; training
    stops once `patience` epochs pass without an F1 improvement > 1e-6, or
    at max_epochs.
    """
    if len(train) == 0:
        raise ValueError("training dataset is empty")
    if not train.fully_labelled:
        raise ValueError("training dataset has unlabelled sentences")
    if not val.fully_labelled:
        raise ValueError("validation dataset has unlabelled sentences")
    if not val.positives():
        raise ValueError("validation dataset has no positive sentences; F1 selection undefined")

    init_seed = derive_seed(cfg.seed, 0)
    data_rng = np.random.default_rng(derive_seed(cfg.seed, 1))
    drop_rng = np.random.default_rng(derive_seed(cfg.seed, 2))

    model = init_params(arch, np.random.default_rng(init_seed),
                        embedding_dropout=src.dropout_rate, init_seed=init_seed)
    train_set = upsample(train, data_rng) if cfg.upsample else train
    optimizer = Adam(model.param_list(), lr=cfg.lr)

    best_f1 = -np.inf
    best_epoch = 0
    best_values = model.clone_values()
    best_metrics: Metrics | None = None
    log: list[dict] = []

    for epoch in range(1, cfg.max_epochs + 1):
        order = data_rng.permutation(len(train_set)) if cfg.shuffle else np.arange(len(train_set))
        for idx in order:
            s = train_set.sentences[idx]
            x = embed_sentence(src, s)
            optimizer.zero_grad()
            loss = softmax_cross_entropy(forward(model, x, train_mode=True, rng=drop_rng), s.label)
            backward(loss)
            optimizer.step()
        metrics = evaluate(model, src, val)
        log.append({"epoch": epoch, "val_precision": metrics.precision,
                    "val_recall": metrics.recall, "val_f1": metrics.f1})
        if metrics.f1 > best_f1 + 1e-6:
            best_f1 = metrics.f1
            best_epoch = epoch
            best_values = model.clone_values()
            best_metrics = metrics
        if epoch - best_epoch >= cfg.patience:
            break

    model.load_values(best_values)
    assert best_metrics is not None
    return model, best_metrics, log
