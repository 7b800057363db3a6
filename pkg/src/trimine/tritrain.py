"""Three-learner label bootstrapping for semi-supervised domain adaptation.

Three classifiers start from bootstrap resamples of the labelled set L.
Each round trains all three from fresh seeded initializations, then every
unlabelled sentence on which the other two models agree is added (with the
agreed label, marked pseudo) to the third model's training subset, which
is rebuilt from L every round so pseudo labels never accumulate or leak
into L. Rounds continue until majority-vote validation F1 stops improving,
the subsets stop changing, or max_iters is hit; the best round's three
models are returned and final predictions are majority votes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .embeddings import EmbeddingSource
from .models import DanConfig, CnnConfig, ModelParams, predict
from .seeds import derive_seed
from .text_prep import Dataset, Sentence, relabel
from .training import Metrics, TrainConfig, metrics_from_predictions, train_supervised

IMPROVEMENT_TOL = 1e-6


@dataclass
class TriTrainState:
    """Mutable state of one tri-training run."""

    L: Dataset
    U: Dataset
    subsets: list[Dataset]
    models: list[ModelParams] = field(default_factory=list)
    iteration: int = 0
    best_val_f1: float = -np.inf
    best_models: tuple[ModelParams, ModelParams, ModelParams] | None = None


def bootstrap_sample(L: Dataset, rng: np.random.Generator) -> Dataset:
    """|L| draws uniformly with replacement; repeated draws get "#b<n>" id suffixes."""
    if len(L) == 0:
        raise ValueError("cannot bootstrap-sample an empty dataset")
    m = len(L)
    picks = rng.integers(0, m, size=m)
    seen: dict[str, int] = {}
    sentences: list[Sentence] = []
    for j in picks:
        s = L.sentences[j]
        n = seen.get(s.id, 0)
        seen[s.id] = n + 1
        sentences.append(s if n == 0 else replace(s, id=f"{s.id}#b{n}"))
    return Dataset(sentences, name=f"{L.name}+bootstrap")


def agreement_label(models: tuple[ModelParams, ModelParams, ModelParams],
                    src: EmbeddingSource, U: Dataset, i: int,
                    L: Dataset) -> Dataset:
    """Rebuild training subset i: L plus every U sentence the other two agree on.

    i is 1-based. Pseudo sentences carry the agreed label and pseudo
    provenance; the subset is rebuilt from L on every call.
    """
    if i not in (1, 2, 3):
        raise ValueError(f"model index must be 1, 2 or 3, got {i}")
    p, q = [models[j] for j in range(3) if j != i - 1]
    pseudo = []
    for u in U:
        label_p, _ = predict(p, src, u)
        label_q, _ = predict(q, src, u)
        if label_p == label_q:
            pseudo.append(relabel(u, label_p))
    return Dataset(list(L.sentences) + pseudo, name=f"l{i}")


def majority_vote(models: tuple[ModelParams, ModelParams, ModelParams],
                  src: EmbeddingSource, d: Dataset) -> dict[str, int]:
    """Per sentence, the label at least two of the three models predict."""
    votes: dict[str, int] = {}
    for s in d:
        total = sum(predict(m, src, s)[0] for m in models)
        votes[s.id] = 1 if total >= 2 else 0
    return votes


def _subset_key(d: Dataset) -> list[tuple[str, int | None, str]]:
    return [(s.id, s.label, s.source) for s in d.sentences]


def tri_train(arch: DanConfig | CnnConfig, src: EmbeddingSource, L: Dataset,
              U: Dataset, val: Dataset, cfg: TrainConfig, max_iters: int = 10,
              inspect=None) -> tuple[tuple[ModelParams, ModelParams, ModelParams], list[dict]]:
    """Run tri-training; returns the best round's three models and the round log.

    Each round trains the three models from fresh initializations (seeds
    derived from cfg.seed per (round, model)), scores a majority vote on
    val, and rebuilds the subsets by pairwise agreement over U. Stops when
    val F1 fails to improve by more than 1e-6, when the rebuilt subsets
    equal the ones just trained on, or after max_iters rounds. The log has
    one entry per round: sizes and pseudo counts of the subsets trained on,
    plus the majority-vote val F1. `inspect`, if given, is called with the
    TriTrainState after each round's subsets are rebuilt.
    """
    if len(L) == 0:
        raise ValueError("labelled dataset is empty")
    if not L.fully_labelled:
        raise ValueError("labelled dataset has unlabelled sentences")
    if any(u.label is not None for u in U):
        raise ValueError("unlabelled dataset carries labels")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")

    state = TriTrainState(
        L=L, U=U,
        subsets=[bootstrap_sample(L, np.random.default_rng(derive_seed(cfg.seed, 0, i)))
                 for i in (1, 2, 3)],
    )
    log: list[dict] = []

    for it in range(1, max_iters + 1):
        state.iteration = it
        state.models = []
        for i in (1, 2, 3):
            sub_cfg = replace(cfg, seed=derive_seed(cfg.seed, it, i))
            model, _, _ = train_supervised(arch, src, state.subsets[i - 1], val, sub_cfg)
            state.models.append(model)
        models = tuple(state.models)
        votes = majority_vote(models, src, val)
        val_f1 = metrics_from_predictions(votes, val).f1
        log.append({
            "iter": it,
            "l_sizes": [len(sub) for sub in state.subsets],
            "pseudo_added": [sum(1 for s in sub if s.source == "pseudo") for sub in state.subsets],
            "val_f1": val_f1,
        })
        improved = val_f1 > state.best_val_f1 + IMPROVEMENT_TOL
        if improved:
            state.best_val_f1 = val_f1
            state.best_models = models
        rebuilt = [agreement_label(models, src, U, i, L) for i in (1, 2, 3)]
        stagnant = [_subset_key(a) for a in rebuilt] == [_subset_key(b) for b in state.subsets]
        state.subsets = rebuilt
        if inspect is not None:
            inspect(state)
        if not improved or stagnant:
            break

    assert state.best_models is not None
    return state.best_models, log
