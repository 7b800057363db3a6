"""Frozen contextual token embeddings for trimine datasets.

Runs a pretrained transformer (never fine-tuned, eval mode only) over a
dataset CSV and writes one embedding matrix per sentence in the
contextual-store JSON Lines format the trimine core loads. Each matrix has
exactly one row per trimine token: the tokenizer's subword pieces are
aligned back to the dataset's whitespace tokens and pooled per token
(first subtoken by default, mean optionally). Rerunning an identical
config reproduces the output byte for byte.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from trimine.embeddings import ContextualStore, save_precomputed_embeddings
from trimine.text_prep import Dataset, load_dataset

POOLING_POLICIES = ("first", "mean")


class AlignmentError(ValueError):
    """Subword pieces could not be aligned to a sentence's tokens."""

    def __init__(self, sentence_id: str, detail: str):
        super().__init__(f"sentence {sentence_id!r}: {detail}")
        self.sentence_id = sentence_id


class ModelLoadError(RuntimeError):
    """The pretrained model or tokenizer could not be loaded."""


@dataclass
class ExportConfig:
    dataset: Path
    model: str
    output: Path
    layer: str | int = "last"
    pool: str = "first"
    batch_size: int = 8
    digits: int = 8

    def __post_init__(self):
        if self.pool not in POOLING_POLICIES:
            raise ValueError(f"pool must be one of {POOLING_POLICIES}, got {self.pool!r}")
        if self.layer != "last":
            self.layer = int(self.layer)
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


def load_any_dataset(path) -> Dataset:
    """Load a dataset CSV whether or not it carries a label column."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    has_labels = header is not None and "label" in header
    return load_dataset(path, has_labels=has_labels)


def load_frozen_model(name_or_path: str):
    """Tokenizer + eval-mode model; wraps load failures for the CLI."""
    try:
        tokenizer = AutoTokenizer.from_pretrained(name_or_path)
        model = AutoModel.from_pretrained(name_or_path)
    except Exception as e:  # hub/file/config failures all land here
        raise ModelLoadError(f"cannot load model {name_or_path!r}: {e}") from e
    model.eval()
    return tokenizer, model


def _select_layer(outputs, layer) -> torch.Tensor:
    if layer == "last":
        return outputs.last_hidden_state
    hidden = outputs.hidden_states
    if not -len(hidden) <= layer < len(hidden):
        raise ValueError(f"layer {layer} out of range; model exposes {len(hidden)} layers")
    return hidden[layer]


def _pool_sentence(sentence, word_ids, hidden: torch.Tensor, pool: str) -> np.ndarray:
    """One row per dataset token, pooled from its subword piece vectors."""
    pieces: list[list[int]] = [[] for _ in sentence.tokens]
    for position, word_id in enumerate(word_ids):
        if word_id is None:  # specials / padding
            continue
        if word_id >= len(sentence.tokens):
            raise AlignmentError(sentence.id, f"tokenizer produced word index {word_id} "
                                              f"for {len(sentence.tokens)} tokens")
        pieces[word_id].append(position)
    rows = []
    for token, positions in zip(sentence.tokens, pieces):
        if not positions:
            raise AlignmentError(sentence.id, f"token {token!r} has no subword pieces")
        if pool == "first":
            rows.append(hidden[positions[0]])
        else:
            rows.append(hidden[positions].mean(dim=0))
    return torch.stack(rows).cpu().numpy().astype(np.float64)


def export_contextual(cfg: ExportConfig) -> dict:
    """Run the export; returns {"sentences": n, "dim": d}.

    The output always starts with a {"dim": D} header line, so an empty
    dataset still produces a loadable (header-only) file.
    """
    dataset = load_any_dataset(cfg.dataset)
    tokenizer, model = load_frozen_model(cfg.model)
    needs_hidden = cfg.layer != "last"
    max_len = getattr(model.config, "max_position_embeddings", None)

    entries: dict[str, np.ndarray] = {}
    sentences = dataset.sentences
    with torch.no_grad():
        for start in range(0, len(sentences), cfg.batch_size):
            batch = sentences[start:start + cfg.batch_size]
            encoding = tokenizer([s.tokens for s in batch], is_split_into_words=True,
                                 padding=True, return_tensors="pt")
            if max_len is not None and encoding["input_ids"].shape[1] > max_len:
                too_long = max(batch, key=lambda s: len(s.tokens))
                raise AlignmentError(too_long.id,
                                     f"{encoding['input_ids'].shape[1]} subword pieces "
                                     f"exceed the model's maximum of {max_len}")
            outputs = model(**encoding, output_hidden_states=needs_hidden)
            hidden = _select_layer(outputs, cfg.layer)
            for i, sentence in enumerate(batch):
                entries[sentence.id] = _pool_sentence(
                    sentence, encoding.word_ids(i), hidden[i], cfg.pool)

    dim = int(model.config.hidden_size)
    store = ContextualStore(dim=dim, entries=entries)
    save_precomputed_embeddings(store, cfg.output, digits=cfg.digits)
    return {"sentences": len(entries), "dim": dim}
