"""Per-sentence (tokens x dim) matrices from static or contextual vectors.

Two backends: a static token->vector table loaded from word-vector text
files (one ``token v1 ... vdim`` line per token, zero vector for OOV), and
a store of precomputed per-sentence contextual matrices loaded from JSON
Lines. Dropout rates ride along with the source (0.2 static, 0.5
contextual by default) but are applied by the models, not here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .text_prep import Sentence

STATIC_DROPOUT = 0.2
CONTEXTUAL_DROPOUT = 0.5


class EmbeddingFormatError(ValueError):
    """An embedding file that does not match its expected format."""


class MissingEmbeddingError(KeyError):
    """A contextual lookup for a sentence id the store does not contain."""

    def __init__(self, sentence_id: str, detail: str = "not in store"):
        super().__init__(sentence_id)
        self.sentence_id = sentence_id
        self.detail = detail

    def __str__(self):
        return f"sentence {self.sentence_id!r}: {self.detail}"


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]
    oov_vector: np.ndarray

    def lookup(self, token: str) -> np.ndarray:
        return self.vectors.get(token, self.oov_vector)


@dataclass
class ContextualStore:
    dim: int
    entries: dict[str, np.ndarray]


@dataclass
class EmbeddingSource:
    """Tagged union over the two backends plus the model-side dropout rate."""

    backend: EmbeddingTable | ContextualStore
    dropout_rate: float

    def __post_init__(self):
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")

    @property
    def dim(self) -> int:
        return self.backend.dim

    @classmethod
    def from_table(cls, table: EmbeddingTable, dropout_rate: float = STATIC_DROPOUT):
        return cls(table, dropout_rate)

    @classmethod
    def from_store(cls, store: ContextualStore, dropout_rate: float = CONTEXTUAL_DROPOUT):
        return cls(store, dropout_rate)


def load_embedding_table(path, expected_dim: int) -> EmbeddingTable:
    """Load a word-vector text file, checking every row has expected_dim values."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split(" ")
            if not parts or parts == [""]:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != expected_dim:
                raise EmbeddingFormatError(
                    f"{path}: token {token!r} has {len(values)} values, expected {expected_dim}"
                )
            vectors[token] = np.array([float(v) for v in values], dtype=np.float64)
    if not vectors:
        raise EmbeddingFormatError(f"{path}: no vectors found")
    return EmbeddingTable(dim=expected_dim, vectors=vectors,
                          oov_vector=np.zeros(expected_dim, dtype=np.float64))


def load_precomputed_embeddings(path) -> ContextualStore:
    """Load a contextual store from JSON Lines.

    Each line is ``{"id": ..., "vectors": [[...] per token]}``; an optional
    leading header line ``{"dim": D}`` (as written by the export tool) pins
    the expected width. Width must be constant across all entries.
    """
    entries: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise EmbeddingFormatError(f"{path}:{line_no}: bad JSON: {e}") from None
            if "id" not in obj and "dim" in obj:
                if line_no != 1:
                    raise EmbeddingFormatError(f"{path}:{line_no}: header line must come first")
                dim = int(obj["dim"])
                continue
            if "id" not in obj or "vectors" not in obj:
                raise EmbeddingFormatError(f"{path}:{line_no}: missing id or vectors")
            sid = str(obj["id"])
            if sid in entries:
                raise EmbeddingFormatError(f"{path}:{line_no}: duplicate id {sid!r}")
            matrix = np.asarray(obj["vectors"], dtype=np.float64)
            if matrix.ndim != 2 or matrix.shape[0] == 0:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: id {sid!r} vectors must be a nonempty matrix"
                )
            if dim is None:
                dim = matrix.shape[1]
            elif matrix.shape[1] != dim:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: id {sid!r} has width {matrix.shape[1]}, expected {dim}"
                )
            entries[sid] = matrix
    if dim is None:
        raise EmbeddingFormatError(f"{path}: no entries found")
    return ContextualStore(dim=dim, entries=entries)


def save_precomputed_embeddings(store: ContextualStore, path, digits: int = 8) -> None:
    """Write a contextual store as JSON Lines with a {"dim": D} header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": store.dim}) + "\n")
        for sid, matrix in store.entries.items():
            rows = [[float(f"{v:.{digits}g}") for v in row] for row in matrix]
            fh.write(json.dumps({"id": sid, "vectors": rows}) + "\n")


def embed_sentence(src: EmbeddingSource, s: Sentence) -> np.ndarray:
    """Deterministic (tokens x dim) matrix for one sentence; no dropout here."""
    backend = src.backend
    if isinstance(backend, EmbeddingTable):
        return np.stack([backend.lookup(t) for t in s.tokens])
    matrix = backend.entries.get(s.id)
    if matrix is None:
        raise MissingEmbeddingError(s.id)
    if matrix.shape[0] != len(s.tokens):
        raise MissingEmbeddingError(
            s.id, f"store has {matrix.shape[0]} rows but sentence has {len(s.tokens)} tokens"
        )
    return matrix
