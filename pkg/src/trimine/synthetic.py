"""Synthetic corpora for exercising the pipeline without external data.

Two generators: a tiny linearly separable set (training smoke tests) and a
two-domain suggestion-style corpus with a controlled mean shift between
domains. In the shifted corpus the class signal carried by "core" words is
stable across domains, while "cue" words correlate with the label only in
the source domain and are uninformative in the target domain; domain
marker words shift the mean of every sentence. Supervised models trained
on source latch onto the easy cue signal and degrade on target, which is
exactly the gap label bootstrapping on unlabelled target data recovers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSource, EmbeddingTable
from .text_prep import Dataset, Sentence


def make_separable_fixture(n_per_class: int = 4):
    """Orthogonal one-hot embeddings and a trivially separable 8-sentence set."""
    dim = 2 * n_per_class
    vectors = {}
    for i in range(n_per_class):
        for prefix, base in (("pos", 0), ("neg", n_per_class)):
            v = np.zeros(dim)
            v[base + i] = 1.0
            vectors[f"{prefix}{i}"] = v
    table = EmbeddingTable(dim=dim, vectors=vectors, oov_vector=np.zeros(dim))
    sentences = []
    for i in range(n_per_class):
        sentences.append(Sentence(id=f"p{i}", tokens=[f"pos{i}"] * 4, label=1))
        sentences.append(Sentence(id=f"n{i}", tokens=[f"neg{i}"] * 4, label=0))
    data = Dataset(sentences, name="separable")
    return table, data


@dataclass
class DomainShiftFixture:
    source: EmbeddingSource
    source_train: Dataset
    target_unlabelled: Dataset
    target_val: Dataset
    target_test: Dataset


class _ShiftedCorpus:
    """Samples sentences for the two-domain corpus."""

    def __init__(self, rng: np.random.Generator, dim: int,
                 core_scale: float, cue_scale: float, domain_scale: float,
                 word_noise: float, core_flip: dict[str, float]):
        self.rng = rng
        self.core_flip = core_flip
        groups = {
            "corepos": (20, core_scale, 0), "coreneg": (20, -core_scale, 0),
            "cuepos": (20, cue_scale, 1), "cueneg": (20, -cue_scale, 1),
            "srcdom": (12, domain_scale, 2), "tgtdom": (12, domain_scale, 3),
            "fill": (40, 0.0, 0),
        }
        vectors: dict[str, np.ndarray] = {}
        self.words: dict[str, list[str]] = {}
        for name, (count, weight, axis) in groups.items():
            self.words[name] = [f"{name}{j:02d}" for j in range(count)]
            for word in self.words[name]:
                v = rng.normal(0.0, word_noise, size=dim)
                v[axis] += weight
                vectors[word] = v
        self.table = EmbeddingTable(dim=dim, vectors=vectors, oov_vector=np.zeros(dim))

    def _draw(self, group: str, n: int) -> list[str]:
        words = self.words[group]
        return [words[j] for j in self.rng.integers(0, len(words), size=n)]

    def sentence(self, sid: str, label: int, domain: str) -> Sentence:
        core_group = "corepos" if label == 1 else "coreneg"
        tokens: list[str] = []
        for _ in range(3):
            g = core_group
            if self.rng.random() < self.core_flip[domain]:
                g = "coreneg" if g == "corepos" else "corepos"
            tokens.extend(self._draw(g, 1))
        if domain == "source":
            # cue words track the label only here
            tokens.extend(self._draw("cuepos" if label == 1 else "cueneg", 4))
        else:
            for _ in range(4):
                tokens.extend(self._draw("cuepos" if self.rng.random() < 0.5 else "cueneg", 1))
        tokens.extend(self._draw("srcdom" if domain == "source" else "tgtdom", 2))
        tokens.extend(self._draw("fill", int(self.rng.integers(2, 5))))
        order = self.rng.permutation(len(tokens))
        return Sentence(id=sid, tokens=[tokens[k] for k in order], label=label)

    def dataset(self, name: str, prefix: str, n: int, domain: str,
                labelled: bool = True) -> Dataset:
        sentences = []
        for j in range(n):
            label = int(self.rng.random() < 0.5)
            s = self.sentence(f"{prefix}{j:04d}", label, domain)
            if not labelled:
                s = Sentence(id=s.id, tokens=s.tokens, label=None)
            sentences.append(s)
        return Dataset(sentences, name=name)


def make_domain_shift_fixture(data_seed: int = 20190409, dim: int = 40,
                              n_source: int = 300, n_unlabelled: int = 300,
                              n_val: int = 250, n_test: int = 200,
                              core_scale: float = 1.0, cue_scale: float = 1.8,
                              domain_scale: float = 1.5, word_noise: float = 0.35,
                              source_core_flip: float = 0.30,
                              target_core_flip: float = 0.03,
                              dropout_rate: float = 0.2) -> DomainShiftFixture:
    """Two-domain corpus: labelled source, unlabelled target, labelled target val/test.

    The source's core words are noisier than its cue words, so a supervised
    model leans on the cues and pays for it under the shift; the target's
    core words are clean, leaving headroom for bootstrapped recovery.
    """
    corpus = _ShiftedCorpus(np.random.default_rng(data_seed), dim,
                            core_scale, cue_scale, domain_scale, word_noise,
                            {"source": source_core_flip, "target": target_core_flip})
    return DomainShiftFixture(
        source=EmbeddingSource.from_table(corpus.table, dropout_rate=dropout_rate),
        source_train=corpus.dataset("source-train", "src", n_source, "source"),
        target_unlabelled=corpus.dataset("target-unlabelled", "tgu", n_unlabelled,
                                         "target", labelled=False),
        target_val=corpus.dataset("target-val", "tgv", n_val, "target"),
        target_test=corpus.dataset("target-test", "tgt", n_test, "target"),
    )
