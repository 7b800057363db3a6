"""Embedding table / contextual store loading and sentence embedding."""

import numpy as np
import pytest

from trimine.embeddings import (
    ContextualStore,
    EmbeddingFormatError,
    EmbeddingSource,
    EmbeddingTable,
    MissingEmbeddingError,
    embed_sentence,
    load_embedding_table,
    load_precomputed_embeddings,
    save_precomputed_embeddings,
)
from trimine.text_prep import Sentence


def sent(sid, tokens):
    return Sentence(id=sid, tokens=tokens, label=0)


def small_table():
    return EmbeddingTable(
        dim=2,
        vectors={"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])},
        oov_vector=np.zeros(2),
    )


class TestLoadEmbeddingTable:
    def test_loads_rows(self, tmp_path):
        p = tmp_path / "vecs.txt"
        p.write_text("the 0.1 0.2 0.3\ncat -1 0 2.5\n")
        table = load_embedding_table(p, expected_dim=3)
        assert table.dim == 3
        assert len(table.vectors) == 2
        np.testing.assert_allclose(table.vectors["cat"], [-1.0, 0.0, 2.5])

    def test_oov_is_zero_vector(self, tmp_path):
        p = tmp_path / "vecs.txt"
        p.write_text("the 0.1 0.2 0.3\n")
        table = load_embedding_table(p, expected_dim=3)
        np.testing.assert_array_equal(table.lookup("missing"), np.zeros(3))

    def test_wrong_width_names_token(self, tmp_path):
        p = tmp_path / "vecs.txt"
        p.write_text("the 0.1 0.2 0.3\ncat 1 2\n")
        with pytest.raises(EmbeddingFormatError, match="cat"):
            load_embedding_table(p, expected_dim=3)

    def test_empty_file_errors(self, tmp_path):
        p = tmp_path / "vecs.txt"
        p.write_text("")
        with pytest.raises(EmbeddingFormatError):
            load_embedding_table(p, expected_dim=3)


class TestEmbedSentence:
    def test_static_lookup_order(self):
        src = EmbeddingSource.from_table(small_table())
        out = embed_sentence(src, sent("s", ["a", "b", "a"]))
        np.testing.assert_array_equal(out, [[1, 0], [0, 1], [1, 0]])

    def test_all_oov_gives_zero_matrix(self):
        src = EmbeddingSource.from_table(small_table())
        out = embed_sentence(src, sent("s", ["zz", "qq"]))
        np.testing.assert_array_equal(out, np.zeros((2, 2)))

    def test_shape_matches_tokens_and_dim(self):
        src = EmbeddingSource.from_table(small_table())
        for tokens in (["a"], ["a", "b"], ["b"] * 7):
            assert embed_sentence(src, sent("s", tokens)).shape == (len(tokens), 2)

    def test_static_permutation_permutes_rows(self):
        rng = np.random.default_rng(3)
        table = EmbeddingTable(
            dim=4,
            vectors={f"w{i}": rng.normal(size=4) for i in range(10)},
            oov_vector=np.zeros(4),
        )
        src = EmbeddingSource.from_table(table)
        tokens = [f"w{i}" for i in rng.integers(0, 10, size=8)]
        base = embed_sentence(src, sent("s", tokens))
        perm = rng.permutation(8)
        permuted = embed_sentence(src, sent("s", [tokens[j] for j in perm]))
        np.testing.assert_array_equal(permuted, base[perm])

    def test_contextual_lookup_and_miss(self):
        store = ContextualStore(dim=3, entries={"s1": np.ones((2, 3))})
        src = EmbeddingSource.from_store(store)
        out = embed_sentence(src, sent("s1", ["x", "y"]))
        assert out.shape == (2, 3)
        with pytest.raises(MissingEmbeddingError, match="s9"):
            embed_sentence(src, sent("s9", ["x"]))

    def test_contextual_row_count_mismatch(self):
        store = ContextualStore(dim=3, entries={"s1": np.ones((2, 3))})
        src = EmbeddingSource.from_store(store)
        with pytest.raises(MissingEmbeddingError, match="s1"):
            embed_sentence(src, sent("s1", ["x", "y", "z"]))


class TestDefaultDropoutRates:
    def test_static_default(self):
        assert EmbeddingSource.from_table(small_table()).dropout_rate == 0.2

    def test_contextual_default(self):
        store = ContextualStore(dim=3, entries={"s1": np.ones((1, 3))})
        assert EmbeddingSource.from_store(store).dropout_rate == 0.5


class TestContextualStoreIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        store = ContextualStore(
            dim=4,
            entries={f"s{i}": rng.normal(size=(rng.integers(1, 6), 4)) for i in range(5)},
        )
        p = tmp_path / "ctx.jsonl"
        save_precomputed_embeddings(store, p)
        loaded = load_precomputed_embeddings(p)
        assert loaded.dim == 4
        assert set(loaded.entries) == set(store.entries)
        for sid in store.entries:
            np.testing.assert_allclose(loaded.entries[sid], store.entries[sid], rtol=1e-7)

    def test_header_line_respected(self, tmp_path):
        p = tmp_path / "ctx.jsonl"
        p.write_text('{"dim": 2}\n{"id": "a", "vectors": [[1.0, 2.0]]}\n')
        store = load_precomputed_embeddings(p)
        assert store.dim == 2

    def test_inconsistent_width_errors(self, tmp_path):
        p = tmp_path / "ctx.jsonl"
        p.write_text('{"id": "a", "vectors": [[1.0, 2.0]]}\n{"id": "b", "vectors": [[1.0]]}\n')
        with pytest.raises(EmbeddingFormatError, match="b"):
            load_precomputed_embeddings(p)

    def test_empty_file_errors(self, tmp_path):
        p = tmp_path / "ctx.jsonl"
        p.write_text("")
        with pytest.raises(EmbeddingFormatError):
            load_precomputed_embeddings(p)
