"""Word-vector tables and precomputed contextual stores.

Both backends produce a (tokens x dim) matrix per sentence. Static tables
look tokens up independently (zero vector for out-of-vocabulary words);
contextual stores hold one precomputed matrix per sentence id, as written
by the offline export tool.
"""

from pathlib import Path

import numpy as np

from trimine import (
    ContextualStore,
    EmbeddingSource,
    Sentence,
    embed_sentence,
    load_embedding_table,
    load_precomputed_embeddings,
    save_precomputed_embeddings,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print("== static word-vector table ==")
vectors_txt = OUT / "vectors.txt"
vectors_txt.write_text(
    "add 0.9 0.1 0.0\nfeature 0.8 0.2 0.1\nplease 0.1 0.9 0.3\n. 0.0 0.0 1.0\n")
table = load_embedding_table(vectors_txt, expected_dim=3)
src = EmbeddingSource.from_table(table)
print(f"  {len(table.vectors)} vectors of width {table.dim}, "
      f"dropout rides along at {src.dropout_rate}")

sentence = Sentence(id="s1", tokens=["please", "add", "a", "feature", "."], label=1)
matrix = embed_sentence(src, sentence)
print(f"  {sentence.tokens} -> matrix {matrix.shape}")
print(f"  OOV token 'a' embeds to the zero vector: {matrix[2]}")

print("\n== contextual store ==")
store = ContextualStore(
    dim=4, entries={"s1": np.random.default_rng(0).normal(size=(5, 4))})
ctx_path = OUT / "contextual.jsonl"
save_precomputed_embeddings(store, ctx_path)
reloaded = load_precomputed_embeddings(ctx_path)
ctx = EmbeddingSource.from_store(reloaded)
print(f"  store width {ctx.dim}, dropout default {ctx.dropout_rate}")
print(f"  matrix rows must match the sentence's token count: "
      f"{embed_sentence(ctx, sentence).shape[0]} rows for {len(sentence.tokens)} tokens")
