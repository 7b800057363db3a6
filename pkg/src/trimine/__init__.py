"""Semi-supervised suggestion mining toolkit.

Tri-training over two from-scratch neural sentence classifiers (deep
averaging network and multi-width 1-D CNN) built on a minimal float64
reverse-mode tape, with supervised training, minority upsampling,
majority-vote ensembling, and McNemar paired significance testing.
"""

from .embeddings import (
    ContextualStore,
    EmbeddingSource,
    EmbeddingTable,
    embed_sentence,
    load_embedding_table,
    load_precomputed_embeddings,
    save_precomputed_embeddings,
)
from .models import (
    CnnConfig,
    DanConfig,
    ModelParams,
    cnn_forward,
    dan_forward,
    init_params,
    load_model,
    predict,
    save_model,
)
from .numerics import (
    Adam,
    AdamState,
    Parameter,
    Tensor,
    adam_step,
    backward,
    grad_check,
    softmax,
)
from .stats import McNemarResult, format_mcnemar, mcnemar, seed_majority
from .text_prep import (
    Dataset,
    RawRecord,
    Sentence,
    clean_sentence,
    filter_short,
    load_dataset,
    save_dataset,
    tokenize,
)
from .training import (
    Metrics,
    TrainConfig,
    evaluate,
    metrics_from_predictions,
    train_supervised,
    upsample,
)
from .tritrain import (
    TriTrainState,
    agreement_label,
    bootstrap_sample,
    majority_vote,
    tri_train,
)

__version__ = "0.1.0"

__all__ = [
    "Adam", "AdamState", "CnnConfig", "ContextualStore", "DanConfig", "Dataset",
    "EmbeddingSource", "EmbeddingTable", "McNemarResult", "Metrics", "ModelParams",
    "Parameter", "RawRecord", "Sentence", "TrainConfig", "TriTrainState", "Tensor",
    "adam_step", "agreement_label", "backward", "bootstrap_sample", "clean_sentence",
    "cnn_forward", "dan_forward", "embed_sentence", "evaluate", "filter_short",
    "format_mcnemar", "grad_check", "init_params", "load_dataset",
    "load_embedding_table", "load_model", "load_precomputed_embeddings",
    "majority_vote", "mcnemar", "metrics_from_predictions", "predict",
    "save_dataset", "save_model", "save_precomputed_embeddings", "seed_majority",
    "softmax", "tokenize", "train_supervised", "tri_train", "upsample",
]
