"""The two sentence classifiers: deep averaging network and multi-width CNN.

Both take a (tokens x dim) embedding matrix and produce two raw logits
(softmax lives in the loss for training and in predict for inference).
The DAN averages token vectors and feeds the mean through ReLU layers;
the CNN runs valid 1-D convolutions of widths 2..5 (192 filters each by
default), max-pools over time, concatenates the pooled vectors, and feeds
a ReLU head. Embedding dropout uses the source's rate; the CNN head also
applies dropout 0.2 after every non-final layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingSource, embed_sentence
from .numerics import (
    Parameter,
    Tensor,
    affine,
    concat,
    conv1d_valid,
    dropout,
    load_arrays,
    max_over_time,
    mean_rows,
    pad_rows,
    relu,
    save_arrays,
    softmax,
)
from .text_prep import Sentence

HEAD_DROPOUT = 0.2


@dataclass
class DanConfig:
    input_dim: int
    hidden: list[int]

    def __post_init__(self):
        if not self.hidden:
            raise ValueError("DAN needs at least one layer")
        if self.hidden[-1] != 2:
            raise ValueError(f"last DAN layer must be 2 (binary softmax), got {self.hidden[-1]}")
        if self.input_dim < 1 or any(h < 1 for h in self.hidden):
            raise ValueError("DAN dimensions must be positive")

    @classmethod
    def for_input_dim(cls, input_dim: int) -> "DanConfig":
        """The layer stacks used with 300-d static and 768-d contextual vectors."""
        if input_dim == 300:
            return cls(300, [300, 150, 75, 2])
        if input_dim == 768:
            return cls(768, [768, 324, 162, 2])
        raise ValueError(f"no default DAN stack for input_dim={input_dim}; pass hidden explicitly")

    def param_count(self) -> int:
        total, d = 0, self.input_dim
        for h in self.hidden:
            total += d * h + h
            d = h
        return total


@dataclass
class CnnConfig:
    input_dim: int = 768
    filter_widths: list[int] = field(default_factory=lambda: [2, 3, 4, 5])
    filters_per_width: int = 192
    head_hidden: list[int] = field(default_factory=lambda: [768, 324, 162, 2])
    head_dropout: float = HEAD_DROPOUT

    def __post_init__(self):
        if not self.filter_widths or sorted(self.filter_widths) != self.filter_widths:
            raise ValueError("filter widths must be a nonempty ascending list")
        if any(w < 1 for w in self.filter_widths):
            raise ValueError("filter widths must be positive")
        if not self.head_hidden or self.head_hidden[-1] != 2:
            raise ValueError("last head layer must be 2 (binary softmax)")
        pooled = self.filters_per_width * len(self.filter_widths)
        if pooled != self.head_hidden[0]:
            raise ValueError(
                f"pooled width {pooled} (filters_per_width x widths) must equal "
                f"first head layer {self.head_hidden[0]}"
            )
        if not 0.0 <= self.head_dropout < 1.0:
            raise ValueError(f"head_dropout must be in [0, 1), got {self.head_dropout}")

    def param_count(self) -> int:
        k, d = self.filters_per_width, self.input_dim
        total = sum(k * w * d + k for w in self.filter_widths)
        prev = k * len(self.filter_widths)  # pooled concat feeds the head
        for h in self.head_hidden:
            total += prev * h + h
            prev = h
        return total


@dataclass
class ModelParams:
    config: DanConfig | CnnConfig
    parameters: dict[str, Parameter]
    embedding_dropout: float
    init_seed: int | None = None

    def param_list(self) -> list[Parameter]:
        return list(self.parameters.values())

    def param_count(self) -> int:
        return sum(p.data.size for p in self.parameters.values())

    def clone_values(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.parameters.items()}

    def load_values(self, values: dict[str, np.ndarray]) -> None:
        for name, arr in values.items():
            self.parameters[name].data[...] = arr


def _glorot(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def _default_embedding_dropout(config) -> float:
    # 768-d inputs are the contextual setup (dropout 0.5); anything else static (0.2).
    return 0.5 if config.input_dim == 768 else 0.2


def init_params(config: DanConfig | CnnConfig, rng: np.random.Generator,
                embedding_dropout: float | None = None,
                init_seed: int | None = None) -> ModelParams:
    """Glorot-uniform weights, zero biases; deterministic for a fixed rng seed."""
    params: dict[str, Parameter] = {}

    def add_affine(prefix: str, d_in: int, d_out: int) -> None:
        params[f"{prefix}.W"] = Parameter(_glorot(rng, (d_in, d_out), d_in, d_out), f"{prefix}.W")
        params[f"{prefix}.b"] = Parameter(np.zeros(d_out), f"{prefix}.b")

    if isinstance(config, DanConfig):
        d = config.input_dim
        for i, h in enumerate(config.hidden):
            add_affine(f"dan.l{i}", d, h)
            d = h
    elif isinstance(config, CnnConfig):
        k, d = config.filters_per_width, config.input_dim
        for w in config.filter_widths:
            params[f"cnn.conv_w{w}.filters"] = Parameter(
                _glorot(rng, (k, w, d), w * d, w * k), f"cnn.conv_w{w}.filters")
            params[f"cnn.conv_w{w}.bias"] = Parameter(np.zeros(k), f"cnn.conv_w{w}.bias")
        prev = k * len(config.filter_widths)
        for i, h in enumerate(config.head_hidden):
            add_affine(f"cnn.head.l{i}", prev, h)
            prev = h
    else:
        raise TypeError(f"unknown config type {type(config).__name__}")

    if embedding_dropout is None:
        embedding_dropout = _default_embedding_dropout(config)
    return ModelParams(config=config, parameters=params,
                       embedding_dropout=embedding_dropout, init_seed=init_seed)


def dan_forward(m: ModelParams, x: np.ndarray, train_mode: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
    """Average dropped-out token vectors, then the ReLU stack; returns (2,) logits."""
    config = m.config
    if not isinstance(config, DanConfig):
        raise TypeError("dan_forward needs a DAN model")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] != config.input_dim:
        raise ValueError(f"expected (tokens, {config.input_dim}) input, got {x.shape}")
    h = mean_rows(dropout(Tensor(x), m.embedding_dropout, rng, train_mode))
    last = len(config.hidden) - 1
    for i in range(len(config.hidden)):
        h = affine(h, m.parameters[f"dan.l{i}.W"], m.parameters[f"dan.l{i}.b"])
        if i != last:
            h = relu(h)
    return h


def cnn_forward(m: ModelParams, x: np.ndarray, train_mode: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
    """Multi-width conv + max-over-time + ReLU head; returns (2,) logits."""
    config = m.config
    if not isinstance(config, CnnConfig):
        raise TypeError("cnn_forward needs a CNN model")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] != config.input_dim:
        raise ValueError(f"expected (tokens, {config.input_dim}) input, got {x.shape}")
    h = dropout(Tensor(x), m.embedding_dropout, rng, train_mode)
    # Valid convolution needs at least max-width tokens; shorter sentences
    # are right-padded with zero vectors.
    h = pad_rows(h, max(config.filter_widths))
    pooled = []
    for w in config.filter_widths:
        conv = conv1d_valid(h, m.parameters[f"cnn.conv_w{w}.filters"],
                            m.parameters[f"cnn.conv_w{w}.bias"])
        pooled.append(max_over_time(relu(conv)))
    z = concat(pooled)
    last = len(config.head_hidden) - 1
    for i in range(len(config.head_hidden)):
        z = affine(z, m.parameters[f"cnn.head.l{i}.W"], m.parameters[f"cnn.head.l{i}.b"])
        if i != last:
            z = dropout(relu(z), config.head_dropout, rng, train_mode)
    return z


def forward(m: ModelParams, x: np.ndarray, train_mode: bool = False,
            rng: np.random.Generator | None = None) -> Tensor:
    if isinstance(m.config, DanConfig):
        return dan_forward(m, x, train_mode, rng)
    return cnn_forward(m, x, train_mode, rng)


def predict(m: ModelParams, src: EmbeddingSource, s: Sentence) -> tuple[int, float]:
    """Eval-mode prediction: (label, softmax probability of that label).

    Exactly equal logits break toward label 0.
    """
    logits = forward(m, embed_sentence(src, s), train_mode=False).data
    probs = softmax(logits)
    label = int(np.argmax(logits))  # first max wins ties -> 0
    return label, float(probs[label])


# ---------------------------------------------------------------------------
# Checkpoints: numerics array format with the architecture in the header


def save_model(m: ModelParams, path) -> None:
    arch = "dan" if isinstance(m.config, DanConfig) else "cnn"
    header = {
        "format": "trimine-model-v1",
        "arch": arch,
        "config": asdict(m.config),
        "embedding_dropout": m.embedding_dropout,
        "init_seed": m.init_seed,
    }
    save_arrays(path, {name: p.data for name, p in m.parameters.items()}, header)


def load_model(path) -> ModelParams:
    header, arrays = load_arrays(path)
    if header.get("format") != "trimine-model-v1":
        raise ValueError(f"{path}: not a model checkpoint")
    if header["arch"] == "dan":
        config = DanConfig(**header["config"])
    elif header["arch"] == "cnn":
        config = CnnConfig(**header["config"])
    else:
        raise ValueError(f"{path}: unknown architecture {header['arch']!r}")
    params = {name: Parameter(arr, name) for name, arr in arrays.items()}
    return ModelParams(config=config, parameters=params,
                       embedding_dropout=float(header["embedding_dropout"]),
                       init_seed=header.get("init_seed"))
