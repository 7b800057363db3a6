"""Shared fixtures: a small on-disk corpus wired for end-to-end CLI runs."""

import json

import numpy as np
import pytest

from trimine.synthetic import make_domain_shift_fixture
from trimine.text_prep import save_dataset


@pytest.fixture(scope="session")
def shift_corpus_dir(tmp_path_factory):
    """Domain-shift corpus written to disk with vectors and a run config."""
    root = tmp_path_factory.mktemp("corpus")
    fx = make_domain_shift_fixture(n_source=60, n_unlabelled=40, n_val=40, n_test=40)

    save_dataset(fx.source_train, root / "train.csv")
    save_dataset(fx.target_val, root / "val.csv")
    save_dataset(fx.target_test, root / "test.csv")
    save_dataset(fx.target_unlabelled, root / "unlabelled.csv", include_labels=False)

    table = fx.source.backend
    with open(root / "vectors.txt", "w", encoding="utf-8") as fh:
        for token, vec in table.vectors.items():
            fh.write(token + " " + " ".join(repr(float(v)) for v in vec) + "\n")

    config = {
        "architecture": "dan",
        "train": str(root / "train.csv"),
        "val": str(root / "val.csv"),
        "test": str(root / "test.csv"),
        "unlabelled": str(root / "unlabelled.csv"),
        "embedding": {"type": "static", "path": str(root / "vectors.txt"), "dim": 40},
        "output_dir": str(root / "out"),
        "seeds": [1, 2, 3],
        "lr": 0.02,
        "max_epochs": 4,
        "patience": 4,
        "max_iters": 2,
        "dan_hidden": [16, 2],
    }
    with open(root / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
    return root
