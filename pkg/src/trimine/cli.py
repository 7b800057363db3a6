"""Command-line entry point for batch experimentation.

Subcommands: preprocess, train, tritrain, predict, evaluate, compare.
train/tritrain read a JSON config file; command-line flags override config
keys, and the TRITRAIN_SEED environment variable overrides the config's
seed list (flag > env > config). All artifacts land under the config's
output directory together with a manifest of content hashes. Exit codes:
0 success, 1 usage/config error, 2 data error.

Config keys::

    {
      "architecture": "dan" | "cnn",
      "train": "train.csv", "val": "val.csv",
      "test": "test.csv",              // optional
      "unlabelled": "u.csv",           // tritrain only
      "embedding": {"type": "static", "path": "vectors.txt", "dim": 300}
                 | {"type": "contextual", "path": "store.jsonl"},
      "output_dir": "runs/exp1",
      "seeds": [1, 2, 3, 4, 5],
      "lr": 1e-3, "max_epochs": 30, "patience": 3,
      "upsample": true, "shuffle": true,
      "max_iters": 10,                 // tritrain only
      "filter_short": true,            // drop <4-token training sentences
      "dan_hidden": [300, 150, 75, 2], // optional architecture overrides
      "cnn": {"filters_per_width": 192, "filter_widths": [2, 3, 4, 5],
              "head_hidden": [768, 324, 162, 2], "head_dropout": 0.2}
    }

The embedding entry may carry "dropout" to override the per-type default
(0.2 static, 0.5 contextual).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from .embeddings import (
    EmbeddingFormatError,
    EmbeddingSource,
    MissingEmbeddingError,
    embed_sentence,
    load_embedding_table,
    load_precomputed_embeddings,
)
from .models import (
    CnnConfig,
    DanConfig,
    ModelParams,
    load_model,
    predict,
    save_model,
)
from .stats import format_mcnemar, mcnemar, seed_majority
from .text_prep import (
    Dataset,
    DatasetFormatError,
    filter_short,
    load_dataset,
    save_dataset,
)
from .training import Metrics, TrainConfig, metrics_from_predictions, train_supervised
from .tritrain import agreement_label, majority_vote, tri_train

SEED_ENV_VAR = "TRITRAIN_SEED"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2

_DATA_ERRORS = (DatasetFormatError, EmbeddingFormatError, MissingEmbeddingError)


class ConfigError(ValueError):
    """Invalid run configuration or unusable paths."""


# ---------------------------------------------------------------------------
# Run configuration


@dataclass
class RunConfig:
    architecture: str
    train: Path
    val: Path
    embedding: dict
    output_dir: Path
    seeds: list[int]
    test: Path | None = None
    unlabelled: Path | None = None
    lr: float = 1e-3
    max_epochs: int = 30
    patience: int = 3
    upsample: bool = False
    shuffle: bool = True
    max_iters: int = 10
    filter_short: bool = True
    dan_hidden: list[int] | None = None
    cnn: dict = field(default_factory=dict)
    jobs: int = 1

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(lr=self.lr, max_epochs=self.max_epochs,
                           patience=self.patience, upsample=self.upsample,
                           seed=seed, shuffle=self.shuffle)

    def as_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items()}
        for key in ("train", "val", "test", "unlabelled", "output_dir"):
            if d[key] is not None:
                d[key] = str(d[key])
        return d


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def load_run_config(path, args=None, need_unlabelled: bool = False) -> RunConfig:
    """Parse and validate a run config, applying flag/env overrides."""
    path = Path(path)
    _require(path.exists(), f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from None

    known = {f for f in RunConfig.__dataclass_fields__}
    unknown = set(raw) - known
    _require(not unknown, f"{path}: unknown config keys: {sorted(unknown)}")
    for key in ("architecture", "train", "val", "embedding", "output_dir", "seeds"):
        _require(key in raw, f"{path}: missing required key {key!r}")

    cfg = RunConfig(
        architecture=raw["architecture"],
        train=Path(raw["train"]),
        val=Path(raw["val"]),
        embedding=dict(raw["embedding"]),
        output_dir=Path(raw["output_dir"]),
        seeds=[int(s) for s in raw["seeds"]],
        test=Path(raw["test"]) if raw.get("test") else None,
        unlabelled=Path(raw["unlabelled"]) if raw.get("unlabelled") else None,
        lr=float(raw.get("lr", 1e-3)),
        max_epochs=int(raw.get("max_epochs", 30)),
        patience=int(raw.get("patience", 3)),
        upsample=bool(raw.get("upsample", False)),
        shuffle=bool(raw.get("shuffle", True)),
        max_iters=int(raw.get("max_iters", 10)),
        filter_short=bool(raw.get("filter_short", True)),
        dan_hidden=list(raw["dan_hidden"]) if raw.get("dan_hidden") else None,
        cnn=dict(raw.get("cnn", {})),
    )

    # precedence: flag > TRITRAIN_SEED env > config file
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            cfg.seeds = [int(env_seed)]
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}") from None
    if args is not None:
        for key in ("architecture", "lr", "max_epochs", "patience", "max_iters", "jobs"):
            value = getattr(args, key, None)
            if value is not None:
                setattr(cfg, key, value)
        if getattr(args, "seeds", None):
            cfg.seeds = [int(s) for s in args.seeds.split(",")]
        if getattr(args, "output_dir", None):
            cfg.output_dir = Path(args.output_dir)
        if getattr(args, "upsample", None) is not None:
            cfg.upsample = args.upsample

    _require(cfg.architecture in ("dan", "cnn"),
             f"unknown architecture {cfg.architecture!r} (expected dan or cnn)")
    _require(cfg.seeds, "seeds list is empty")
    _require(cfg.jobs >= 1, "jobs must be at least 1")
    _require(cfg.embedding.get("type") in ("static", "contextual"),
             "embedding.type must be static or contextual")
    _require("path" in cfg.embedding, "embedding.path is required")
    if cfg.embedding["type"] == "static":
        _require("dim" in cfg.embedding, "static embedding needs embedding.dim")
    for name, p in (("train", cfg.train), ("val", cfg.val), ("test", cfg.test),
                    ("unlabelled", cfg.unlabelled),
                    ("embedding.path", Path(cfg.embedding["path"]))):
        if p is not None:
            _require(Path(p).exists(), f"{name} path not found: {p}")
    if need_unlabelled:
        _require(cfg.unlabelled is not None, "tritrain needs an unlabelled dataset")
    _require(cfg.max_iters >= 1, "max_iters must be at least 1")
    try:
        cfg.train_config(cfg.seeds[0])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return cfg


def _load_embedding_source(spec: dict) -> EmbeddingSource:
    if spec["type"] == "static":
        table = load_embedding_table(spec["path"], expected_dim=int(spec["dim"]))
        src = EmbeddingSource.from_table(table)
    else:
        src = EmbeddingSource.from_store(load_precomputed_embeddings(spec["path"]))
    if "dropout" in spec:
        src = replace(src, dropout_rate=float(spec["dropout"]))
    return src


def _architecture(cfg: RunConfig, input_dim: int) -> DanConfig | CnnConfig:
    if cfg.architecture == "dan":
        if cfg.dan_hidden:
            return DanConfig(input_dim, list(cfg.dan_hidden))
        return DanConfig.for_input_dim(input_dim)
    options = dict(cfg.cnn)
    options.setdefault("input_dim", input_dim)
    _require(options["input_dim"] == input_dim,
             f"cnn input_dim {options['input_dim']} does not match embedding dim {input_dim}")
    try:
        return CnnConfig(**options)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid cnn config: {e}") from None


# ---------------------------------------------------------------------------
# Artifact helpers


def write_jsonl(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def write_predictions(path: Path, preds: dict[str, tuple[int, float]]) -> None:
    """Prediction interchange CSV: id,label,prob."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "prob"])
        for sid, (label, prob) in preds.items():
            writer.writerow([sid, label, repr(float(prob))])


def read_predictions(path) -> dict[str, tuple[int, float]]:
    path = Path(path)
    preds: dict[str, tuple[int, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "label", "prob"]:
            raise DatasetFormatError(f"{path}:1: expected header id,label,prob")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise DatasetFormatError(f"{path}:{line_no}: expected 3 fields")
            sid, label, prob = row
            if label not in ("0", "1"):
                raise DatasetFormatError(f"{path}:{line_no}: label must be 0 or 1")
            if sid in preds:
                raise DatasetFormatError(f"{path}:{line_no}: duplicate id {sid!r}")
            preds[sid] = (int(label), float(prob))
    return preds


def t_interval(values: list[float]) -> tuple[float, float | None]:
    """(mean, half-width of the 95% t-interval); half-width None for n = 1."""
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, None
    sem = float(np.std(values, ddof=1)) / np.sqrt(len(values))
    t_crit = float(scipy_stats.t.ppf(0.975, df=len(values) - 1))
    return mean, t_crit * sem


def summarize_metrics(rows: list[dict]) -> dict:
    out = {}
    for metric in ("precision", "recall", "f1"):
        mean, halfwidth = t_interval([row[metric] for row in rows])
        out[metric] = {"mean": mean, "halfwidth_95": halfwidth,
                       "values": [row[metric] for row in rows]}
    return out


def write_manifest(out_dir: Path) -> None:
    entries = {}
    for p in sorted(out_dir.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            entries[str(p.relative_to(out_dir))] = hashlib.sha256(p.read_bytes()).hexdigest()
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump({"files": entries}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensemble_predictions(models, src, d: Dataset) -> dict[str, tuple[int, float]]:
    """Majority-vote labels with the mean member probability for the voted label."""
    votes = majority_vote(models, src, d)
    out: dict[str, tuple[int, float]] = {}
    for s in d:
        label = votes[s.id]
        probs = []
        for m in models:
            m_label, m_prob = predict(m, src, s)
            probs.append(m_prob if m_label == label else 1.0 - m_prob)
        out[s.id] = (label, float(np.mean(probs)))
    return out


def _load_datasets(cfg: RunConfig, need_unlabelled: bool):
    train = load_dataset(cfg.train, has_labels=True)
    if cfg.filter_short:
        train = filter_short(train)
    _require(len(train) > 0, "training dataset is empty after filtering")
    val = load_dataset(cfg.val, has_labels=True)
    test = load_dataset(cfg.test, has_labels=True) if cfg.test else None
    unlabelled = None
    if need_unlabelled:
        unlabelled = load_dataset(cfg.unlabelled, has_labels=False)
        if cfg.filter_short:
            unlabelled = filter_short(unlabelled)
    return train, val, test, unlabelled


# ---------------------------------------------------------------------------
# Per-seed workers (module-level so ProcessPoolExecutor can pickle them)


def _train_one_seed(payload: dict) -> dict:
    cfg = RunConfig(**{**payload["config"],
                       "train": Path(payload["config"]["train"]),
                       "val": Path(payload["config"]["val"]),
                       "test": Path(payload["config"]["test"]) if payload["config"]["test"] else None,
                       "unlabelled": Path(payload["config"]["unlabelled"]) if payload["config"]["unlabelled"] else None,
                       "output_dir": Path(payload["config"]["output_dir"])})
    seed = payload["seed"]
    train, val, test, _ = _load_datasets(cfg, need_unlabelled=False)
    src = _load_embedding_source(cfg.embedding)
    arch = _architecture(cfg, src.dim)
    out_dir = cfg.output_dir

    model, val_metrics, epoch_log = train_supervised(arch, src, train, val,
                                                     cfg.train_config(seed))
    save_model(model, out_dir / f"model_seed{seed}.json")
    write_jsonl(out_dir / f"epochs_seed{seed}.jsonl", epoch_log)

    row = {"seed": seed, "val": val_metrics.as_dict(), "test": None}
    for split_name, split in (("val", val), ("test", test)):
        if split is None:
            continue
        preds = {s.id: predict(model, src, s) for s in split}
        write_predictions(out_dir / f"preds_seed{seed}_{split_name}.csv", preds)
        if split_name == "test":
            labels = {sid: label for sid, (label, _) in preds.items()}
            row["test"] = metrics_from_predictions(labels, test).as_dict()
    return row


def _tritrain_one_seed(payload: dict) -> dict:
    cfg = RunConfig(**{**payload["config"],
                       "train": Path(payload["config"]["train"]),
                       "val": Path(payload["config"]["val"]),
                       "test": Path(payload["config"]["test"]) if payload["config"]["test"] else None,
                       "unlabelled": Path(payload["config"]["unlabelled"]) if payload["config"]["unlabelled"] else None,
                       "output_dir": Path(payload["config"]["output_dir"])})
    seed = payload["seed"]
    train, val, test, unlabelled = _load_datasets(cfg, need_unlabelled=True)
    src = _load_embedding_source(cfg.embedding)
    arch = _architecture(cfg, src.dim)
    out_dir = cfg.output_dir

    if len(unlabelled) == 0:
        print(f"warning: unlabelled dataset is empty; seed {seed} reduces to "
              "bootstrapped supervised training", file=sys.stderr)

    models, iter_log = tri_train(arch, src, train, unlabelled, val,
                                 cfg.train_config(seed), max_iters=cfg.max_iters)
    write_jsonl(out_dir / f"iterations_seed{seed}.jsonl", iter_log)
    for i, model in enumerate(models, start=1):
        save_model(model, out_dir / f"model_seed{seed}_m{i}.json")
    # pseudo-label export: what the best ensemble would feed each learner
    for i in (1, 2, 3):
        subset = agreement_label(models, src, unlabelled, i, train)
        save_dataset(subset, out_dir / f"pseudo_seed{seed}_l{i}.csv",
                     include_labels=True, include_source=True)

    row = {"seed": seed, "val": None, "test": None, "iterations": len(iter_log)}
    for split_name, split in (("val", val), ("test", test)):
        if split is None:
            continue
        preds = _ensemble_predictions(models, src, split)
        write_predictions(out_dir / f"preds_seed{seed}_{split_name}.csv", preds)
        labels = {sid: label for sid, (label, _) in preds.items()}
        row[split_name] = metrics_from_predictions(labels, split).as_dict()
    return row


def _run_seeds(worker, cfg: RunConfig) -> list[dict]:
    payloads = [{"config": cfg.as_dict(), "seed": seed} for seed in cfg.seeds]
    if cfg.jobs == 1:
        rows = [worker(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(worker, payloads))
    return sorted(rows, key=lambda r: r["seed"])


def _cross_seed_majority(cfg: RunConfig, splits: list[str], out_dir: Path,
                         datasets: dict[str, Dataset]) -> dict:
    """Majority vote across the per-seed prediction files (odd seed counts)."""
    result: dict = {}
    if len(cfg.seeds) < 3 or len(cfg.seeds) % 2 == 0:
        return result
    for split in splits:
        per_seed = []
        for seed in cfg.seeds:
            preds = read_predictions(out_dir / f"preds_seed{seed}_{split}.csv")
            per_seed.append({sid: label for sid, (label, _) in preds.items()})
        voted = seed_majority(per_seed)
        write_predictions(out_dir / f"preds_majority_{split}.csv",
                          {sid: (label, 1.0) for sid, label in voted.items()})
        result[split] = metrics_from_predictions(voted, datasets[split]).as_dict()
    return result


# ---------------------------------------------------------------------------
# Subcommands


def cmd_preprocess(args) -> int:
    d = load_dataset(args.input, has_labels=not args.no_labels)
    if args.filter_short:
        d = filter_short(d, min_tokens=args.min_tokens)
        if len(d) == 0:
            print(f"warning: no sentences with >= {args.min_tokens} tokens remain",
                  file=sys.stderr)
    save_dataset(d, args.output, include_labels=not args.no_labels)
    print(f"wrote {len(d)} sentences to {args.output}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = load_run_config(args.config, args)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _, val, test, _ = _load_datasets(cfg, need_unlabelled=False)
    rows = _run_seeds(_train_one_seed, cfg)
    for row in rows:
        print(f"seed {row['seed']}: val f1={row['val']['f1']:.4f}"
              + (f" test f1={row['test']['f1']:.4f}" if row["test"] else ""))
    datasets = {"val": val} | ({"test": test} if test is not None else {})
    majority = _cross_seed_majority(cfg, list(datasets), cfg.output_dir, datasets)
    summary = {
        "command": "train",
        "architecture": cfg.architecture,
        "seeds": cfg.seeds,
        "val": summarize_metrics([row["val"] for row in rows]),
        "test": summarize_metrics([row["test"] for row in rows]) if test is not None else None,
        "seed_majority": majority or None,
        "per_seed": rows,
    }
    with open(cfg.output_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    write_manifest(cfg.output_dir)
    print(f"summary written to {cfg.output_dir / 'summary.json'}")
    return EXIT_OK


def cmd_tritrain(args) -> int:
    cfg = load_run_config(args.config, args, need_unlabelled=True)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _, val, test, _ = _load_datasets(cfg, need_unlabelled=True)
    rows = _run_seeds(_tritrain_one_seed, cfg)
    for row in rows:
        print(f"seed {row['seed']}: {row['iterations']} iterations, "
              f"val f1={row['val']['f1']:.4f}"
              + (f" test f1={row['test']['f1']:.4f}" if row["test"] else ""))
    datasets = {"val": val} | ({"test": test} if test is not None else {})
    majority = _cross_seed_majority(cfg, list(datasets), cfg.output_dir, datasets)
    summary = {
        "command": "tritrain",
        "architecture": cfg.architecture,
        "seeds": cfg.seeds,
        "val": summarize_metrics([row["val"] for row in rows]),
        "test": summarize_metrics([row["test"] for row in rows]) if test is not None else None,
        "seed_majority": majority or None,
        "per_seed": rows,
    }
    with open(cfg.output_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    write_manifest(cfg.output_dir)
    print(f"summary written to {cfg.output_dir / 'summary.json'}")
    return EXIT_OK


def _embedding_source_from_flags(args) -> EmbeddingSource:
    if bool(args.static_vectors) == bool(args.contextual):
        raise ConfigError("pass exactly one of --static-vectors or --contextual")
    if args.static_vectors:
        _require(args.dim is not None, "--static-vectors needs --dim")
        spec = {"type": "static", "path": args.static_vectors, "dim": args.dim}
    else:
        spec = {"type": "contextual", "path": args.contextual}
    _require(Path(spec["path"]).exists(), f"embedding path not found: {spec['path']}")
    return _load_embedding_source(spec)


def cmd_predict(args) -> int:
    _require(Path(args.checkpoint).exists(), f"checkpoint not found: {args.checkpoint}")
    _require(Path(args.data).exists(), f"dataset not found: {args.data}")
    src = _embedding_source_from_flags(args)
    model = load_model(args.checkpoint)
    d = load_dataset(args.data, has_labels=not args.no_labels)
    preds = {s.id: predict(model, src, s) for s in d}
    write_predictions(Path(args.output), preds)
    print(f"wrote {len(preds)} predictions to {args.output}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    _require(Path(args.predictions).exists(), f"predictions not found: {args.predictions}")
    _require(Path(args.gold).exists(), f"gold dataset not found: {args.gold}")
    preds = read_predictions(args.predictions)
    gold = load_dataset(args.gold, has_labels=True)
    labels = {sid: label for sid, (label, _) in preds.items()}
    try:
        metrics = metrics_from_predictions(labels, gold)
    except ValueError as e:
        raise DatasetFormatError(str(e)) from None
    print(json.dumps(metrics.as_dict(), indent=2))
    return EXIT_OK


def cmd_compare(args) -> int:
    for p in (args.preds_a, args.preds_b, args.gold):
        _require(Path(p).exists(), f"file not found: {p}")
    preds_a = {sid: label for sid, (label, _) in read_predictions(args.preds_a).items()}
    preds_b = {sid: label for sid, (label, _) in read_predictions(args.preds_b).items()}
    gold = load_dataset(args.gold, has_labels=True)
    try:
        result = mcnemar(preds_a, preds_b, gold)
    except ValueError as e:
        raise DatasetFormatError(str(e)) from None
    print(json.dumps(result.as_dict()))
    print(format_mcnemar(result))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimine",
        description="Semi-supervised suggestion mining: supervised and "
                    "tri-training experiments over DAN/CNN sentence classifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="clean, tokenize, and rewrite a dataset CSV")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--no-labels", action="store_true", help="input has no label column")
    p.add_argument("--filter-short", action="store_true",
                   help="drop sentences shorter than --min-tokens (training data only)")
    p.add_argument("--min-tokens", type=int, default=4)
    p.set_defaults(func=cmd_preprocess)

    for name, func, extra in (("train", cmd_train, False), ("tritrain", cmd_tritrain, True)):
        p = sub.add_parser(name, help=f"run {name} over the config's seed list")
        p.add_argument("config", help="JSON run config")
        p.add_argument("--architecture", choices=["dan", "cnn"])
        p.add_argument("--seeds", help="comma-separated seed list override")
        p.add_argument("--lr", type=float)
        p.add_argument("--max-epochs", type=int, dest="max_epochs")
        p.add_argument("--patience", type=int)
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--upsample", action=argparse.BooleanOptionalAction, default=None)
        p.add_argument("--jobs", type=int, help="parallel per-seed workers")
        if extra:
            p.add_argument("--max-iters", type=int, dest="max_iters")
        p.set_defaults(func=func)

    p = sub.add_parser("predict", help="write id,label,prob predictions for a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("data")
    p.add_argument("output")
    p.add_argument("--static-vectors", help="word-vector text file")
    p.add_argument("--dim", type=int, help="static vector width")
    p.add_argument("--contextual", help="contextual store JSONL")
    p.add_argument("--no-labels", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a predictions file against gold labels")
    p.add_argument("predictions")
    p.add_argument("gold")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="McNemar paired test between two prediction files")
    p.add_argument("preds_a")
    p.add_argument("preds_b")
    p.add_argument("gold")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
