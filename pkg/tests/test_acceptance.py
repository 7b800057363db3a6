"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion with the measured values. The domain-shift trend and gradient
checks are the slow ones (a few minutes combined); everything runs on
synthetic data with static embeddings only.
"""

import json
import time
from fractions import Fraction

import numpy as np
import pytest

from trimine.cli import main, read_predictions, t_interval
from trimine.embeddings import EmbeddingSource, EmbeddingTable
from trimine.models import (
    CnnConfig,
    DanConfig,
    cnn_forward,
    init_params,
)
from trimine.numerics import grad_check, softmax_cross_entropy
from trimine.stats import exact_binomial_p
from trimine.synthetic import make_domain_shift_fixture
from trimine.text_prep import Dataset, Sentence
from trimine.training import (
    TrainConfig,
    evaluate,
    metrics_from_predictions,
    train_supervised,
    upsample,
)
from trimine.tritrain import majority_vote, tri_train


def report(name, detail):
    print(f"\nPASS [{name}]: {detail}")


def test_gradient_correctness():
    """DAN-300 and CNN-768 gradients vs central finite differences, 20 sentences each."""
    t0 = time.time()
    worst = {}
    specs = [
        ("dan-300", init_params(DanConfig.for_input_dim(300),
                                np.random.default_rng(101), embedding_dropout=0.0),
         300),
        ("cnn-768", init_params(CnnConfig(), np.random.default_rng(102),
                                embedding_dropout=0.0), 768),
    ]
    data_rng = np.random.default_rng(2024)
    for name, model, dim in specs:
        worst[name] = 0.0
        for k in range(20):
            length = int(data_rng.integers(5, 16))
            x = data_rng.normal(size=(length, dim))
            label = int(data_rng.integers(0, 2))

            def loss():
                from trimine.models import forward
                return softmax_cross_entropy(forward(model, x), label)

            err = grad_check(loss, model.param_list(), eps=1e-4,
                             sample_per_param=3,
                             rng=np.random.default_rng(1000 + k))
            worst[name] = max(worst[name], err)
        assert worst[name] < 1e-4, f"{name} max relative error {worst[name]:.3e}"
    elapsed = time.time() - t0
    assert elapsed < 120.0, f"gradient checks took {elapsed:.1f}s (budget 120s)"
    report("gradient-correctness",
           f"max rel err dan={worst['dan-300']:.2e} cnn={worst['cnn-768']:.2e} "
           f"in {elapsed:.1f}s")


def test_shapes_and_parameter_counts():
    """Pooled concat width 768; DAN stacks; closed-form parameter totals."""
    cnn = init_params(CnnConfig(), np.random.default_rng(0))
    out = cnn_forward(cnn, np.random.default_rng(1).normal(size=(9, 768)))
    assert out.shape == (2,)
    assert cnn.parameters["cnn.head.l0.W"].data.shape == (768, 768)
    assert CnnConfig().filters_per_width * len(CnnConfig().filter_widths) == 768

    assert DanConfig.for_input_dim(300).hidden == [300, 150, 75, 2]
    assert DanConfig.for_input_dim(768).hidden == [768, 324, 162, 2]

    # closed forms, computed from scratch here
    dan300 = 0
    prev = 300
    for h in (300, 150, 75, 2):
        dan300 += prev * h + h
        prev = h
    dan768 = 0
    prev = 768
    for h in (768, 324, 162, 2):
        dan768 += prev * h + h
        prev = h
    conv = sum(192 * w * 768 + 192 for w in (2, 3, 4, 5))
    head = 0
    prev = 768
    for h in (768, 324, 162, 2):
        head += prev * h + h
        prev = h
    assert init_params(DanConfig.for_input_dim(300),
                       np.random.default_rng(0)).param_count() == dan300
    assert init_params(DanConfig.for_input_dim(768),
                       np.random.default_rng(0)).param_count() == dan768
    assert cnn.param_count() == conv + head
    report("shape-architecture",
           f"pooled=768, dan300={dan300}, dan768={dan768}, cnn={conv + head} params")


def test_mcnemar_oracle_equivalence():
    """Exact binomial p equals a Pascal-triangle oracle for all b+c <= 20."""

    def oracle(b, c):
        n = b + c
        if n == 0:
            return 1.0
        row = [1]
        for _ in range(n):
            row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
        tail = sum(row[k] for k in range(min(b, c) + 1))
        return float(min(Fraction(1), 2 * Fraction(tail, 2 ** n)))

    checked = 0
    for n in range(0, 21):
        for b in range(n + 1):
            c = n - b
            assert exact_binomial_p(b, c) == pytest.approx(oracle(b, c), abs=1e-12)
            checked += 1
    assert exact_binomial_p(10, 2) == pytest.approx(0.03857, abs=1e-5)
    for b in (0, 3, 10):
        assert exact_binomial_p(b, b) == 1.0
    report("mcnemar-oracle", f"{checked} (b,c) pairs match to 1e-12; "
           f"p(10,2)={exact_binomial_p(10, 2):.10f}")


def test_tritrain_invariants():
    """Pigeonhole coverage, gold-portion preservation, and size bounds per iteration."""
    fx = make_domain_shift_fixture(n_source=40, n_unlabelled=30, n_val=30, n_test=10)
    arch = DanConfig(40, [16, 2])
    cfg = TrainConfig(seed=5, lr=0.02, max_epochs=3, patience=3)
    states = []
    tri_train(arch, fx.source, fx.source_train, fx.target_unlabelled, fx.target_val,
              cfg, max_iters=3, inspect=states.append)
    assert states
    u_ids = {s.id for s in fx.target_unlabelled}
    L = fx.source_train
    for state in states:
        covered = set()
        pseudo_total = 0
        for subset in state.subsets:
            gold = [s for s in subset if s.source == "gold"]
            pseudo = [s for s in subset if s.source == "pseudo"]
            assert gold == L.sentences, "gold portion must be exactly L"
            assert all(s.label in (0, 1) for s in pseudo)
            assert len(L) <= len(subset) <= len(L) + len(fx.target_unlabelled)
            covered |= {s.id for s in pseudo}
            pseudo_total += len(pseudo)
        assert covered == u_ids, "every unlabelled sentence joins at least one subset"
        assert pseudo_total >= len(u_ids)
    report("tritrain-invariants",
           f"{len(states)} iterations checked over |L|={len(L)}, |U|={len(u_ids)}")


def test_domain_shift_trend():
    """Majority-vote tri-training beats supervised-only under domain shift."""
    t0 = time.time()
    fx = make_domain_shift_fixture()
    arch = DanConfig(40, [32, 16, 2])
    gains = []
    for master_seed in (1, 2, 3, 4, 5):
        cfg = TrainConfig(seed=master_seed, lr=0.02, max_epochs=22, patience=5)
        sup_model, _, _ = train_supervised(arch, fx.source, fx.source_train,
                                           fx.target_val, cfg)
        sup_f1 = evaluate(sup_model, fx.source, fx.target_test).f1
        models, _ = tri_train(arch, fx.source, fx.source_train, fx.target_unlabelled,
                              fx.target_val, cfg, max_iters=10)
        votes = majority_vote(models, fx.source, fx.target_test)
        tri_f1 = metrics_from_predictions(votes, fx.target_test).f1
        gains.append(tri_f1 - sup_f1)
    elapsed = time.time() - t0
    improved = sum(g > 0 for g in gains)
    mean_gain = float(np.mean(gains))
    assert improved >= 4, f"only {improved}/5 master seeds improved: {gains}"
    assert mean_gain >= 0.05, f"mean F1 improvement {mean_gain:.4f} < 0.05"
    assert elapsed < 600.0, f"domain-shift run took {elapsed:.1f}s (budget 600s)"
    report("domain-shift-trend",
           f"improved {improved}/5 seeds, mean gain {100 * mean_gain:.1f} F1 points, "
           f"{elapsed:.0f}s")


def test_upsampling_balances_exactly():
    """Any pos<neg dataset balances; the 23%-positive shape becomes 50%."""
    rng = np.random.default_rng(0)
    for n_pos, n_neg in [(23, 77), (1, 9), (40, 41), (10, 100)]:
        d = Dataset(
            [Sentence(id=f"p{i}", tokens=["w"] * 4, label=1) for i in range(n_pos)]
            + [Sentence(id=f"n{i}", tokens=["w"] * 4, label=0) for i in range(n_neg)],
            name="imbalanced")
        out = upsample(d, rng)
        assert len(out.positives()) == len(out.negatives()) == n_neg
        assert out.sentences[: len(d)] == d.sentences
    d23 = Dataset(
        [Sentence(id=f"p{i}", tokens=["w"] * 4, label=1) for i in range(23)]
        + [Sentence(id=f"n{i}", tokens=["w"] * 4, label=0) for i in range(77)],
        name="training-shape")
    out = upsample(d23, rng)
    assert len(out.positives()) / len(out) == pytest.approx(0.5)
    report("upsampling", "pos<neg fixtures balance exactly; 23%-positive -> 50%")


def test_tritrain_cli_determinism(shift_corpus_dir, tmp_path):
    """Two tritrain runs with one config produce identical logs and predictions."""
    outputs = []
    for run in ("a", "b"):
        run_dir = tmp_path / run
        run_dir.mkdir()
        cfg = json.loads((shift_corpus_dir / "config.json").read_text())
        cfg["output_dir"] = str(run_dir / "out")
        cfg["seeds"] = [1, 2, 3]
        config_path = run_dir / "config.json"
        config_path.write_text(json.dumps(cfg))
        assert main(["tritrain", str(config_path)]) == 0
        outputs.append(run_dir / "out")
    a, b = outputs
    compared = 0
    for path_a in sorted(a.iterdir()):
        if path_a.suffix == ".jsonl" or path_a.name.startswith("preds_"):
            path_b = b / path_a.name
            assert path_a.read_bytes() == path_b.read_bytes(), f"{path_a.name} differs"
            compared += 1
    assert compared >= 9  # 3 iteration logs + per-seed and majority predictions
    report("determinism", f"{compared} iteration-log/prediction files byte-identical")


def test_train_reporting_t_intervals(shift_corpus_dir, tmp_path):
    """cmd_train over 5 seeds reports mean and 95% t half-width per metric."""
    cfg = json.loads((shift_corpus_dir / "config.json").read_text())
    cfg["output_dir"] = str(tmp_path / "out")
    cfg["seeds"] = [1, 2, 3, 4, 5]
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(cfg))
    assert main(["train", str(config_path)]) == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    t_crit_df4 = 2.776445105198  # 97.5% Student-t quantile, 4 dof
    for split in ("val", "test"):
        for metric in ("precision", "recall", "f1"):
            block = summary[split][metric]
            values = block["values"]
            assert len(values) == 5
            expected_hw = t_crit_df4 * np.std(values, ddof=1) / np.sqrt(5)
            assert block["mean"] == pytest.approx(np.mean(values), abs=1e-12)
            assert block["halfwidth_95"] == pytest.approx(expected_hw, abs=1e-9)
    report("reporting", "summary carries mean +/- t-interval half-width for 5 seeds")
