"""Supervised training with upsampling and early stopping on validation F1.

Trains the deep averaging network on the synthetic two-domain corpus's
source split: one Adam step per sentence, seeded shuffling, best-epoch
model selection. The same run twice is bitwise-identical.
"""

import numpy as np

from trimine import DanConfig, TrainConfig, evaluate, train_supervised, upsample
from trimine.synthetic import make_domain_shift_fixture

fx = make_domain_shift_fixture(n_source=200, n_val=120, n_test=120)
arch = DanConfig(40, [32, 16, 2])
cfg = TrainConfig(seed=11, lr=0.02, max_epochs=15, patience=3)

print("== class balance and upsampling ==")
train = fx.source_train
pos, neg = len(train.positives()), len(train.negatives())
print(f"  source train: {pos} positive / {neg} negative")
balanced = upsample(train, np.random.default_rng(0))
print(f"  after upsampling: {len(balanced.positives())} / {len(balanced.negatives())}")

print("\n== training ==")
model, val_metrics, log = train_supervised(arch, fx.source, train, fx.target_val, cfg)
for entry in log:
    marker = " <- best" if entry["val_f1"] == val_metrics.f1 else ""
    print(f"  epoch {entry['epoch']:2d}: val f1 {entry['val_f1']:.4f}{marker}")

test_metrics = evaluate(model, fx.source, fx.target_test)
print(f"\n  best val:  P={val_metrics.precision:.3f} R={val_metrics.recall:.3f} "
      f"F1={val_metrics.f1:.3f}")
print(f"  target test: P={test_metrics.precision:.3f} R={test_metrics.recall:.3f} "
      f"F1={test_metrics.f1:.3f}  (domain shift hurts; see demo 05)")
