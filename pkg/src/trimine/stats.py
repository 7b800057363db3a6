"""Paired significance testing and cross-seed vote aggregation.

McNemar's test compares two classifiers on the same sentences through the
discordant counts b (A right, B wrong) and c (A wrong, B right). The exact
two-sided binomial p-value is primary (valid at small counts); the
continuity-corrected chi-square statistic and its p-value are reported
alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .text_prep import Dataset


@dataclass
class McNemarResult:
    b: int
    c: int
    statistic: float
    p_exact: float
    p_chi2: float

    def as_dict(self) -> dict:
        return {"b": self.b, "c": self.c, "statistic": self.statistic,
                "p_exact": self.p_exact, "p_chi2": self.p_chi2}


def seed_majority(prediction_sets: list[dict[str, int]]) -> dict[str, int]:
    """Per-id majority label over an odd number of prediction maps.

    All maps must cover identical ids; an even count has no tie-break and
    is rejected.
    """
    k = len(prediction_sets)
    if k == 0 or k % 2 == 0:
        raise ValueError(f"need an odd number of prediction sets, got {k}")
    ids = set(prediction_sets[0])
    for n, preds in enumerate(prediction_sets[1:], start=2):
        if set(preds) != ids:
            raise ValueError(f"prediction set {n} covers different ids")
    return {sid: 1 if sum(preds[sid] for preds in prediction_sets) > k / 2 else 0
            for sid in prediction_sets[0]}


def exact_binomial_p(b: int, c: int) -> float:
    """Two-sided exact p: 2 * P[Binomial(b+c, 1/2) <= min(b, c)], clipped at 1."""
    n = b + c
    if n == 0:
        return 1.0
    tail = sum(math.comb(n, k) for k in range(min(b, c) + 1))
    return min(1.0, 2 * tail / (1 << n))


def mcnemar(preds_a: dict[str, int], preds_b: dict[str, int],
            gold: Dataset) -> McNemarResult:
    """McNemar's test of two prediction maps against gold labels.

    Both maps must cover every gold id. Identical error patterns (b = c =
    0) give p = 1 by convention.
    """
    b = c = 0
    for s in gold:
        if s.label is None:
            raise ValueError(f"gold sentence {s.id!r} is unlabelled")
        if s.id not in preds_a or s.id not in preds_b:
            raise ValueError(f"no prediction for gold sentence {s.id!r}")
        a_correct = preds_a[s.id] == s.label
        b_correct = preds_b[s.id] == s.label
        if a_correct and not b_correct:
            b += 1
        elif b_correct and not a_correct:
            c += 1
    statistic = (abs(b - c) - 1) ** 2 / (b + c) if b + c > 0 else 0.0
    # chi-square survival with 1 dof: P[X > s] = erfc(sqrt(s / 2))
    p_chi2 = math.erfc(math.sqrt(statistic / 2.0)) if b + c > 0 else 1.0
    return McNemarResult(b=b, c=c, statistic=statistic,
                         p_exact=exact_binomial_p(b, c), p_chi2=p_chi2)


def format_mcnemar(result: McNemarResult) -> str:
    """Human-readable report table."""
    lines = [
        "McNemar paired comparison",
        f"  A correct, B wrong (b): {result.b}",
        f"  A wrong, B correct (c): {result.c}",
        f"  chi-square statistic  : {result.statistic:.6g}",
        f"  p (exact binomial)    : {result.p_exact:.6g}",
        f"  p (chi-square)        : {result.p_chi2:.6g}",
    ]
    return "\n".join(lines)
