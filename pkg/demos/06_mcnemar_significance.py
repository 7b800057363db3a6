"""Paired significance testing between two classifiers' predictions.

McNemar's test looks only at the discordant sentences: b where model A is
right and B wrong, c the other way around. The exact two-sided binomial
p-value is reported alongside the continuity-corrected chi-square. Final
predictions in multi-seed experiments come from a majority vote over the
seeds' prediction sets.
"""

from trimine import Dataset, Sentence, format_mcnemar, mcnemar, seed_majority

gold = Dataset([Sentence(id=f"s{i}", tokens=["w"] * 4, label=i % 2)
                for i in range(200)], name="gold")
labels = {s.id: s.label for s in gold}

# model A errs on 4 sentences, model B on those plus 12 more
a_wrong = {f"s{i}" for i in (3, 40, 77, 101)}
b_wrong = a_wrong | {f"s{i}" for i in range(120, 132)}
preds_a = {sid: (1 - y if sid in a_wrong else y) for sid, y in labels.items()}
preds_b = {sid: (1 - y if sid in b_wrong else y) for sid, y in labels.items()}

print("== McNemar: A vs B ==")
result = mcnemar(preds_a, preds_b, gold)
print(format_mcnemar(result))
verdict = "significant" if result.p_exact <= 0.05 else "not significant"
print(f"  disagreement is {verdict} at the 0.05 level")

print("\n== majority vote across five seeds ==")
seed_preds = [dict(preds_a) for _ in range(3)] + [dict(preds_b) for _ in range(2)]
voted = seed_majority(seed_preds)
flipped = sum(1 for sid in voted if voted[sid] != preds_b[sid])
print(f"  3 seeds vote with A, 2 with B -> vote equals A "
      f"(differs from B on {flipped} sentences)")

print("\n== identical models are indistinguishable ==")
same = mcnemar(preds_a, dict(preds_a), gold)
print(f"  b={same.b} c={same.c} p_exact={same.p_exact}")
