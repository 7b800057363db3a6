"""Cleaning, tokenization, and the dataset CSV round trip.

Raw sentences come in one per CSV row. Cleaning collapses whitespace,
strips accents, and drops noisy symbols; tokenization lowercases and peels
leading/trailing punctuation into separate tokens; sentences shorter than
four tokens are dropped from training data.
"""

from pathlib import Path

from trimine import clean_sentence, filter_short, load_dataset, save_dataset, tokenize

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print("== cleaning ==")
for raw in ["  Please   add a   dark mode!! ", "Café‐style àccents — removed☂",
            "don't touch (this) one."]:
    print(f"  {raw!r:55} -> {clean_sentence(raw)!r}")

print("\n== tokenization ==")
for cleaned in ["Add a feature.", "don't break y'all", '"quoted" (aside)']:
    print(f"  {cleaned!r:30} -> {tokenize(clean_sentence(cleaned))}")

print("\n== load / filter / round trip ==")
raw_csv = OUT / "raw.csv"
raw_csv.write_text(
    "id,sentence,label\n"
    's1,"Please add a dark mode theme",1\n'
    "s2,works fine,0\n"
    "s3,The search could use fuzzy matching please,1\n"
    "s4,meh,0\n",
    encoding="utf-8",
)
dataset = load_dataset(raw_csv)
print(f"  loaded {len(dataset)} sentences")
trainable = filter_short(dataset)
print(f"  after the 4-token training filter: {len(trainable)} "
      f"(dropped {[s.id for s in dataset if len(s.tokens) < 4]})")

round_trip = OUT / "clean.csv"
save_dataset(trainable, round_trip)
reloaded = load_dataset(round_trip)
assert reloaded.sentences == trainable.sentences
print(f"  round trip through {round_trip.name} reproduces the dataset exactly")
