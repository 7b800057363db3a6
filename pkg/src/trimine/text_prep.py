"""Dataset loading, text normalization, tokenization, and length filtering.

The raw input is one sentence per CSV row (``id,sentence[,label]``).
Cleaning collapses whitespace, strips accents, and drops characters outside
a fixed whitelist; tokenization lowercases, splits on whitespace, and peels
leading/trailing punctuation off word tokens. Sentences shorter than four
tokens are dropped from training data only.
"""

from __future__ import annotations

import csv
import re
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path

GOLD = "gold"
PSEUDO = "pseudo"

# Sentence punctuation retained by cleaning; everything else besides
# letters, digits and spaces is treated as a noisy symbol and removed.
_KEPT_PUNCT = set(".,!?'\"-:;()/")
_WS_RUN = re.compile(r"\s+")


class DatasetFormatError(ValueError):
    """A dataset file that does not match the expected CSV shape."""


@dataclass
class RawRecord:
    """One unparsed CSV row: opaque id, raw text, optional 0/1 label."""

    id: str
    text: str
    label: int | None = None


@dataclass
class Sentence:
    id: str
    tokens: list[str]
    label: int | None = None
    source: str = GOLD

    def __post_init__(self):
        if not self.id:
            raise ValueError("sentence id must be nonempty")
        if not self.tokens:
            raise ValueError(f"sentence {self.id!r} has no tokens")
        if self.label not in (None, 0, 1):
            raise ValueError(f"sentence {self.id!r} label must be 0 or 1, got {self.label!r}")
        if self.source not in (GOLD, PSEUDO):
            raise ValueError(f"sentence {self.id!r} has unknown source {self.source!r}")
        if self.source == PSEUDO and self.label is None:
            raise ValueError(f"pseudo-labelled sentence {self.id!r} must carry a label")


@dataclass
class Dataset:
    sentences: list[Sentence] = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        seen = set()
        for s in self.sentences:
            if s.id in seen:
                raise ValueError(f"duplicate sentence id {s.id!r} in dataset {self.name!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def fully_labelled(self) -> bool:
        return all(s.label is not None for s in self.sentences)

    def positives(self) -> list[Sentence]:
        return [s for s in self.sentences if s.label == 1]

    def negatives(self) -> list[Sentence]:
        return [s for s in self.sentences if s.label == 0]


def clean_sentence(raw: str) -> str:
    """Normalize one raw sentence; may return an empty string (caller filters).

    Accented letters are decomposed and their combining marks removed,
    characters outside {letters, digits, space, . , ! ? ' " - : ; ( ) /}
    are dropped, and whitespace runs collapse to single spaces. Case is
    preserved; lowercasing happens in tokenize().
    """
    kept = []
    for ch in unicodedata.normalize("NFKD", raw):
        if unicodedata.combining(ch):
            continue
        if ch.isspace():
            kept.append(" ")
        elif ch.isalnum() or ch in _KEPT_PUNCT:
            kept.append(ch)
    return _WS_RUN.sub(" ", "".join(kept)).strip()


def _split_chunk(chunk: str) -> list[str]:
    # Peel leading/trailing punctuation off as single-character tokens;
    # internal punctuation (don't, well-known) stays attached.
    lead = []
    while chunk and not chunk[0].isalnum():
        lead.append(chunk[0])
        chunk = chunk[1:]
    trail = []
    while chunk and not chunk[-1].isalnum():
        trail.append(chunk[-1])
        chunk = chunk[:-1]
    out = lead
    if chunk:
        out.append(chunk)
    out.extend(reversed(trail))
    return out


def tokenize(clean: str) -> list[str]:
    """Lowercase and split cleaned text into tokens (never containing spaces)."""
    tokens: list[str] = []
    for chunk in clean.lower().split():
        tokens.extend(_split_chunk(chunk))
    return tokens


def filter_short(d: Dataset, min_tokens: int = 4) -> Dataset:
    """Drop sentences with fewer than min_tokens tokens, preserving order.

    Intended for training data only; evaluation sets are scored in full.
    """
    kept = [s for s in d.sentences if len(s.tokens) >= min_tokens]
    return Dataset(kept, name=d.name)


def preprocess_record(rec: RawRecord, source: str = GOLD) -> Sentence | None:
    """Clean + tokenize one record; None if nothing is left after cleaning."""
    tokens = tokenize(clean_sentence(rec.text))
    if not tokens:
        return None
    return Sentence(id=rec.id, tokens=tokens, label=rec.label, source=source)


def _parse_label(text: str, line_no: int, path) -> int:
    if text not in ("0", "1"):
        raise DatasetFormatError(f"{path}:{line_no}: label must be 0 or 1, got {text!r}")
    return int(text)


def load_dataset(path, has_labels: bool = True) -> Dataset:
    """Parse, clean and tokenize a dataset CSV.

    Expected header is ``id,sentence,label`` (``id,sentence`` when
    has_labels is false); a trailing ``source`` column, as written by the
    pseudo-label exporter, is honored too. Rows whose text cleans down to
    nothing are skipped. Raises DatasetFormatError naming the offending
    line for malformed rows, bad labels, or duplicate ids.
    """
    path = Path(path)
    expected = ["id", "sentence"] + (["label"] if has_labels else [])
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"{path}:1: empty file") from None
        has_source = header == expected + ["source"]
        if not has_source and header != expected:
            raise DatasetFormatError(
                f"{path}:1: expected header {','.join(expected)}, got {','.join(header)}"
            )
        width = len(expected) + (1 if has_source else 0)
        sentences = []
        seen = set()
        for line_no, row in enumerate(reader, start=2):
            if len(row) != width:
                raise DatasetFormatError(
                    f"{path}:{line_no}: expected {width} fields, got {len(row)}"
                )
            sid = row[0]
            if not sid:
                raise DatasetFormatError(f"{path}:{line_no}: empty id")
            if sid in seen:
                raise DatasetFormatError(f"{path}:{line_no}: duplicate id {sid!r}")
            seen.add(sid)
            label = _parse_label(row[2], line_no, path) if has_labels else None
            source = GOLD
            if has_source:
                source = row[-1]
                if source not in (GOLD, PSEUDO):
                    raise DatasetFormatError(
                        f"{path}:{line_no}: source must be gold or pseudo, got {source!r}"
                    )
            sent = preprocess_record(RawRecord(sid, row[1], label), source=source)
            if sent is not None:
                sentences.append(sent)
    return Dataset(sentences, name=path.stem)


def save_dataset(d: Dataset, path, include_labels: bool | None = None,
                 include_source: bool = False) -> None:
    """Write a dataset back to CSV (tokens joined by single spaces).

    include_labels=None writes labels iff every sentence has one.
    Loading the written file with load_dataset reproduces the sentences.
    """
    if include_labels is None:
        include_labels = d.fully_labelled
    if include_labels and not d.fully_labelled:
        raise ValueError(f"dataset {d.name!r} has unlabelled sentences")
    header = ["id", "sentence"] + (["label"] if include_labels else [])
    if include_source:
        header.append("source")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in d.sentences:
            row = [s.id, " ".join(s.tokens)]
            if include_labels:
                row.append(str(s.label))
            if include_source:
                row.append(s.source)
            writer.writerow(row)


def relabel(s: Sentence, label: int, source: str = PSEUDO) -> Sentence:
    """Copy of s carrying a new label and provenance."""
    return replace(s, label=label, source=source)
