"""Reading and writing corpus files.

A corpus file is plain CSV with a header row and one record per string:
``text,label,level,k,instance_seed``. Records keep corpus order (all
grammatical strings first, then all ungrammatical, each in generation
order), so writing is byte-deterministic for a deterministic corpus.
"""
from __future__ import annotations

import csv
from pathlib import Path

from .instances import Level, normalize_level
from .sampling import Label, LabeledString

FIELDS = ("text", "label", "level", "k", "instance_seed")


def write_corpus(corpus: list[LabeledString], path) -> None:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(FIELDS)
        for item in corpus:
            writer.writerow(
                [item.text, item.label.value, item.level.value, item.k, item.instance_seed]
            )


def read_corpus(path) -> list[LabeledString]:
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(FIELDS):
            raise ValueError(f"{path} is not a corpus file (header {header!r})")
        corpus = []
        for row in reader:
            if len(row) != len(FIELDS):
                raise ValueError(f"{path}: malformed record {row!r}")
            text, label, level, k, seed = row
            corpus.append(
                LabeledString(text, Label(label), normalize_level(level), int(k), int(seed))
            )
    return corpus
