"""Deterministic synthetic score matrices for tests and acceptance runs.

Backgrounds are i.i.d. standard normal from numpy's PCG64 stream seeded from
the spec, so identical specs produce bit-identical matrices on every
platform. Planted instances boost one designated token per class on exactly
that class's rows; the global-confounder variant boosts one token on every
row, the construction on which plain cross entropy fails while the
likelihood ratio does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .formats import LabeledExamples, LogitMatrix, VocabEntry, VocabTable

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class PlantedSpec:
    num_classes: int
    examples_per_class: int
    vocab_size: int
    boost: float
    planted_tokens: tuple[int, ...]
    seed: int = 0
    pattern_id: str = "synthetic"

    def validate(self) -> None:
        if len(self.planted_tokens) != self.num_classes:
            raise ValueError("need one planted token per class")
        if len(set(self.planted_tokens)) != len(self.planted_tokens):
            raise ValueError("planted tokens must be distinct")
        for t in self.planted_tokens:
            if not 0 <= t < self.vocab_size:
                raise ValueError(f"planted token {t} out of range")
        if not np.isfinite(self.boost):
            raise ValueError("boost must be finite")
        if self.num_classes < 1 or self.examples_per_class < 1:
            raise ValueError("need at least one class and one example per class")


def _background(spec: PlantedSpec) -> tuple[np.ndarray, LabeledExamples]:
    spec.validate()
    n = spec.num_classes * spec.examples_per_class
    rng = np.random.default_rng(spec.seed)
    scores = rng.standard_normal((n, spec.vocab_size))
    labels = tuple(
        y for y in range(spec.num_classes) for _ in range(spec.examples_per_class)
    )
    return scores, LabeledExamples(spec.num_classes, labels)


def gen_planted(spec: PlantedSpec) -> tuple[LogitMatrix, LabeledExamples]:
    """Class-blocked rows; label y's planted token boosted on its own rows only."""
    scores, data = _background(spec)
    for y, token in enumerate(spec.planted_tokens):
        rows = slice(y * spec.examples_per_class, (y + 1) * spec.examples_per_class)
        scores[rows, token] += spec.boost
    matrix = LogitMatrix(spec.pattern_id, scores.astype(np.float32))
    matrix.validate()
    return matrix, data


def gen_global_confounder(spec: PlantedSpec, confounder_token: int,
                          confounder_boost: float) -> tuple[LogitMatrix, LabeledExamples]:
    """Like :func:`gen_planted` plus one token boosted on every row."""
    if not 0 <= confounder_token < spec.vocab_size:
        raise ValueError("confounder token out of range")
    if not np.isfinite(confounder_boost):
        raise ValueError("confounder boost must be finite")
    scores, data = _background(spec)
    for y, token in enumerate(spec.planted_tokens):
        rows = slice(y * spec.examples_per_class, (y + 1) * spec.examples_per_class)
        scores[rows, token] += spec.boost
    scores[:, confounder_token] += confounder_boost
    matrix = LogitMatrix(spec.pattern_id, scores.astype(np.float32))
    matrix.validate()
    return matrix, data


def _surface(token_id: int) -> str:
    # base-26 alphabetic name, padded to 2+ characters so the word filter passes
    digits = []
    t = token_id
    while True:
        digits.append(_LETTERS[t % 26])
        t //= 26
        if t == 0:
            break
    if len(digits) < 2:
        digits.append("a")
    return "".join(reversed(digits))


def gen_vocab(vocab_size: int) -> VocabTable:
    """Synthetic all-word-like vocabulary with frequency descending in id."""
    entries = tuple(
        VocabEntry(_surface(t), vocab_size - t, True) for t in range(vocab_size)
    )
    return VocabTable(entries)
