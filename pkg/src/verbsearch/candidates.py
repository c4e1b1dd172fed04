"""Vocabulary filtering and per-label candidate sets.

The search space is narrowed in two stages: a task-independent word filter
keeping the most frequent word-like tokens, then a per-label stage keeping
the tokens most likely on that label's positive examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .formats import LogitMatrix, VocabTable
from .losses import positive_ce_all
from .probs import BinaryView

DEFAULT_MAX_FILTERED = 10_000
DEFAULT_MAX_CANDIDATES = 1_000


@dataclass(frozen=True)
class CandidateSets:
    """Filtered vocabulary plus the per-label candidate lists drawn from it."""

    t_f: tuple[int, ...]
    per_label: tuple[tuple[int, ...], ...]


def is_word_like(surface: str, word_initial: bool, alpha_only: bool = True) -> bool:
    """Word predicate for the task-independent filter stage.

    Requires a word-initial token whose surface has at least 2 alphabetic
    characters; with ``alpha_only`` (the default) the surface must be purely
    alphabetic.
    """
    if not word_initial:
        return False
    s = surface.strip()
    if sum(c.isalpha() for c in s) < 2:
        return False
    if alpha_only and not s.isalpha():
        return False
    return True


def filter_vocab(vocab: VocabTable,
                 max_filtered: int = DEFAULT_MAX_FILTERED,
                 alpha_only: bool = True) -> list[int]:
    """Most frequent word-like tokens, returned in ascending-id order."""
    passing = [
        tid for tid, e in enumerate(vocab.entries)
        if is_word_like(e.surface, e.word_initial, alpha_only)
    ]
    # frequency descending, ties by ascending id
    passing.sort(key=lambda tid: (-vocab[tid].frequency, tid))
    kept = passing[:max_filtered]
    kept.sort()
    return kept


def label_candidates(matrices: Sequence[LogitMatrix],
                     bv: BinaryView,
                     t_f: Sequence[int],
                     max_candidates: int = DEFAULT_MAX_CANDIDATES) -> list[int]:
    """Tokens of ``t_f`` most likely on the label's positive examples.

    Scores each token by its positive-example negative log likelihood summed
    over all given matrices and keeps the ``max_candidates`` lowest; ties go
    to the lower token id. The result depends only on positive rows.
    """
    if len(t_f) == 0:
        raise ValueError("empty filtered vocabulary")
    if bv.n_y == 0:
        raise ValueError("binary view has no positives")
    ids = np.array(t_f, dtype=np.int64)
    total = np.zeros(len(ids), dtype=np.float64)
    for matrix in matrices:
        total += positive_ce_all(matrix, bv.positives)[ids]
    order = np.lexsort((ids, total))
    return [int(ids[i]) for i in order[:max_candidates]]
