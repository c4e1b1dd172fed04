"""Numerically stable probability computations over raw score matrices.

Everything here promotes to float64 and uses max-subtracted log-sum-exp, so
scores in the thousands neither overflow nor lose the small-probability tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .formats import LabeledExamples, LogitMatrix, MultiVerbalizer


@dataclass(frozen=True)
class BinaryView:
    """One-vs-rest view of a labeled dataset for a single target label."""

    target_label: int
    positives: tuple[int, ...]
    negatives: tuple[int, ...]

    @classmethod
    def of(cls, data: LabeledExamples, target_label: int) -> "BinaryView":
        if not 0 <= target_label < data.num_classes:
            raise ValueError(f"target label {target_label} out of range")
        pos = tuple(i for i, y in enumerate(data.labels) if y == target_label)
        neg = tuple(i for i, y in enumerate(data.labels) if y != target_label)
        return cls(target_label, pos, neg)

    @property
    def n_y(self) -> int:
        return len(self.positives)

    @property
    def n(self) -> int:
        return len(self.positives) + len(self.negatives)


def log_softmax_row(scores: np.ndarray) -> np.ndarray:
    """Log-probabilities of a full score row, normalized over every token."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size == 0:
        raise ValueError("empty score vector")
    if not np.all(np.isfinite(s)):
        raise ValueError("non-finite score")
    m = s.max()
    shifted = s - m
    return shifted - np.log(np.exp(shifted).sum())


def log_softmax_matrix(scores: np.ndarray) -> np.ndarray:
    """Row-wise :func:`log_softmax_row` over a whole matrix."""
    s = np.asarray(scores, dtype=np.float64)
    if s.shape[1] == 0:
        raise ValueError("empty score rows")
    if not np.all(np.isfinite(s)):
        raise ValueError("non-finite score")
    m = s.max(axis=1, keepdims=True)
    shifted = s - m
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _log_one_minus_exp(log_q1: float, row: np.ndarray, token: int) -> float:
    # log(1 - q1). The log1p route loses everything once q1 rounds to 1, so
    # fall back to an exclusion log-sum-exp in that regime.
    if log_q1 < -1e-8:
        return float(np.log1p(-np.exp(log_q1)))
    rest = np.delete(np.asarray(row, dtype=np.float64), token)
    m = rest.max()
    lse_rest = m + np.log(np.exp(rest - m).sum())
    full = np.asarray(row, dtype=np.float64)
    fm = full.max()
    lse_full = fm + np.log(np.exp(full - fm).sum())
    return float(lse_rest - lse_full)


def binary_log_probs(matrix: LogitMatrix, token: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-example (log q1, log q0) for one token, q1 normalized over all tokens."""
    if not 0 <= token < matrix.vocab_size:
        raise ValueError(f"token {token} out of range")
    if matrix.vocab_size < 2:
        raise ValueError("degenerate vocabulary")
    log_q = log_softmax_matrix(matrix.scores)
    log_q1 = log_q[:, token].copy()
    log_q0 = np.empty_like(log_q1)
    for i, lq1 in enumerate(log_q1):
        log_q0[i] = _log_one_minus_exp(lq1, matrix.scores[i], token)
    return log_q1, log_q0


def binary_log_prob_grids(matrix: LogitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """(log q1, log q0) for every example and token at once.

    Shapes (num_examples, vocab_size). Entries where q1 rounds to 1 are
    recomputed exactly via the exclusion path (rare; only under extreme
    score gaps).
    """
    if matrix.vocab_size < 2:
        raise ValueError("degenerate vocabulary")
    log_q1 = log_softmax_matrix(matrix.scores)
    with np.errstate(divide="ignore"):
        log_q0 = np.log1p(-np.exp(log_q1))
    bad = log_q1 >= -1e-8
    if bad.any():
        for i, t in zip(*np.nonzero(bad)):
            log_q0[i, t] = _log_one_minus_exp(log_q1[i, t], matrix.scores[i], t)
    return log_q1, log_q0


def class_probs(matrix_row: np.ndarray, verbalizer: Sequence[int]) -> np.ndarray:
    """Class distribution from one token per label, normalized over the k tokens."""
    row = np.asarray(matrix_row, dtype=np.float64)
    for t in verbalizer:
        if not 0 <= t < row.shape[0]:
            raise ValueError(f"token {t} out of range")
    picked = np.array([row[t] for t in verbalizer], dtype=np.float64)
    return _softmax(picked)


def multi_class_probs(matrix_row: np.ndarray, mv: MultiVerbalizer) -> np.ndarray:
    """Class distribution where each label scores the mean over its token list."""
    row = np.asarray(matrix_row, dtype=np.float64)
    means = np.empty(mv.num_classes, dtype=np.float64)
    for y in range(mv.num_classes):
        tokens = mv.tokens(y)
        if not tokens:
            raise ValueError(f"empty verbalization list for label {y}")
        for t in tokens:
            if not 0 <= t < row.shape[0]:
                raise ValueError(f"token {t} out of range")
        means[y] = row[tokens].sum() / len(tokens)
    return _softmax(means)


def _softmax(values: np.ndarray) -> np.ndarray:
    shifted = values - values.max()
    e = np.exp(shifted)
    return e / e.sum()


def imbalance_weight(y_tilde: int, n_y: int, n: int) -> Fraction:
    """Exponent compensating the one-vs-rest negative skew, as an exact rational."""
    if y_tilde not in (0, 1):
        raise ValueError("binary label must be 0 or 1")
    if not 1 <= n_y < n:
        raise ValueError("degenerate class")
    if y_tilde == 1:
        return Fraction(1)
    return Fraction(n_y, n - n_y)
