"""Token-level search objectives.

All losses are computed in log space from full-vocabulary log-probabilities;
linear-space likelihood products would underflow even at a few dozen
examples. Summation order is fixed (patterns in argument order, examples
ascending) so results are bit-reproducible.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .formats import LabeledExamples, LogitMatrix
from .probs import (
    BinaryView,
    binary_log_prob_grids,
    binary_log_probs,
    imbalance_weight,
    log_softmax_matrix,
)


def _check_bv(bv: BinaryView) -> float:
    if bv.n_y == 0 or bv.n_y == bv.n:
        raise ValueError("degenerate binary view")
    return float(imbalance_weight(0, bv.n_y, bv.n))


def ce_loss(matrix: LogitMatrix, token: int, bv: BinaryView) -> float:
    """Weighted binary cross entropy of one token against the one-vs-rest labels."""
    s0 = _check_bv(bv)
    log_q1, log_q0 = binary_log_probs(matrix, token)
    pos = list(bv.positives)
    neg = list(bv.negatives)
    return float(-(log_q1[pos].sum() + s0 * log_q0[neg].sum()))


def lr_loss(matrix: LogitMatrix, token: int, bv: BinaryView) -> float:
    """Weighted negative log likelihood-ratio of one token.

    With z(x) = log q1(x) - log q0(x) this is -(sum_pos z - s(0) * sum_neg z):
    indifferent to a token's overall likelihood, sensitive only to how it
    separates positives from negatives.
    """
    s0 = _check_bv(bv)
    log_q1, log_q0 = binary_log_probs(matrix, token)
    z = log_q1 - log_q0
    pos = list(bv.positives)
    neg = list(bv.negatives)
    return float(-(z[pos].sum() - s0 * z[neg].sum()))


def positive_ce(matrix: LogitMatrix, token: int, positives: Sequence[int]) -> float:
    """Negative log likelihood of the positive examples only; lower = more plausible."""
    if len(positives) == 0:
        raise ValueError("empty positives")
    log_q1, _ = binary_log_probs(matrix, token)
    return float(-log_q1[list(positives)].sum())


# Vectorized counterparts used by candidate filtering and ranking; same
# arithmetic as the scalar versions, evaluated for every token at once.

def ce_loss_all(matrix: LogitMatrix, bv: BinaryView) -> np.ndarray:
    s0 = _check_bv(bv)
    log_q1, log_q0 = binary_log_prob_grids(matrix)
    pos = list(bv.positives)
    neg = list(bv.negatives)
    return -(log_q1[pos].sum(axis=0) + s0 * log_q0[neg].sum(axis=0))


def lr_loss_all(matrix: LogitMatrix, bv: BinaryView) -> np.ndarray:
    s0 = _check_bv(bv)
    log_q1, log_q0 = binary_log_prob_grids(matrix)
    z = log_q1 - log_q0
    pos = list(bv.positives)
    neg = list(bv.negatives)
    return -(z[pos].sum(axis=0) - s0 * z[neg].sum(axis=0))


def positive_ce_all(matrix: LogitMatrix, positives: Sequence[int]) -> np.ndarray:
    if len(positives) == 0:
        raise ValueError("empty positives")
    log_q1 = log_softmax_matrix(matrix.scores)
    return -log_q1[list(positives)].sum(axis=0)


def _pick(matrix: LogitMatrix, verbalizer: Sequence[int]) -> np.ndarray:
    for t in verbalizer:
        if not 0 <= t < matrix.vocab_size:
            raise ValueError(f"token {t} out of range")
    return np.asarray(matrix.scores, dtype=np.float64)[:, list(verbalizer)]


def mle_log_likelihood(matrices: Sequence[LogitMatrix],
                       verbalizer: Sequence[int],
                       data: LabeledExamples) -> float:
    """Log likelihood of the labels under a full single-token verbalizer.

    The class distribution normalizes over the k verbalization scores only;
    log likelihoods are summed across all patterns.
    """
    if len(verbalizer) != data.num_classes:
        raise ValueError("verbalizer must assign a token to every label")
    total = 0.0
    rows = list(data.labels)
    for matrix in matrices:
        picked = _pick(matrix, verbalizer)  # (n, k)
        if picked.shape[0] != data.num_examples:
            raise ValueError("matrix/labels example count mismatch")
        m = picked.max(axis=1, keepdims=True)
        lse = m[:, 0] + np.log(np.exp(picked - m).sum(axis=1))
        total += float((picked[np.arange(len(rows)), rows] - lse).sum())
    return total


def avg_margin_objective(matrices: Sequence[LogitMatrix],
                         verbalizer: Sequence[int],
                         data: LabeledExamples) -> float:
    """Negative sum of (own score - average score of the other labels).

    Analytic surrogate of the summed per-label likelihood-ratio losses on
    balanced data; the likelihood-ratio search approximately minimizes this.
    """
    k = data.num_classes
    if k < 2:
        raise ValueError("need at least 2 classes")
    if len(verbalizer) != k:
        raise ValueError("verbalizer must assign a token to every label")
    total = 0.0
    rows = np.array(data.labels)
    for matrix in matrices:
        picked = _pick(matrix, verbalizer)  # (n, k)
        if picked.shape[0] != data.num_examples:
            raise ValueError("matrix/labels example count mismatch")
        own = picked[np.arange(len(rows)), rows]
        others = (picked.sum(axis=1) - own) / (k - 1)
        total += float((own - others).sum())
    return -total
