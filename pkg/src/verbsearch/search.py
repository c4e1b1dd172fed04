"""The verbalizer search: per-label one-vs-rest ranking, joint and separate
multi-pattern modes, the random baseline, and an exact brute-force maximum
likelihood search used as an oracle at tiny scale."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .candidates import (
    DEFAULT_MAX_CANDIDATES,
    DEFAULT_MAX_FILTERED,
    filter_vocab,
    label_candidates,
)
from .formats import LabeledExamples, LogitMatrix, MultiVerbalizer, VocabTable
from .probs import BinaryView, binary_log_prob_grids, imbalance_weight
from .rng import SplitMix64

MODE_JOINT = "joint"
MODE_SEPARATE = "sep"
OBJECTIVE_LR = "lr"
OBJECTIVE_CE = "ce"

DEFAULT_ENUMERATION_CAP = 10 ** 6


@dataclass(frozen=True)
class TokenLoss:
    token_id: int
    loss: float


@dataclass(frozen=True)
class SearchConfig:
    n_v: int = 10
    mode: str = MODE_JOINT
    max_filtered: int = DEFAULT_MAX_FILTERED
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    objective: str = OBJECTIVE_LR
    seed: int = 0
    alpha_only: bool = True
    pooled_candidates: bool = True
    distinct: bool = False

    def __post_init__(self):
        if self.n_v < 1:
            raise ValueError("n_v must be at least 1")
        if self.n_v > self.max_candidates:
            raise ValueError("n_v exceeds max_candidates")
        if self.mode not in (MODE_JOINT, MODE_SEPARATE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.objective not in (OBJECTIVE_LR, OBJECTIVE_CE):
            raise ValueError(f"unknown objective {self.objective!r}")


def _losses_from_grids(grids: Sequence[tuple[np.ndarray, np.ndarray]],
                       bv: BinaryView, objective: str) -> np.ndarray:
    """Per-token objective summed over patterns, full vocabulary."""
    s0 = float(imbalance_weight(0, bv.n_y, bv.n))
    pos = list(bv.positives)
    neg = list(bv.negatives)
    total = None
    for log_q1, log_q0 in grids:
        if objective == OBJECTIVE_LR:
            z = log_q1 - log_q0
            loss = -(z[pos].sum(axis=0) - s0 * z[neg].sum(axis=0))
        else:
            loss = -(log_q1[pos].sum(axis=0) + s0 * log_q0[neg].sum(axis=0))
        total = loss if total is None else total + loss
    return total


def _rank(losses: np.ndarray, candidates: Sequence[int]) -> list[TokenLoss]:
    ids = np.array(candidates, dtype=np.int64)
    cand_losses = losses[ids]
    order = np.lexsort((ids, cand_losses))
    return [TokenLoss(int(ids[i]), float(cand_losses[i])) for i in order]


def rank_label_tokens(matrices: Sequence[LogitMatrix],
                      bv: BinaryView,
                      candidates: Sequence[int],
                      objective: str = OBJECTIVE_LR) -> list[TokenLoss]:
    """All candidates sorted ascending by summed loss, ties by token id."""
    if len(candidates) == 0:
        raise ValueError("empty candidates")
    if bv.n_y == 0 or bv.n_y == bv.n:
        raise ValueError("degenerate binary view")
    if objective not in (OBJECTIVE_LR, OBJECTIVE_CE):
        raise ValueError(f"unknown objective {objective!r}")
    grids = [binary_log_prob_grids(m) for m in matrices]
    return _rank(_losses_from_grids(grids, bv, objective), candidates)


def _check_alignment(matrices: Sequence[LogitMatrix], data: LabeledExamples,
                     vocab: VocabTable | None = None) -> None:
    if not matrices:
        raise ValueError("at least one matrix required")
    for m in matrices:
        if m.num_examples != data.num_examples:
            raise ValueError(
                f"matrix {m.pattern_id!r} has {m.num_examples} examples, "
                f"labels have {data.num_examples}")
        if vocab is not None and m.vocab_size != len(vocab):
            raise ValueError(
                f"matrix {m.pattern_id!r} vocab size {m.vocab_size} != "
                f"vocabulary size {len(vocab)}")


def _search_one(matrices: Sequence[LogitMatrix], data: LabeledExamples,
                t_f: list[int], cfg: SearchConfig) -> MultiVerbalizer:
    grids = [binary_log_prob_grids(m) for m in matrices]
    per_label: list[tuple[tuple[int, float], ...]] = []
    used: set[int] = set()
    for y in range(data.num_classes):
        bv = BinaryView.of(data, y)
        if cfg.pooled_candidates:
            cands = label_candidates(matrices, bv, t_f, cfg.max_candidates)
        else:
            merged: set[int] = set()
            for m in matrices:
                merged.update(label_candidates([m], bv, t_f, cfg.max_candidates))
            cands = sorted(merged)
        ranked = _rank(_losses_from_grids(grids, bv, cfg.objective), cands)
        if cfg.distinct:
            ranked = [tl for tl in ranked if tl.token_id not in used]
        if cfg.n_v > len(ranked):
            raise ValueError("n_v exceeds candidate pool")
        chosen = ranked[:cfg.n_v]
        used.update(tl.token_id for tl in chosen)
        per_label.append(tuple((tl.token_id, tl.loss) for tl in chosen))
    return MultiVerbalizer(tuple(per_label))


def find_verbalizer(matrices: Sequence[LogitMatrix],
                    data: LabeledExamples,
                    vocab: VocabTable,
                    cfg: SearchConfig):
    """Run the full search pipeline.

    Returns a single :class:`MultiVerbalizer` in joint mode, or a list with
    one per matrix in separate mode.
    """
    _check_alignment(matrices, data, vocab)
    data.require_searchable()
    t_f = filter_vocab(vocab, cfg.max_filtered, cfg.alpha_only)
    if not t_f:
        raise ValueError("empty filtered vocabulary")
    if cfg.mode == MODE_SEPARATE:
        return [_search_one([m], data, t_f, cfg) for m in matrices]
    return _search_one(matrices, data, t_f, cfg)


def brute_force_mle(matrices: Sequence[LogitMatrix],
                    data: LabeledExamples,
                    candidate_sets: Sequence[Sequence[int]],
                    cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[tuple[int, ...], float]:
    """Exhaustive maximum likelihood search over the candidate product.

    Returns the best full verbalizer (one token per label) and its log
    likelihood; ties resolve to the lexicographically smallest token tuple.
    Only feasible at tiny scale, hence the enumeration cap.
    """
    _check_alignment(matrices, data)
    k = data.num_classes
    if len(candidate_sets) != k:
        raise ValueError("need one candidate list per label")
    total = 1
    for cands in candidate_sets:
        if len(cands) == 0:
            raise ValueError("empty candidate list")
        total *= len(cands)
        if total > cap:
            raise ValueError(f"enumeration cap exceeded ({total} > {cap})")
    sorted_sets = [sorted(c) for c in candidate_sets]
    labels = np.array(data.labels)
    n = data.num_examples
    scores = [np.asarray(m.scores, dtype=np.float64) for m in matrices]

    best_ll = -np.inf
    best_v: tuple[int, ...] | None = None
    combo_iter = itertools.product(*sorted_sets)
    chunk_size = 8192
    while True:
        chunk = list(itertools.islice(combo_iter, chunk_size))
        if not chunk:
            break
        ids = np.array(chunk, dtype=np.int64)  # (C, k)
        ll = np.zeros(len(chunk), dtype=np.float64)
        for s in scores:
            picked = s[:, ids]  # (n, C, k)
            m = picked.max(axis=2, keepdims=True)
            lse = m[:, :, 0] + np.log(np.exp(picked - m).sum(axis=2))
            own = picked[np.arange(n)[:, None],
                         np.arange(len(chunk))[None, :],
                         labels[:, None]]
            ll += (own - lse).sum(axis=0)
        i = int(np.argmax(ll))
        if ll[i] > best_ll:
            best_ll = float(ll[i])
            best_v = tuple(chunk[i])
    assert best_v is not None
    return best_v, best_ll


def random_verbalizer(t_f: Sequence[int], k: int, n_v: int,
                      seed: int) -> MultiVerbalizer:
    """Baseline: n_v distinct tokens per label drawn uniformly from t_f.

    Uses the SplitMix64 stream documented in :mod:`verbsearch.rng`, so the
    result is identical across platforms for a given seed. Loss values are
    recorded as 0.
    """
    if n_v > len(t_f):
        raise ValueError("n_v exceeds filtered vocabulary size")
    if k < 1:
        raise ValueError("need at least one class")
    gen = SplitMix64(seed)
    pool = list(t_f)
    per_label = []
    for _ in range(k):
        picks = sorted(gen.sample(pool, n_v))
        per_label.append(tuple((t, 0.0) for t in picks))
    return MultiVerbalizer(tuple(per_label))
