"""Scoring a (multi-)verbalizer on labeled score matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .formats import LabeledExamples, LogitMatrix, MultiVerbalizer, VocabTable
from .search import SearchConfig, _search_one, filter_vocab

DEFAULT_NV_SWEEP = (1, 3, 5, 10, 25, 50, 100)


@dataclass(frozen=True)
class PatternResult:
    pattern_id: str
    accuracy: float
    confusion: np.ndarray  # (k, k), rows = true label, cols = predicted


@dataclass(frozen=True)
class EvalReport:
    per_pattern: tuple[PatternResult, ...]

    @property
    def pooled_accuracy(self) -> float:
        return float(np.mean([r.accuracy for r in self.per_pattern]))


def predict(matrix: LogitMatrix, mv: MultiVerbalizer) -> np.ndarray:
    """Argmax label per example; each label scored by its mean token score.

    Exact ties go to the lowest label id.
    """
    k = mv.num_classes
    scores = np.asarray(matrix.scores, dtype=np.float64)
    means = np.empty((matrix.num_examples, k), dtype=np.float64)
    for y in range(k):
        tokens = mv.tokens(y)
        for t in tokens:
            if not 0 <= t < matrix.vocab_size:
                raise ValueError(f"token {t} out of range")
        means[:, y] = scores[:, tokens].sum(axis=1) / len(tokens)
    # np.argmax returns the first maximum, i.e. the lowest label id on ties
    return means.argmax(axis=1)


def evaluate(matrices: Sequence[LogitMatrix], data: LabeledExamples,
             mv: MultiVerbalizer) -> EvalReport:
    if not matrices:
        raise ValueError("at least one matrix required")
    if mv.num_classes != data.num_classes:
        raise ValueError("verbalizer/labels class count mismatch")
    labels = np.array(data.labels)
    results = []
    for matrix in matrices:
        if matrix.num_examples != data.num_examples:
            raise ValueError(
                f"matrix {matrix.pattern_id!r} has {matrix.num_examples} "
                f"examples, labels have {data.num_examples}")
        preds = predict(matrix, mv)
        k = data.num_classes
        confusion = np.zeros((k, k), dtype=np.int64)
        np.add.at(confusion, (labels, preds), 1)
        accuracy = float(np.trace(confusion)) / max(data.num_examples, 1)
        results.append(PatternResult(matrix.pattern_id, accuracy, confusion))
    return EvalReport(tuple(results))


def sweep_nv(matrices: Sequence[LogitMatrix], data: LabeledExamples,
             vocab: VocabTable, cfg: SearchConfig,
             nv_values: Sequence[int],
             eval_matrices: Sequence[LogitMatrix] | None = None,
             eval_data: LabeledExamples | None = None) -> list[tuple[int, float]]:
    """Accuracy of the raw verbalizer classifier as a function of n_v.

    The filter and candidate stages do not depend on n_v, so the pipeline
    runs once per value with the filtered vocabulary shared. Evaluation uses
    the held-out matrices when given, otherwise the training matrices.
    """
    if not nv_values:
        raise ValueError("empty n_v list")
    for v in nv_values:
        if v < 1:
            raise ValueError("n_v values must be at least 1")
    if eval_matrices is None:
        eval_matrices = matrices
    if eval_data is None:
        eval_data = data
    data.require_searchable()
    t_f = filter_vocab(vocab, cfg.max_filtered, cfg.alpha_only)
    if not t_f:
        raise ValueError("empty filtered vocabulary")
    if cfg.mode == "sep" and len(eval_matrices) != len(matrices):
        raise ValueError("separate mode needs one eval matrix per train matrix")
    out = []
    for n_v in nv_values:
        nv_cfg = SearchConfig(
            n_v=n_v, mode=cfg.mode, max_filtered=cfg.max_filtered,
            max_candidates=max(cfg.max_candidates, n_v),
            objective=cfg.objective, seed=cfg.seed,
            alpha_only=cfg.alpha_only,
            pooled_candidates=cfg.pooled_candidates, distinct=cfg.distinct)
        if cfg.mode == "sep":
            accs = []
            for train_m, eval_m in zip(matrices, eval_matrices):
                mv = _search_one([train_m], data, t_f, nv_cfg)
                accs.append(evaluate([eval_m], eval_data, mv).pooled_accuracy)
            out.append((n_v, float(np.mean(accs))))
        else:
            mv = _search_one(matrices, data, t_f, nv_cfg)
            out.append((n_v, evaluate(eval_matrices, eval_data, mv).pooled_accuracy))
    return out


def format_report(report: EvalReport, confusion: bool = False) -> str:
    lines = ["pattern_id\taccuracy"]
    for r in report.per_pattern:
        lines.append(f"{r.pattern_id}\t{r.accuracy:.6f}")
    lines.append(f"pooled\t{report.pooled_accuracy:.6f}")
    if confusion:
        for r in report.per_pattern:
            lines.append(f"confusion\t{r.pattern_id}")
            for row in r.confusion:
                lines.append("\t".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"
