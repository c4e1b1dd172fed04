"""Masked-position logit export and unlabeled-corpus vocabulary counts."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

import numpy as np
import torch

from .templates import MASK_SLOT, TEXT_B_SLOT, TEXT_SLOT, PatternTemplate


def load_model(model_id: str):
    """Load a masked language model and its tokenizer by name or path."""
    from transformers import AutoModelForMaskedLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModelForMaskedLM.from_pretrained(model_id)
    return model, tokenizer


def _length_budget(model, tokenizer) -> int:
    budget = getattr(model.config, "max_position_embeddings", 0)
    if budget and budget > 0:
        return int(budget)
    limit = getattr(tokenizer, "model_max_length", 0)
    if limit and 0 < limit < 1_000_000:
        return int(limit)
    raise ValueError("cannot determine the model's length budget")


def _encode(tokenizer, text: str) -> list[int]:
    return list(tokenizer(text, add_special_tokens=False)["input_ids"])


def build_input_ids(tokenizer, template: PatternTemplate,
                    text: str, text_b: str | None,
                    budget: int) -> tuple[list[int], int]:
    """Token ids for one instantiated cloze, plus the mask position.

    The cloze is a single sequence: no classifier or separator tokens are
    added. When the result exceeds the budget, the longer input field is
    truncated from the head; the template's own tokens are never dropped.
    """
    if template.uses_text_b and text_b is None:
        raise ValueError("template has a {text_b} slot but no second text given")
    if tokenizer.mask_token_id is None:
        raise ValueError("tokenizer has no mask token")

    fields = {TEXT_SLOT: _encode(tokenizer, text)}
    if template.uses_text_b:
        fields[TEXT_B_SLOT] = _encode(tokenizer, text_b)

    pieces: list[tuple[str, list[int]]] = []
    for seg in template.segments():
        if seg == MASK_SLOT:
            pieces.append(("mask", [tokenizer.mask_token_id]))
        elif seg in fields:
            pieces.append((seg, fields[seg]))
        else:
            pieces.append(("literal", _encode(tokenizer, seg)))

    overflow = sum(len(ids) for _, ids in pieces) - budget
    while overflow > 0:
        slots = [(kind, ids) for kind, ids in pieces
                 if kind in fields and ids]
        if not slots:
            raise ValueError("cloze exceeds the length budget even with "
                             "the input text fully truncated")
        kind, ids = max(slots, key=lambda p: len(p[1]))
        drop = min(overflow, len(ids))
        del ids[:drop]
        overflow -= drop

    input_ids: list[int] = []
    mask_pos = -1
    for kind, ids in pieces:
        if kind == "mask":
            mask_pos = len(input_ids)
        input_ids.extend(ids)
    return input_ids, mask_pos


def export_logits(model, tokenizer, template: PatternTemplate,
                  examples: Sequence[str | tuple[str, str]]) -> np.ndarray:
    """Raw pre-softmax masked-position scores, one float32 row per example.

    Scores are exported unnormalized; all softmax arithmetic belongs to the
    consumer. Examples run one at a time in eval mode, so the output is
    deterministic and free of padding effects.
    """
    if not examples:
        raise ValueError("no examples to export")
    budget = _length_budget(model, tokenizer)
    model.eval()
    rows = []
    with torch.no_grad():
        for example in examples:
            if isinstance(example, tuple):
                text, text_b = example
            else:
                text, text_b = example, None
            input_ids, mask_pos = build_input_ids(
                tokenizer, template, text, text_b, budget)
            batch = torch.tensor([input_ids], dtype=torch.long)
            logits = model(input_ids=batch).logits[0, mask_pos]
            rows.append(logits.to(torch.float32).cpu().numpy())
    return np.stack(rows)


def word_initial_flags(tokenizer) -> list[bool]:
    """Per-token word-boundary flags from the tokenizer's surface convention.

    Handles the three common schemes: a continuation prefix (``##``), a
    leading-space marker (``Ġ``), and the sentencepiece word marker
    (``▁``).
    """
    surfaces = tokenizer.convert_ids_to_tokens(list(range(len(tokenizer))))
    if any(s.startswith("Ġ") for s in surfaces):
        return [s.startswith("Ġ") for s in surfaces]
    if any(s.startswith("▁") for s in surfaces):
        return [s.startswith("▁") for s in surfaces]
    return [not s.startswith("##") for s in surfaces]


def export_vocab(tokenizer, corpus: Iterable[str]) -> list[tuple[str, int, bool]]:
    """(surface, frequency, word_initial) in dense token-id order.

    Frequencies count occurrences over the tokenized corpus lines; tokens
    that never occur are still listed with frequency 0.
    """
    counts: Counter[int] = Counter()
    for line in corpus:
        counts.update(_encode(tokenizer, line))
    surfaces = tokenizer.convert_ids_to_tokens(list(range(len(tokenizer))))
    flags = word_initial_flags(tokenizer)
    return [(surfaces[tid], counts.get(tid, 0), flags[tid])
            for tid in range(len(tokenizer))]
