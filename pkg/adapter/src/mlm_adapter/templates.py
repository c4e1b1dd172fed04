"""Cloze templates: a text slot (or two) plus exactly one mask slot."""

from __future__ import annotations

import re
from dataclasses import dataclass

_SLOT = re.compile(r"\{text_b\}|\{text\}|\{mask\}")

TEXT_SLOT = "{text}"
TEXT_B_SLOT = "{text_b}"
MASK_SLOT = "{mask}"


@dataclass(frozen=True)
class PatternTemplate:
    """A cloze pattern such as ``"{mask} Question: {text}"``.

    The template must contain exactly one ``{mask}`` slot and at least one
    ``{text}`` slot; sentence-pair tasks may add ``{text_b}``.
    """

    pattern_id: str
    template: str

    def __post_init__(self) -> None:
        if not self.pattern_id:
            raise ValueError("empty pattern_id")
        slots = _SLOT.findall(self.template)
        if slots.count(MASK_SLOT) != 1:
            raise ValueError(
                f"template must contain exactly one mask slot, "
                f"found {slots.count(MASK_SLOT)}")
        if TEXT_SLOT not in slots:
            raise ValueError("template must contain a {text} slot")
        if slots.count(TEXT_SLOT) > 1 or slots.count(TEXT_B_SLOT) > 1:
            raise ValueError("each text slot may appear at most once")

    @property
    def uses_text_b(self) -> bool:
        return TEXT_B_SLOT in self.template

    def segments(self) -> list[str]:
        """Template split into literal runs and slot markers, in order.

        Slot markers are returned verbatim (``{text}``, ``{text_b}``,
        ``{mask}``); everything else is literal text. Empty literals are
        dropped.
        """
        out = []
        pos = 0
        for m in _SLOT.finditer(self.template):
            if m.start() > pos:
                out.append(self.template[pos:m.start()])
            out.append(m.group())
            pos = m.end()
        if pos < len(self.template):
            out.append(self.template[pos:])
        return [s for s in out if s]
