"""Writers for the verbalizer-search file formats.

Implemented against the format contracts (binary matrix layout, labels
text file, vocabulary TSV), deliberately without importing the search
package: the files are the interface between the two.
"""

from __future__ import annotations

import os
import struct
import tempfile
from typing import Callable, Iterable, Sequence

import numpy as np

MAGIC = b"PLMX"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


def write_logit_matrix(pattern_id: str, scores: np.ndarray, sink) -> None:
    """Binary matrix: header, UTF-8 pattern id, row-major float32 payload."""
    scores = np.ascontiguousarray(scores, dtype=np.float32)
    if scores.ndim != 2 or scores.shape[0] < 1 or scores.shape[1] < 1:
        raise ValueError(f"scores must be a non-empty 2-d array, "
                         f"got shape {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValueError("non-finite score")
    pid = pattern_id.encode("utf-8")
    num_examples, vocab_size = scores.shape
    sink.write(_HEADER.pack(MAGIC, VERSION, vocab_size, num_examples, len(pid)))
    sink.write(pid)
    sink.write(scores.tobytes())


def write_labels(num_classes: int, labels: Sequence[int], sink) -> None:
    if num_classes < 1:
        raise ValueError("num_classes must be positive")
    for y in labels:
        if not 0 <= y < num_classes:
            raise ValueError(f"label {y} out of range for k={num_classes}")
    sink.write(f"{num_classes}\n")
    for y in labels:
        sink.write(f"{y}\n")


def write_vocab(rows: Iterable[tuple[str, int, bool]], sink) -> None:
    """Vocabulary TSV: token_id, surface, frequency, word_initial per line.

    Rows are (surface, frequency, word_initial) in dense token-id order.
    Tabs and newlines in surfaces are escaped so the TSV stays parseable.
    """
    for tid, (surface, frequency, word_initial) in enumerate(rows):
        if frequency < 0:
            raise ValueError(f"negative frequency for token {tid}")
        safe = (surface.replace("\\", "\\\\").replace("\t", "\\t")
                .replace("\n", "\\n").replace("\r", "\\r"))
        sink.write(f"{tid}\t{safe}\t{frequency}\t{int(word_initial)}\n")


def atomic_write(path: str, write_fn: Callable, binary: bool = False) -> None:
    """Write via a temp file and rename, so errors leave no partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        mode = "wb" if binary else "w"
        with os.fdopen(fd, mode) as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
