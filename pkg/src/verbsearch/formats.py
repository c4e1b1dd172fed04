"""File formats shared between the score-matrix producers and the search engine.

Binary logit-matrix files ("PLMX"), plain-text label / vocabulary files and
the verbalizer output format. All readers validate fully before returning;
a partially valid object is never handed to the caller.
"""

from __future__ import annotations

import io
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"PLMX"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")  # magic, version, vocab_size, num_examples, pattern_id_len


class FormatError(ValueError):
    """Raised for malformed or invariant-violating files and values."""


@dataclass(frozen=True)
class LogitMatrix:
    """Dense per-pattern matrix of raw masked-position scores.

    ``scores[i, t]`` is the raw (unnormalized) score of vocabulary token ``t``
    at the masked position of example ``i``. Stored as float32; downstream
    arithmetic promotes to float64.
    """

    pattern_id: str
    scores: np.ndarray  # float32, shape (num_examples, vocab_size)

    @property
    def num_examples(self) -> int:
        return self.scores.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.scores.shape[1]

    def validate(self) -> None:
        if self.scores.ndim != 2:
            raise FormatError("scores must be a 2-d array")
        if self.scores.dtype != np.float32:
            raise FormatError("scores must be float32")
        if self.vocab_size < 1:
            raise FormatError("vocab_size must be positive")
        if not np.all(np.isfinite(self.scores)):
            raise FormatError("non-finite score")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogitMatrix):
            return NotImplemented
        return (
            self.pattern_id == other.pattern_id
            and self.scores.shape == other.scores.shape
            and np.array_equal(
                self.scores.view(np.uint32), other.scores.view(np.uint32)
            )
        )


@dataclass(frozen=True)
class LabeledExamples:
    """Labels for the rows of a logit matrix, over ``num_classes`` classes."""

    num_classes: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.num_classes < 1:
            raise FormatError("number of classes must be positive")
        for y in self.labels:
            if not 0 <= y < self.num_classes:
                raise FormatError(
                    f"label {y} out of range for k={self.num_classes}"
                )

    @property
    def num_examples(self) -> int:
        return len(self.labels)

    @property
    def label_counts(self) -> tuple[int, ...]:
        counts = [0] * self.num_classes
        for y in self.labels:
            counts[y] += 1
        return tuple(counts)

    def require_searchable(self) -> None:
        """Every class must have at least one and not all examples."""
        n = self.num_examples
        for y, c in enumerate(self.label_counts):
            if c == 0 or c == n:
                raise FormatError(f"degenerate class {y}: {c} of {n} examples")


@dataclass(frozen=True)
class VocabEntry:
    surface: str
    frequency: int
    word_initial: bool


@dataclass(frozen=True)
class VocabTable:
    """Token id -> (surface, unlabeled-corpus frequency, word-initial flag)."""

    entries: tuple[VocabEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, token_id: int) -> VocabEntry:
        return self.entries[token_id]


@dataclass(frozen=True)
class MultiVerbalizer:
    """Per-label ordered token lists with their search losses.

    ``per_label[y]`` is an ascending-by-loss list of ``(token_id, loss)``
    pairs; ties are broken by ascending token id.
    """

    per_label: tuple[tuple[tuple[int, float], ...], ...]

    def __post_init__(self):
        for y, entries in enumerate(self.per_label):
            if not entries:
                raise FormatError(f"empty verbalization list for label {y}")
            ids = [t for t, _ in entries]
            if len(set(ids)) != len(ids):
                raise FormatError(f"duplicate token in label {y} list")
            keys = [(loss, t) for t, loss in entries]
            if keys != sorted(keys):
                raise FormatError(f"label {y} list not sorted by (loss, id)")

    @property
    def num_classes(self) -> int:
        return len(self.per_label)

    def tokens(self, y: int) -> list[int]:
        return [t for t, _ in self.per_label[y]]


# ---------------------------------------------------------------------------
# logit-matrix binary format


def write_logit_matrix(matrix: LogitMatrix, sink) -> None:
    """Write the binary matrix format; validates before emitting any bytes."""
    matrix.validate()
    pid = matrix.pattern_id.encode("utf-8")
    sink.write(_HEADER.pack(MAGIC, VERSION, matrix.vocab_size,
                            matrix.num_examples, len(pid)))
    sink.write(pid)
    sink.write(np.ascontiguousarray(matrix.scores).tobytes())


def read_logit_matrix(source) -> LogitMatrix:
    header = source.read(_HEADER.size)
    if len(header) != _HEADER.size:
        raise FormatError("truncated header")
    magic, version, vocab_size, num_examples, pid_len = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FormatError("bad magic")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if vocab_size < 1:
        raise FormatError("vocab_size must be positive")
    pid_bytes = source.read(pid_len)
    if len(pid_bytes) != pid_len:
        raise FormatError("truncated pattern id")
    try:
        pattern_id = pid_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("pattern id is not valid UTF-8") from exc
    payload_len = 4 * num_examples * vocab_size
    # read what is actually there rather than preallocating payload_len
    # bytes, so absurd header counts fail cleanly instead of exhausting memory
    payload = source.read()
    if len(payload) < payload_len:
        raise FormatError("truncated payload")
    if len(payload) > payload_len:
        raise FormatError("trailing bytes after payload")
    scores = np.frombuffer(payload, dtype="<f4").reshape(num_examples, vocab_size)
    matrix = LogitMatrix(pattern_id, scores)
    matrix.validate()
    return matrix


# ---------------------------------------------------------------------------
# labels


def read_labels(source: io.TextIOBase) -> LabeledExamples:
    lines = [ln for ln in (raw.strip() for raw in source) if ln]
    if not lines:
        raise FormatError("empty labels file")
    try:
        k = int(lines[0])
    except ValueError as exc:
        raise FormatError(f"bad class count line: {lines[0]!r}") from exc
    labels = []
    for ln in lines[1:]:
        try:
            labels.append(int(ln))
        except ValueError as exc:
            raise FormatError(f"bad label line: {ln!r}") from exc
    return LabeledExamples(k, tuple(labels))


def write_labels(data: LabeledExamples, sink: io.TextIOBase) -> None:
    sink.write(f"{data.num_classes}\n")
    for y in data.labels:
        sink.write(f"{y}\n")


# ---------------------------------------------------------------------------
# vocabulary


def read_vocab(source: io.TextIOBase) -> VocabTable:
    entries = []
    for lineno, raw in enumerate(source):
        line = raw.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise FormatError(f"malformed vocab line {lineno}: {line!r}")
        tid_s, surface, freq_s, wi_s = parts
        try:
            tid, freq, wi = int(tid_s), int(freq_s), int(wi_s)
        except ValueError as exc:
            raise FormatError(f"malformed vocab line {lineno}: {line!r}") from exc
        if tid != len(entries):
            raise FormatError(f"non-dense token ids at line {lineno}")
        if freq < 0:
            raise FormatError(f"negative frequency at line {lineno}")
        if wi not in (0, 1):
            raise FormatError(f"word_initial must be 0 or 1 at line {lineno}")
        entries.append(VocabEntry(surface, freq, bool(wi)))
    return VocabTable(tuple(entries))


def write_vocab(vocab: VocabTable, sink: io.TextIOBase) -> None:
    for tid, e in enumerate(vocab.entries):
        sink.write(f"{tid}\t{e.surface}\t{e.frequency}\t{int(e.word_initial)}\n")


# ---------------------------------------------------------------------------
# verbalizers


def write_verbalizer(mv: MultiVerbalizer, vocab: VocabTable,
                     sink: io.TextIOBase) -> None:
    n_v = len(mv.per_label[0])
    sink.write(f"k={mv.num_classes}\tn_v={n_v}\n")
    for y, entries in enumerate(mv.per_label):
        for rank, (tid, loss) in enumerate(entries):
            if not math.isfinite(loss):
                raise FormatError("non-finite loss")
            surface = vocab[tid].surface
            sink.write(f"{y}\t{rank}\t{tid}\t{surface}\t{loss:.9g}\n")


def read_verbalizer(source: io.TextIOBase) -> MultiVerbalizer:
    lines = [ln for ln in (raw.rstrip("\n") for raw in source) if ln]
    if not lines:
        raise FormatError("empty verbalizer file")
    header = lines[0].split("\t")
    if len(header) != 2 or not header[0].startswith("k=") \
            or not header[1].startswith("n_v="):
        raise FormatError(f"bad verbalizer header: {lines[0]!r}")
    try:
        k = int(header[0][2:])
        n_v = int(header[1][4:])
    except ValueError as exc:
        raise FormatError(f"bad verbalizer header: {lines[0]!r}") from exc
    per_label: list[list[tuple[int, float]]] = [[] for _ in range(k)]
    for line in lines[1:]:
        parts = line.split("\t")
        if len(parts) != 5:
            raise FormatError(f"malformed verbalizer line: {line!r}")
        try:
            y, rank, tid, loss = int(parts[0]), int(parts[1]), int(parts[2]), \
                float(parts[4])
        except ValueError as exc:
            raise FormatError(f"malformed verbalizer line: {line!r}") from exc
        if not 0 <= y < k:
            raise FormatError(f"label {y} out of range for k={k}")
        if rank != len(per_label[y]):
            raise FormatError(f"out-of-order rank for label {y}")
        per_label[y].append((tid, loss))
    for y, entries in enumerate(per_label):
        if len(entries) != n_v:
            raise FormatError(f"label {y} has {len(entries)} rows, expected {n_v}")
    return MultiVerbalizer(tuple(tuple(e) for e in per_label))


# ---------------------------------------------------------------------------
# atomic file writing


def atomic_write(path: str, write_fn, binary: bool = False) -> None:
    """Write via a temp file + rename so a failure never leaves partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        mode = "wb" if binary else "w"
        with os.fdopen(fd, mode, **({} if binary else {"newline": "\n"})) as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
