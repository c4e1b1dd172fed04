"""Command line entry points: adapter export-logits / export-vocab."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import export, formats
from .templates import PatternTemplate


class UsageError(Exception):
    """Input or invocation problem; maps to exit code 2."""


def _load(model_id: str):
    try:
        return export.load_model(model_id)
    except Exception as exc:
        raise UsageError(f"cannot load model {model_id!r}: {exc}") from exc


def _read_lines(path: str) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return [line.rstrip("\n") for line in fh]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_export_logits(args) -> int:
    try:
        template = PatternTemplate(args.pattern_id, args.template)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    records = []
    labels = []
    for lineno, line in enumerate(_read_lines(args.input)):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise UsageError(
                f"line {lineno}: expected label<TAB>text, got {line!r}")
        try:
            labels.append(int(parts[0]))
        except ValueError as exc:
            raise UsageError(f"line {lineno}: bad label {parts[0]!r}") from exc
        records.append(parts[1] if len(parts) == 2 else (parts[1], parts[2]))
    if not records:
        raise UsageError("no input records")
    model, tokenizer = _load(args.model)
    try:
        scores = export.export_logits(model, tokenizer, template, records)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    formats.atomic_write(
        args.out,
        lambda fh: formats.write_logit_matrix(template.pattern_id, scores, fh),
        binary=True)
    if args.labels_out:
        k = args.num_classes if args.num_classes else max(labels) + 1
        try:
            formats.atomic_write(
                args.labels_out,
                lambda fh: formats.write_labels(k, labels, fh))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    print(f"wrote {scores.shape[0]} x {scores.shape[1]} matrix to {args.out}")
    return 0


def cmd_export_vocab(args) -> int:
    corpus = [line for line in _read_lines(args.input) if line]
    model, tokenizer = _load(args.model)
    del model
    rows = export.export_vocab(tokenizer, corpus)
    formats.atomic_write(args.out, lambda fh: formats.write_vocab(rows, fh))
    print(f"wrote {len(rows)} vocabulary entries to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adapter",
        description="Export masked language model logits and vocabulary "
                    "statistics to the verbalizer-search file formats.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "export-logits",
        help="run a cloze template through a model and write a matrix file")
    p.add_argument("--model", required=True, help="model name or local path")
    p.add_argument("--template", required=True,
                   help="cloze with {text}, optional {text_b}, one {mask}")
    p.add_argument("--pattern-id", default="p0")
    p.add_argument("--input", required=True,
                   help="TSV records: label<TAB>text[<TAB>text_b]")
    p.add_argument("--out", required=True, help="output matrix file")
    p.add_argument("--labels-out", default=None,
                   help="also write the aligned labels file here")
    p.add_argument("--num-classes", type=int, default=None)
    p.set_defaults(fn=cmd_export_logits)

    p = sub.add_parser(
        "export-vocab",
        help="count token frequencies over an unlabeled corpus")
    p.add_argument("--model", required=True, help="model name or local path")
    p.add_argument("--input", required=True, help="text file, one line each")
    p.add_argument("--out", required=True, help="output vocabulary file")
    p.set_defaults(fn=cmd_export_vocab)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
