"""Command-line entry point.

Exit codes: 0 success, 1 internal error, 2 usage or input error. All inputs
are read and validated before any computation starts, and output files are
written atomically, so a failing run never leaves partial output behind.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import fixtures, formats, search
from .evaluate import evaluate as evaluate_verbalizer
from .evaluate import format_report, sweep_nv
from .candidates import DEFAULT_MAX_CANDIDATES, DEFAULT_MAX_FILTERED, filter_vocab
from .formats import FormatError


class UsageError(Exception):
    """Input or invocation problem; maps to exit code 2."""


def _read_matrix(path: str) -> formats.LogitMatrix:
    try:
        with open(path, "rb") as fh:
            return formats.read_logit_matrix(fh)
    except OSError as exc:
        raise UsageError(f"cannot read matrix {path}: {exc}") from exc
    except FormatError as exc:
        raise UsageError(f"bad matrix file {path}: {exc}") from exc


def _read_labels(path: str) -> formats.LabeledExamples:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return formats.read_labels(fh)
    except OSError as exc:
        raise UsageError(f"cannot read labels {path}: {exc}") from exc
    except FormatError as exc:
        raise UsageError(f"bad labels file {path}: {exc}") from exc


def _read_vocab(path: str) -> formats.VocabTable:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return formats.read_vocab(fh)
    except OSError as exc:
        raise UsageError(f"cannot read vocabulary {path}: {exc}") from exc
    except FormatError as exc:
        raise UsageError(f"bad vocabulary file {path}: {exc}") from exc


def _read_verbalizer(path: str) -> formats.MultiVerbalizer:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return formats.read_verbalizer(fh)
    except OSError as exc:
        raise UsageError(f"cannot read verbalizer {path}: {exc}") from exc
    except FormatError as exc:
        raise UsageError(f"bad verbalizer file {path}: {exc}") from exc


def _config(args: argparse.Namespace) -> search.SearchConfig:
    try:
        return search.SearchConfig(
            n_v=args.nv,
            mode=args.mode,
            max_filtered=args.max_filtered,
            max_candidates=args.max_candidates,
            objective=args.objective,
            distinct=args.distinct,
            alpha_only=not args.no_alpha_only,
            pooled_candidates=not args.per_pattern_candidates,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nv", type=int, default=10,
                   help="verbalizations per label (default 10)")
    p.add_argument("--mode", choices=["joint", "sep"], default="joint")
    p.add_argument("--objective", choices=["lr", "ce"], default="lr")
    p.add_argument("--max-filtered", type=int, default=DEFAULT_MAX_FILTERED)
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)
    p.add_argument("--distinct", action="store_true",
                   help="greedy cross-label deduplication of tokens")
    p.add_argument("--no-alpha-only", action="store_true",
                   help="drop the purely-alphabetic clause of the word filter")
    p.add_argument("--per-pattern-candidates", action="store_true",
                   help="build candidate sets per pattern instead of pooled")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker hint; never affects output bytes")


def cmd_filter_vocab(args) -> int:
    vocab = _read_vocab(args.vocab)
    kept = filter_vocab(vocab, args.max_filtered, not args.no_alpha_only)
    if not kept:
        print("warning: no tokens pass the word filter", file=sys.stderr)

    def write(fh):
        for tid in kept:
            fh.write(f"{tid}\t{vocab[tid].surface}\n")

    if args.out:
        formats.atomic_write(args.out, write)
    else:
        write(sys.stdout)
    return 0


def cmd_search(args) -> int:
    cfg = _config(args)
    matrices = [_read_matrix(p) for p in args.matrices]
    data = _read_labels(args.labels)
    vocab = _read_vocab(args.vocab)
    try:
        result = search.find_verbalizer(matrices, data, vocab, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.mode == "sep":
        root, ext = os.path.splitext(args.out)
        for matrix, mv in zip(matrices, result):
            path = f"{root}.{matrix.pattern_id}{ext}"
            formats.atomic_write(path, lambda fh, mv=mv: formats.write_verbalizer(mv, vocab, fh))
            if args.verbose:
                print(f"wrote {path}", file=sys.stderr)
    else:
        formats.atomic_write(args.out, lambda fh: formats.write_verbalizer(result, vocab, fh))
        if args.verbose:
            print(f"wrote {args.out}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    matrices = [_read_matrix(p) for p in args.matrices]
    data = _read_labels(args.labels)
    mv = _read_verbalizer(args.verbalizer)
    try:
        report = evaluate_verbalizer(matrices, data, mv)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(format_report(report, confusion=args.confusion))
    return 0


def cmd_sweep(args) -> int:
    try:
        nv_values = [int(v) for v in args.nv_list.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --nv-list: {args.nv_list!r}") from exc
    if not nv_values:
        raise UsageError("empty --nv-list")
    cfg = _config(args)
    matrices = [_read_matrix(p) for p in args.matrices]
    data = _read_labels(args.labels)
    vocab = _read_vocab(args.vocab)
    eval_matrices = [_read_matrix(p) for p in args.eval_matrix] \
        if args.eval_matrix else None
    eval_data = _read_labels(args.eval_labels) if args.eval_labels else None
    print("# raw verbalizer classifier accuracy (no downstream finetuning)")
    try:
        rows = sweep_nv(matrices, data, vocab, cfg, nv_values,
                                eval_matrices, eval_data)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print("n_v\taccuracy")
    for n_v, acc in rows:
        print(f"{n_v}\t{acc:.6f}")
    return 0


def cmd_oracle(args) -> int:
    matrices = [_read_matrix(p) for p in args.matrices]
    data = _read_labels(args.labels)
    vocab_size = matrices[0].vocab_size
    if args.candidates_per_label:
        try:
            sets = [
                [int(t) for t in group.split(",")]
                for group in args.candidates_per_label.split(";")
            ]
        except ValueError as exc:
            raise UsageError(
                f"bad --candidates-per-label: {args.candidates_per_label!r}") from exc
    else:
        sets = [list(range(vocab_size)) for _ in range(data.num_classes)]
    try:
        best, ll = search.brute_force_mle(matrices, data, sets, cap=args.cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print("label\ttoken_id")
    for y, t in enumerate(best):
        print(f"{y}\t{t}")
    print(f"log_likelihood\t{ll:.9g}")
    return 0


def cmd_random(args) -> int:
    vocab = _read_vocab(args.vocab)
    t_f = filter_vocab(vocab, args.max_filtered, not args.no_alpha_only)
    try:
        mv = search.random_verbalizer(t_f, args.k, args.nv, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    formats.atomic_write(args.out, lambda fh: formats.write_verbalizer(mv, vocab, fh))
    return 0


def cmd_gen(args) -> int:
    planted = tuple(range(args.k)) if args.planted is None else \
        tuple(int(t) for t in args.planted.split(","))
    try:
        spec = fixtures.PlantedSpec(
            num_classes=args.k,
            examples_per_class=args.per_class,
            vocab_size=args.vocab_size,
            boost=args.boost,
            planted_tokens=planted,
            seed=args.seed,
            pattern_id=args.pattern_id,
        )
        if args.confounder is not None:
            matrix, data = fixtures.gen_global_confounder(
                spec, args.confounder, args.confounder_boost)
        else:
            matrix, data = fixtures.gen_planted(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    formats.atomic_write(args.out_matrix,
                         lambda fh: formats.write_logit_matrix(matrix, fh),
                         binary=True)
    formats.atomic_write(args.out_labels,
                         lambda fh: formats.write_labels(data, fh))
    if args.out_vocab:
        vocab = fixtures.gen_vocab(args.vocab_size)
        formats.atomic_write(args.out_vocab,
                             lambda fh: formats.write_vocab(vocab, fh))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verbsearch",
        description="Automatic label-to-token mapping search over "
                    "precomputed masked-LM score matrices.")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter-vocab", help="emit the filtered word-like vocabulary")
    p.add_argument("vocab")
    p.add_argument("--max-filtered", type=int, default=DEFAULT_MAX_FILTERED)
    p.add_argument("--no-alpha-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_filter_vocab)

    p = sub.add_parser("search", help="find a verbalizer")
    p.add_argument("matrices", nargs="+")
    p.add_argument("--labels", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    _add_search_flags(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("eval", help="score a verbalizer on labeled matrices")
    p.add_argument("matrices", nargs="+")
    p.add_argument("--labels", required=True)
    p.add_argument("--verbalizer", required=True)
    p.add_argument("--confusion", action="store_true")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("sweep", help="accuracy as a function of n_v")
    p.add_argument("matrices", nargs="+")
    p.add_argument("--labels", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--nv-list", default="1,3,5,10,25,50,100")
    p.add_argument("--eval-matrix", action="append")
    p.add_argument("--eval-labels")
    _add_search_flags(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("oracle", help="exhaustive maximum-likelihood search (tiny scale)")
    p.add_argument("matrices", nargs="+")
    p.add_argument("--labels", required=True)
    p.add_argument("--candidates-per-label",
                   help="semicolon-separated per-label comma lists of token ids")
    p.add_argument("--cap", type=int, default=search.DEFAULT_ENUMERATION_CAP)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("random", help="random-baseline verbalizer")
    p.add_argument("--vocab", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nv", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-filtered", type=int, default=DEFAULT_MAX_FILTERED)
    p.add_argument("--no-alpha-only", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_random)

    p = sub.add_parser("gen", help="generate synthetic matrix/label/vocab fixtures")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--vocab-size", type=int, required=True)
    p.add_argument("--boost", type=float, default=5.0)
    p.add_argument("--planted", help="comma list of planted token ids (default 0..k-1)")
    p.add_argument("--confounder", type=int,
                   help="token id boosted on every row")
    p.add_argument("--confounder-boost", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern-id", default="synthetic")
    p.add_argument("--out-matrix", required=True)
    p.add_argument("--out-labels", required=True)
    p.add_argument("--out-vocab")
    p.set_defaults(fn=cmd_gen)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
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
