"""``procaug`` command line: augment, stats, wmd, sample-fraction.

Exit codes: 0 success, 1 data or IO error, 2 usage error.  Set
``PROCAUG_LOG=error|info|debug`` to control diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import Counter

from .augment import (
    AugmentationConfig,
    AugmentationError,
    Strategy,
    augment_corpus,
    sample_fraction,
)
from .corpus import Corpus, CorpusError, extract_entity_spans, read_corpus, write_corpus
from .embeddings import EmbeddingError, OOVPolicy, read_embeddings
from .wmd import word_movers

log = logging.getLogger("procaug")

DEFAULT_PREFILTER = 50


class DataError(Exception):
    pass


def _configure_logging():
    level = os.environ.get("PROCAUG_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _format(path, fmt) -> str:
    if fmt:
        return fmt
    return "jsonl" if str(path).endswith((".jsonl", ".json")) else "conll"


def _load_corpus(path, fmt) -> Corpus:
    fmt = _format(path, fmt)
    try:
        return read_corpus(path, fmt)
    except (OSError, CorpusError) as e:
        raise DataError(f"cannot read corpus {path}: {e}") from e


def _load_table(path):
    try:
        return read_embeddings(path)
    except (OSError, UnicodeDecodeError, EmbeddingError) as e:
        raise DataError(f"cannot read embeddings {path}: {e}") from e


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from e


def run_augment(args, parser) -> int:
    strategy = Strategy(args.strategy)
    if strategy.needs_embeddings and not args.embeddings:
        parser.error(f"--embeddings is required for --strategy {strategy.value}")
    if args.k < 1:
        parser.error("--k must be >= 1")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    prefilter = args.prefilter_top if args.prefilter_top is not None else max(DEFAULT_PREFILTER, args.k)
    labels = frozenset(x.strip() for x in args.pattern_labels.split(",") if x.strip())
    try:
        cfg = AugmentationConfig(strategy=strategy, k=args.k, seed=args.seed,
                                 prefilter_top_m=prefilter, pattern_labels=labels,
                                 oov_policy=OOVPolicy(args.oov), dedupe=not args.no_dedupe)
    except ValueError as e:
        parser.error(str(e))

    corpus = _load_corpus(args.input, args.format)
    table = _load_table(args.embeddings) if args.embeddings else None
    try:
        augmented = augment_corpus(corpus, cfg, table, jobs=args.jobs)
    except AugmentationError as e:
        raise DataError(str(e)) from e
    out = [a.sentence for a in augmented]
    if args.include_original:
        out = list(corpus.sentences) + out
    _write(args.output, write_corpus(out, _format(args.input, args.format)))
    print(f"inputs={len(corpus)} augmented={len(augmented)} strategy={strategy.value} k={args.k}")
    return 0


def run_stats(args, parser) -> int:
    corpus = _load_corpus(args.input, args.format)
    labels = Counter(lab for s in corpus for lab in s.labels)
    spans = Counter(sp.entity_type for s in corpus for sp in extract_entity_spans(s))
    print(f"sentences={len(corpus)} tokens={sum(len(s) for s in corpus)}")
    for lab in sorted(labels):
        print(f"label={lab} count={labels[lab]}")
    for typ in sorted(spans):
        print(f"span_type={typ} spans={spans[typ]}")
    return 0


def run_wmd(args, parser) -> int:
    table = _load_table(args.embeddings)
    a, b = args.a.split(), args.b.split()
    if not a or not b:
        parser.error("--a and --b need at least one token")
    res = word_movers(table, a, b, OOVPolicy(args.oov))
    if res is None:
        raise DataError("a sentence has no in-vocabulary token")
    print(f"{res.distance:.9f}")
    if args.plan:
        print("rows " + " ".join(res.source.words))
        print("cols " + " ".join(res.target.words))
        for row in res.plan:
            print(" ".join(repr(float(x)) for x in row))
    return 0


def run_sample_fraction(args, parser) -> int:
    if not 0 < args.fraction <= 1:
        parser.error(f"--fraction must be in (0, 1], got {args.fraction}")
    corpus = _load_corpus(args.input, args.format)
    sample = sample_fraction(corpus, args.fraction, args.seed)
    _write(args.output, write_corpus(sample, _format(args.input, args.format)))
    print(f"inputs={len(corpus)} sampled={len(sample)} fraction={args.fraction} seed={args.seed}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="procaug", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("conll", "jsonl"), default=None,
                       help="corpus format (default: from file extension, else conll)")

    p = sub.add_parser("augment", help="generate augmented sentences")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--embeddings")
    add_format(p)
    p.add_argument("--pattern-labels", default="PP", help="comma-separated predicate labels")
    p.add_argument("--prefilter-top", type=int, default=None,
                   help=f"label-overlap shortlist size for psim/psim-a (default max({DEFAULT_PREFILTER}, k))")
    p.add_argument("--oov", choices=[o.value for o in OOVPolicy], default="skip")
    p.add_argument("--no-dedupe", action="store_true")
    p.add_argument("--include-original", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=run_augment, parser=p)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--input", required=True)
    add_format(p)
    p.set_defaults(func=run_stats, parser=p)

    p = sub.add_parser("wmd", help="word mover's distance between two token strings")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--plan", action="store_true")
    p.add_argument("--oov", choices=[o.value for o in OOVPolicy], default="skip")
    p.set_defaults(func=run_wmd, parser=p)

    p = sub.add_parser("sample-fraction", help="seeded training-set fraction")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    add_format(p)
    p.set_defaults(func=run_sample_fraction, parser=p)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, args.parser)
    except DataError as e:
        print(f"procaug {args.command}: {e}", file=sys.stderr)
        return 1
