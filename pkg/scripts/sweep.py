"""Fraction x k x strategy sweep: sample training subsets and write augmented files.

For each fraction (10%..100% by default) a subset is drawn with ``sample_fraction``;
each strategy and k then writes ``<out>/f<pct>/<strategy>-k<k>.<fmt>`` with the
subset followed by its augmentations.  A tab-separated summary goes to
``<out>/summary.tsv``.  Training a tagger on the outputs is left to the caller.

    python3 scripts/sweep.py --input data/train.conll --embeddings data/vectors.txt --out runs/
"""

import argparse
import csv
import time
from pathlib import Path

from procaug.augment import AugmentationConfig, CorpusIndex, Strategy, augment_corpus, sample_fraction
from procaug.corpus import Corpus, read_corpus, save_corpus
from procaug.embeddings import OOVPolicy, read_embeddings


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--embeddings", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--ks", default="5,8,16")
    p.add_argument("--strategies", default=",".join(s.value for s in Strategy))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()

    corpus = read_corpus(args.input)
    fmt = "jsonl" if args.input.suffix == ".jsonl" else "conll"
    strategies = [Strategy(s) for s in args.strategies.split(",")]
    table = read_embeddings(args.embeddings) if args.embeddings else None
    if table is None and any(s.needs_embeddings for s in strategies):
        p.error("--embeddings is required for the selected strategies")

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "summary.tsv", "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t")
        w.writerow(["fraction", "strategy", "k", "inputs", "augmented", "seconds"])
        for frac in args.fractions.split(","):
            subset = sample_fraction(corpus, float(frac), args.seed)
            fdir = args.out / f"f{round(float(frac) * 100):03d}"
            fdir.mkdir(exist_ok=True)
            # one index per subset so WMD distances are reused across k
            index = CorpusIndex(subset, table, OOVPolicy.SKIP) if args.jobs == 1 else None
            for strategy in strategies:
                for k in map(int, args.ks.split(",")):
                    cfg = AugmentationConfig(strategy=strategy, k=k, seed=args.seed)
                    t0 = time.perf_counter()
                    out = augment_corpus(subset, cfg, table, jobs=args.jobs, index=index)
                    dt = time.perf_counter() - t0
                    merged = Corpus(subset.sentences + tuple(a.sentence for a in out))
                    save_corpus(merged, fdir / f"{strategy.value}-k{k}.{fmt}", fmt)
                    w.writerow([frac, strategy.value, k, len(subset), len(out), f"{dt:.2f}"])
                    fh.flush()
                    print(f"fraction={frac} strategy={strategy.value} k={k} augmented={len(out)} s={dt:.1f}")


if __name__ == "__main__":
    main()
