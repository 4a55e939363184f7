"""Write a synthetic labeled corpus and a matching embedding table.

    python3 scripts/make_synthetic.py --out data/ --sentences 1896 --vocab 10000 --dim 100
"""

import argparse
from pathlib import Path

from procaug.corpus import save_corpus
from procaug.embeddings import write_embeddings
from procaug.synthetic import synthetic_corpus, synthetic_embeddings


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--sentences", type=int, default=200)
    p.add_argument("--types", type=int, default=21)
    p.add_argument("--vocab", type=int, default=0, help="pad table to this many words (0: corpus words only)")
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--oov-rate", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["conll", "jsonl"], default="conll")
    args = p.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    corpus = synthetic_corpus(args.sentences, seed=args.seed, n_types=args.types)
    table = synthetic_embeddings(corpus, vocab_size=args.vocab, dim=args.dim, seed=args.seed,
                                 oov_rate=args.oov_rate)
    cpath = args.out / f"train.{args.format}"
    save_corpus(corpus, cpath, args.format)
    (args.out / "vectors.txt").write_text(write_embeddings(table))
    print(f"corpus={cpath} sentences={len(corpus)} vectors={len(table)}x{table.dimension}")


if __name__ == "__main__":
    main()
