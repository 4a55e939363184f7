"""Synthetic process-sentence corpora and embedding tables for tests and experiments.

Sentences alternate filler tokens (label ``O``) with typed entities drawn from
per-type vocabularies; every sentence carries at least one ``PP`` predicate.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, LabeledSentence
from .embeddings import EmbeddingTable

ENTITY_TYPES = (
    "PP", "MAT", "DESC", "CND", "NUM", "UNIT", "APP", "PROP", "AMT", "TIME",
    "TEMP", "PRES", "SPEED", "SHAPE", "META", "REF", "CHAR", "PHASE", "SOLV", "ATM", "CAT",
)
FILLERS = (
    "the", "a", "was", "were", "to", "in", "of", "with", "and", "for", "at",
    "then", "under", "into", "by", "after", "using", "from", "on", "until",
)


def _vocab(entity_type: str, size: int) -> list[str]:
    return [f"{entity_type.lower()}{i}" for i in range(size)]


def synthetic_corpus(n: int, seed: int = 0, n_types: int = 21, vocab_per_type: int = 25,
                     min_segments: int = 5, max_segments: int = 12) -> Corpus:
    if not 1 <= n_types <= len(ENTITY_TYPES):
        raise ValueError(f"n_types must be in [1, {len(ENTITY_TYPES)}]")
    rng = np.random.default_rng(seed)
    types = ENTITY_TYPES[:n_types]
    vocab = {t: _vocab(t, vocab_per_type) for t in types}
    sentences = []
    for sid in range(n):
        tokens: list[str] = []
        labels: list[str] = []
        n_seg = int(rng.integers(min_segments, max_segments + 1))
        pp_at = int(rng.integers(n_seg))
        for seg in range(n_seg):
            if seg != pp_at and rng.random() < 0.45:
                tokens.append(FILLERS[int(rng.integers(len(FILLERS)))])
                labels.append("O")
                continue
            typ = "PP" if seg == pp_at else types[int(rng.integers(len(types)))]
            width = 1 if typ == "PP" else int(rng.integers(1, 4))
            for _ in range(width):
                tokens.append(vocab[typ][int(rng.integers(vocab_per_type))])
                labels.append(typ)
        sentences.append(LabeledSentence(str(sid), tuple(tokens), tuple(labels)))
    return Corpus(tuple(sentences), frozenset(types))


def synthetic_embeddings(corpus: Corpus, vocab_size: int = 0, dim: int = 50, seed: int = 0,
                         oov_rate: float = 0.0) -> EmbeddingTable:
    """Gaussian vectors for the corpus vocabulary, padded with filler words to ``vocab_size``.

    A fraction ``oov_rate`` of corpus word types is left out to exercise OOV paths.
    """
    rng = np.random.default_rng(seed)
    words = sorted({t.lower() for s in corpus for t in s.tokens})
    if oov_rate > 0:
        words = [w for w in words if rng.random() >= oov_rate]
    pad = max(0, vocab_size - len(words))
    words = words + [f"pad{i}" for i in range(pad)]
    if not words:
        words = ["pad0"]
    vectors = rng.standard_normal((len(words), dim))
    return EmbeddingTable(words, vectors)
