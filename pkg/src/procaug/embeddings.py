"""Static word embeddings in word2vec text format."""

from __future__ import annotations

import enum
import math
from typing import Iterable

import numpy as np


class EmbeddingError(ValueError):
    pass


class DimensionMismatch(EmbeddingError):
    pass


class NumberParseError(EmbeddingError):
    pass


class EmptyTable(EmbeddingError):
    pass


class LengthMismatch(ValueError):
    pass


class OOVPolicy(str, enum.Enum):
    SKIP = "skip"
    ZERO = "zero"


class EmbeddingTable:
    """Immutable word -> vector map.  Keys are stored lowercased."""

    def __init__(self, words: Iterable[str], vectors):
        vectors = np.array(vectors, dtype=np.float64, copy=True)
        words = list(words)
        if vectors.ndim != 2 or len(words) != vectors.shape[0]:
            raise DimensionMismatch("expected one vector row per word")
        if not words:
            raise EmptyTable("embedding table has no entries")
        if vectors.shape[1] < 1:
            raise DimensionMismatch("dimension must be >= 1")
        index: dict[str, int] = {}
        keep = []
        for i, w in enumerate(words):
            key = w.lower()
            if key not in index:
                index[key] = len(keep)
                keep.append(i)
        self._vectors = vectors[keep]
        self._vectors.setflags(write=False)
        self._index = index

    @property
    def dimension(self) -> int:
        return self._vectors.shape[1]

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._index

    def words(self) -> list[str]:
        return list(self._index)

    def get(self, word: str):
        i = self._index.get(word.lower())
        return None if i is None else self._vectors[i]

    def lookup(self, word: str, policy: OOVPolicy = OOVPolicy.SKIP):
        vec = self.get(word)
        if vec is None and OOVPolicy(policy) is OOVPolicy.ZERO:
            return np.zeros(self.dimension)
        return vec

    def scaled(self, factor: float) -> "EmbeddingTable":
        return EmbeddingTable(self._index, self._vectors * factor)


def lookup(table: EmbeddingTable, word: str, policy: OOVPolicy = OOVPolicy.SKIP):
    return table.lookup(word, policy)


def _parse_floats(fields, lineno):
    try:
        vals = [float(x) for x in fields]
    except ValueError as e:
        raise NumberParseError(f"line {lineno}: {e}") from e
    if not all(math.isfinite(v) for v in vals):
        raise NumberParseError(f"line {lineno}: non-finite value")
    return vals


def load_embeddings(data: bytes | str) -> EmbeddingTable:
    """Parse word2vec text format.  The ``<count> <dim>`` header line is optional."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [ln for ln in data.splitlines() if ln.strip()]
    if not lines:
        raise EmptyTable("no embedding rows")

    dim = None
    first = lines[0].split()
    if len(first) == 2 and all(f.isdigit() for f in first):
        dim = int(first[1])
        if dim < 1:
            raise DimensionMismatch("header declares dimension < 1")
        lines = lines[1:]
        start = 2
    else:
        start = 1

    words, rows = [], []
    for lineno, line in enumerate(lines, start=start):
        fields = line.split()
        if dim is None:
            dim = len(fields) - 1
            if dim < 1:
                raise DimensionMismatch(f"line {lineno}: row has no vector values")
        if len(fields) - 1 != dim:
            raise DimensionMismatch(f"line {lineno}: {len(fields) - 1} values, expected {dim}")
        words.append(fields[0])
        rows.append(_parse_floats(fields[1:], lineno))
    if not words:
        raise EmptyTable("no embedding rows after header")
    return EmbeddingTable(words, np.asarray(rows, dtype=np.float64))


def read_embeddings(path) -> EmbeddingTable:
    with open(path, "rb") as f:
        return load_embeddings(f.read())


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise LengthMismatch(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    c = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(-1.0, c))


def mean_vector(table: EmbeddingTable, words, policy: OOVPolicy = OOVPolicy.SKIP):
    """Average vector of ``words``; ``None`` when the skip policy drops everything."""
    policy = OOVPolicy(policy)
    vecs = []
    for w in words:
        v = table.lookup(w, policy)
        if v is not None:
            vecs.append(v)
    if not vecs:
        return None
    # offset form keeps the mean of identical vectors bit-exact
    base = vecs[0]
    return base + np.sum([v - base for v in vecs], axis=0) / len(vecs)


def write_embeddings(table: EmbeddingTable) -> str:
    """word2vec text format with header; ``repr`` floats so values reload exactly."""
    lines = [f"{len(table)} {table.dimension}"]
    for w in table.words():
        lines.append(w + " " + " ".join(repr(float(x)) for x in table.get(w)))
    return "\n".join(lines) + "\n"
