"""Exact Word Mover's Distance.

Sentences become normalized bag-of-words distributions over embedded word
types; the distance is the optimum of the transportation problem between the
two distributions under Euclidean ground cost.  The transportation problem is
solved with the primal transportation simplex (u-v / MODI method) started from
a least-cost-cell basis, using Bland's rule so degenerate pivots cannot cycle.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import LabeledSentence
from .embeddings import EmbeddingTable, OOVPolicy
from .similarity import SimilarityScore

TOL = 1e-9


class InfeasibleShape(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class NBowDistribution:
    words: tuple[str, ...]
    vectors: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class TransportResult:
    plan: np.ndarray
    objective: float
    iterations: int


def _tokens(sentence) -> list[str]:
    if isinstance(sentence, LabeledSentence):
        return list(sentence.tokens)
    return list(sentence)


def nbow(table: EmbeddingTable, sentence, policy: OOVPolicy = OOVPolicy.SKIP) -> NBowDistribution | None:
    """Normalized bag of words; word types keyed by their lowercased form, first-seen order."""
    counts: Counter = Counter()
    vecs: dict[str, np.ndarray] = {}
    for tok in _tokens(sentence):
        key = tok.lower()
        if key not in vecs:
            v = table.lookup(tok, policy)
            if v is None:
                continue
            vecs[key] = v
        counts[key] += 1
    if not counts:
        return None
    words = tuple(vecs)
    total = sum(counts.values())
    weights = np.array([counts[w] / total for w in words])
    return NBowDistribution(words, np.array([vecs[w] for w in words]), weights)


def cost_matrix(da: NBowDistribution, db: NBowDistribution) -> np.ndarray:
    if da.vectors.shape[1] != db.vectors.shape[1]:
        raise DimensionMismatch(
            f"vector dimensions differ: {da.vectors.shape[1]} vs {db.vectors.shape[1]}")
    diff = da.vectors[:, None, :] - db.vectors[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _least_cost_start(a, b, C):
    """Initial basis from the matrix-minimum rule.

    Every allocation retires exactly one row or column (both only at the very
    end), so the m + n - 1 allocated cells always form a spanning tree, even
    when some of them carry zero flow.
    """
    m, n = len(a), len(b)
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    row_live = [True] * m
    col_live = [True] * n
    rows_left, cols_left = m, n
    flow = {}
    for cell in np.argsort(C, axis=None, kind="stable"):
        i, j = divmod(int(cell), n)
        if not (row_live[i] and col_live[j]):
            continue
        x = min(a[i], b[j])
        flow[i, j] = x
        a[i] -= x
        b[j] -= x
        if rows_left == 1 and cols_left == 1:
            break
        if (a[i] <= b[j] and rows_left > 1) or cols_left == 1:
            row_live[i] = False
            rows_left -= 1
        else:
            col_live[j] = False
            cols_left -= 1
    return flow


def _potentials(C, flow, m, n):
    row_adj = [[] for _ in range(m)]
    col_adj = [[] for _ in range(n)]
    for i, j in flow:
        row_adj[i].append(j)
        col_adj[j].append(i)
    u = [None] * m
    v = [None] * n
    u[0] = 0.0
    stack = [0]
    # row nodes are >= 0, column nodes are encoded as ~j
    while stack:
        k = stack.pop()
        if k >= 0:
            for j in row_adj[k]:
                if v[j] is None:
                    v[j] = C[k][j] - u[k]
                    stack.append(~j)
        else:
            jj = ~k
            for i in col_adj[jj]:
                if u[i] is None:
                    u[i] = C[i][jj] - v[jj]
                    stack.append(i)
    return u, v, row_adj, col_adj


def _cycle(row_adj, col_adj, p, q):
    """Basis cells on the tree path from row ``p`` to column ``q``, starting at row ``p``."""
    parent = {p: None}
    stack = [p]
    target = ~q
    while stack:
        node = stack.pop()
        if node == target:
            break
        nbrs = [~j for j in row_adj[node]] if node >= 0 else col_adj[~node]
        for nb in nbrs:
            if nb not in parent:
                parent[nb] = node
                stack.append(nb)
    path = []
    node = target
    while parent[node] is not None:
        prev = parent[node]
        path.append((prev, ~node) if prev >= 0 else (node, ~prev))
        node = prev
    path.reverse()
    return path


def solve_transport(weights_a, weights_b, C, max_iter: int = 1_000_000) -> TransportResult:
    """Minimum-cost plan coupling ``weights_a`` (rows) and ``weights_b`` (columns).

    Entering cells follow Dantzig's most-negative rule; after a long streak of
    degenerate pivots the solver switches to Bland's rule, which cannot cycle.
    """
    a = np.asarray(weights_a, dtype=np.float64)
    b = np.asarray(weights_b, dtype=np.float64)
    Carr = np.asarray(C, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or Carr.shape != (len(a), len(b)) or len(a) == 0 or len(b) == 0:
        raise InfeasibleShape(f"cost shape {Carr.shape} does not match weights {a.shape}, {b.shape}")
    if (a < 0).any() or (b < 0).any():
        raise InfeasibleShape("weights must be nonnegative")
    if abs(a.sum() - b.sum()) > TOL:
        raise InfeasibleShape(f"total mass differs: {a.sum()} vs {b.sum()}")
    m, n = len(a), len(b)
    Cl = Carr.tolist()

    flow = _least_cost_start(a, b, Carr)
    tol = 1e-12 * max(1.0, float(np.abs(Carr).max()))
    bland = False
    degenerate_streak = 0

    it = 0
    while True:
        u, v, row_adj, col_adj = _potentials(Cl, flow, m, n)
        reduced = Carr - np.array(u)[:, None] - np.array(v)[None, :]
        for cell in flow:
            reduced[cell] = 0.0
        flat = reduced.ravel()
        if bland:
            cand = np.flatnonzero(flat < -tol)
            if cand.size == 0:
                break
            enter = int(cand[0])
        else:
            enter = int(np.argmin(flat))
            if flat[enter] >= -tol:
                break
        it += 1
        if it > max_iter:
            raise RuntimeError("transportation simplex did not converge")
        p, q = divmod(enter, n)
        path = _cycle(row_adj, col_adj, p, q)
        minus = path[0::2]
        theta = min(flow[c] for c in minus)
        leaving = min(c for c in minus if flow[c] == theta)
        for c in minus:
            flow[c] -= theta
        for c in path[1::2]:
            flow[c] += theta
        del flow[leaving]
        flow[p, q] = theta
        if theta == 0.0:
            degenerate_streak += 1
            if degenerate_streak > m * n:
                bland = True
        else:
            degenerate_streak = 0

    plan = np.zeros((m, n))
    for cell, x in flow.items():
        plan[cell] = max(x, 0.0)
    return TransportResult(plan, float(np.sum(plan * Carr)), it)


@dataclass(frozen=True)
class WMDResult:
    distance: float
    plan: np.ndarray
    source: NBowDistribution
    target: NBowDistribution


def word_movers(table: EmbeddingTable, a, b, policy: OOVPolicy = OOVPolicy.SKIP) -> WMDResult | None:
    da = nbow(table, a, policy)
    db = nbow(table, b, policy)
    if da is None or db is None:
        return None
    res = solve_transport(da.weights, db.weights, cost_matrix(da, db))
    return WMDResult(res.objective, res.plan, da, db)


def wmd_distance(table: EmbeddingTable, a, b, policy: OOVPolicy = OOVPolicy.SKIP) -> SimilarityScore:
    """Distance as a score; smaller is more similar.  Incomparable when either side is fully OOV."""
    res = word_movers(table, a, b, policy)
    if res is None:
        return SimilarityScore.incomparable()
    return SimilarityScore(res.distance)
