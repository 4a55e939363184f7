"""Independent oracles and invariant checks used across the test suite."""

import itertools
from itertools import groupby

import numpy as np

OUTSIDE = "O"


def brute_force_transport(a, b, C):
    """Minimum of the transportation LP by enumerating every basic feasible solution.

    A basis is any set of m+n-1 cells whose constraint columns have full rank
    (a spanning tree of the bipartite row/column graph); its flows are the
    unique solution of the marginal equations restricted to those cells.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    C = np.asarray(C, float)
    m, n = C.shape
    cells = [(i, j) for i in range(m) for j in range(n)]
    rhs = np.concatenate([a, b])
    best = np.inf
    for basis in itertools.combinations(cells, m + n - 1):
        A = np.zeros((m + n, m + n - 1))
        for k, (i, j) in enumerate(basis):
            A[i, k] = 1.0
            A[m + j, k] = 1.0
        if np.linalg.matrix_rank(A) < m + n - 1:
            continue
        x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if np.abs(A @ x - rhs).max() > 1e-10 or x.min() < -1e-12:
            continue
        best = min(best, sum(x[k] * C[i, j] for k, (i, j) in enumerate(basis)))
    return best


def runs(labels):
    """(label, start, end) for each maximal run of equal labels, ``O`` split per token."""
    out = []
    pos = 0
    for lab, grp in groupby(labels):
        width = len(list(grp))
        if lab == OUTSIDE:
            out.extend((lab, pos + t, pos + t + 1) for t in range(width))
        else:
            out.append((lab, pos, pos + width))
        pos += width
    return out


def check_augmentation(aug, corpus, pattern_labels, k=None):
    """Spec invariants for one augmented sentence; returns a list of violation strings."""
    by_id = {s.id: s for s in corpus}
    out = aug.sentence
    problems = []
    inp = by_id.get(aug.input_id)
    if inp is None:
        return [f"{out.id}: unknown input id {aug.input_id}"]
    if aug.source_id is not None:
        if aug.source_id == aug.input_id:
            problems.append(f"{out.id}: source is the input itself")
        base = by_id.get(aug.source_id)
        if base is None:
            return problems + [f"{out.id}: unknown source id {aug.source_id}"]
    else:
        base = inp

    base_runs = runs(base.labels)
    out_runs = runs(out.labels)
    if [r[0] for r in base_runs] != [r[0] for r in out_runs]:
        problems.append(f"{out.id}: collapsed label structure differs from pattern sentence")
        return problems

    inp_surfaces = {(lab, tuple(inp.tokens[s:e])) for lab, s, e in runs(inp.labels) if lab != OUTSIDE}
    pool = {(lab, tuple(sent.tokens[s:e])) for sent in corpus for lab, s, e in runs(sent.labels)
            if lab != OUTSIDE}
    for (lab, bs, be), (_, os_, oe) in zip(base_runs, out_runs):
        base_tok = tuple(base.tokens[bs:be])
        out_tok = tuple(out.tokens[os_:oe])
        if lab == OUTSIDE or lab in pattern_labels:
            if base_tok != out_tok:
                problems.append(f"{out.id}: pattern token(s) {base_tok} changed to {out_tok}")
            continue
        if out_tok == base_tok:
            continue
        if aug.source_id is not None:
            if (lab, out_tok) not in inp_surfaces:
                problems.append(f"{out.id}: {lab} surface {out_tok} not from input")
        elif (lab, out_tok) not in pool:
            problems.append(f"{out.id}: {lab} surface {out_tok} not a corpus entity of that type")
    return problems
