import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procaug.corpus import LabeledSentence
from procaug.embeddings import EmbeddingTable, OOVPolicy
from procaug.wmd import (
    DimensionMismatch,
    InfeasibleShape,
    NBowDistribution,
    cost_matrix,
    nbow,
    solve_transport,
    wmd_distance,
    word_movers,
)

from helpers import brute_force_transport


def sent(*tokens):
    return LabeledSentence("s", tokens, ("O",) * len(tokens))


def test_nbow_counts(tiny_table):
    d = nbow(tiny_table, sent("a", "a", "b"))
    assert d.words == ("a", "b")
    assert d.weights.tolist() == pytest.approx([2 / 3, 1 / 3], abs=1e-15)
    assert nbow(tiny_table, sent("a")).weights.tolist() == [1.0]
    assert nbow(tiny_table, sent("zzz", "qqq")) is None


def test_nbow_case_folds_and_skips_oov(tiny_table):
    d = nbow(tiny_table, sent("A", "a", "zzz"))
    assert d.words == ("a",)
    assert d.weights.tolist() == [1.0]


def test_nbow_zero_policy_keeps_oov(tiny_table):
    d = nbow(tiny_table, sent("a", "zzz"), OOVPolicy.ZERO)
    assert d.words == ("a", "zzz")
    assert d.vectors[1].tolist() == [0.0, 0.0]


def test_cost_matrix_examples(tiny_table):
    a = nbow(tiny_table, sent("a"))
    b = nbow(tiny_table, sent("b"))
    assert cost_matrix(a, a).tolist() == [[0.0]]
    assert cost_matrix(a, b)[0, 0] == pytest.approx(math.sqrt(2), abs=1e-15)


def test_cost_matrix_dimension_mismatch():
    a = NBowDistribution(("x",), np.zeros((1, 2)), np.ones(1))
    b = NBowDistribution(("y",), np.zeros((1, 3)), np.ones(1))
    with pytest.raises(DimensionMismatch):
        cost_matrix(a, b)


def test_cost_matrix_nonnegative():
    rng = np.random.default_rng(3)
    for _ in range(20):
        va, vb = rng.normal(size=(4, 5)), rng.normal(size=(3, 5))
        C = cost_matrix(NBowDistribution(tuple("abcd"), va, np.full(4, 0.25)),
                        NBowDistribution(tuple("xyz"), vb, np.full(3, 1 / 3)))
        assert (C >= 0).all()


def test_forced_plans():
    r = solve_transport([1.0], [1.0], [[2.5]])
    assert r.plan.tolist() == [[1.0]]
    assert r.objective == 2.5
    r = solve_transport([1.0], [0.5, 0.5], [[1.0, 3.0]])
    assert r.plan.tolist() == [[0.5, 0.5]]
    assert r.objective == pytest.approx(0.5 * 1.0 + 0.5 * 3.0, abs=1e-15)


@pytest.mark.parametrize("a,b,C", [
    ([1.0], [1.0], [[1.0, 2.0]]),
    ([0.5, 0.5], [1.0], [[1.0, 2.0]]),
    ([0.5, 0.6], [1.0], [[1.0], [2.0]]),
    ([1.5, -0.5], [1.0], [[1.0], [2.0]]),
    ([], [], np.zeros((0, 0))),
])
def test_infeasible_shape(a, b, C):
    with pytest.raises(InfeasibleShape):
        solve_transport(a, b, C)


def test_known_assignment():
    # uniform marginals: optimum sits on a permutation (Birkhoff); best is 0->1, 1->0, 2->2
    C = np.array([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])
    w = np.full(3, 1 / 3)
    r = solve_transport(w, w, C)
    assert r.objective == pytest.approx(5 / 3, abs=1e-12)


def test_degenerate_problems_terminate():
    # equal costs and equal splits produce many zero-flow basic cells
    for n in (2, 5, 9):
        w = np.full(n, 1 / n)
        r = solve_transport(w, w, np.ones((n, n)))
        assert r.objective == pytest.approx(1.0, abs=1e-12)
        r = solve_transport(w, w, 1 - np.eye(n))
        assert r.objective == pytest.approx(0.0, abs=1e-12)


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(11)
    for _ in range(60):
        m, n = rng.integers(1, 4, size=2)
        a = rng.random(m) + 0.05
        b = rng.random(n) + 0.05
        a /= a.sum()
        b /= b.sum()
        C = rng.random((m, n)) * 3
        r = solve_transport(a, b, C)
        assert r.objective == pytest.approx(brute_force_transport(a, b, C), abs=1e-9)


def test_wmd_examples(tiny_table):
    assert wmd_distance(tiny_table, sent("a", "b"), sent("a", "b")).value == pytest.approx(0, abs=1e-12)
    assert wmd_distance(tiny_table, sent("a"), sent("b")).value == pytest.approx(math.sqrt(2), abs=1e-12)
    assert wmd_distance(tiny_table, sent("a"), sent("a", "b")).value == pytest.approx(
        math.sqrt(2) / 2, abs=1e-12)
    assert not wmd_distance(tiny_table, sent("a"), sent("zzz")).comparable


def test_wmd_accepts_token_lists(tiny_table):
    assert wmd_distance(tiny_table, ["a"], ["b"]).value == pytest.approx(math.sqrt(2), abs=1e-12)


VOCAB = [f"w{i}" for i in range(8)]


@st.composite
def table_and_sentences(draw, count=3):
    dim = draw(st.integers(1, 4))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    table = EmbeddingTable(VOCAB, rng.normal(size=(len(VOCAB), dim)))
    sents = [sent(*draw(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=7)))
             for _ in range(count)]
    return table, sents


@settings(max_examples=150, deadline=None)
@given(table_and_sentences())
def test_wmd_metric_properties(ts):
    table, (a, b, c) = ts
    dab = wmd_distance(table, a, b).value
    assert dab == pytest.approx(wmd_distance(table, b, a).value, abs=1e-9)
    assert wmd_distance(table, a, a).value == pytest.approx(0.0, abs=1e-9)
    assert wmd_distance(table, a, c).value <= dab + wmd_distance(table, b, c).value + 1e-9


@settings(max_examples=150, deadline=None)
@given(table_and_sentences(count=2))
def test_plan_marginals(ts):
    table, (a, b) = ts
    res = word_movers(table, a, b)
    assert (res.plan >= 0).all()
    assert np.abs(res.plan.sum(axis=1) - res.source.weights).max() <= 1e-9
    assert np.abs(res.plan.sum(axis=0) - res.target.weights).max() <= 1e-9
    assert res.distance == pytest.approx(float((res.plan * cost_matrix(res.source, res.target)).sum()),
                                         abs=1e-12)
