"""Scores for ranking candidate source sentences against an input sentence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import EntitySpan, LabeledSentence, extract_entity_spans, label_multiset
from .embeddings import EmbeddingTable, OOVPolicy, cosine, mean_vector

DEFAULT_PATTERN_LABELS = frozenset({"PP"})


class EmptyPredicateSet(ValueError):
    pass


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    comparable: bool = True

    @classmethod
    def incomparable(cls) -> "SimilarityScore":
        return cls(0.0, False)


def label_overlap(a: LabeledSentence, b: LabeledSentence) -> float:
    """Multiset intersection size of the two label sequences over the longer length."""
    common = label_multiset(a) & label_multiset(b)
    return sum(common.values()) / max(len(a), len(b))


def predicate_set(sentence: LabeledSentence, pattern_labels=DEFAULT_PATTERN_LABELS) -> tuple[EntitySpan, ...]:
    return tuple(sp for sp in extract_entity_spans(sentence) if sp.entity_type in pattern_labels)


def sim_predicate(table: EmbeddingTable, p: EntitySpan, q: EntitySpan,
                  policy: OOVPolicy = OOVPolicy.SKIP) -> SimilarityScore:
    u = mean_vector(table, p.surface, policy)
    v = mean_vector(table, q.surface, policy)
    if u is None or v is None:
        return SimilarityScore.incomparable()
    return SimilarityScore(cosine(u, v))


def similarity_matrix(table, I: Sequence[EntitySpan], S: Sequence[EntitySpan],
                      policy: OOVPolicy = OOVPolicy.SKIP) -> list[list[SimilarityScore]]:
    if not I or not S:
        raise EmptyPredicateSet("predicate sets must be non-empty")
    return [[sim_predicate(table, p, q, policy) for q in S] for p in I]


def mean_pairwise(matrix: Sequence[Sequence[SimilarityScore]]) -> SimilarityScore:
    """Average over every (input, source) pair; incomparable pairs count as 0."""
    if not matrix or not matrix[0]:
        raise EmptyPredicateSet("predicate sets must be non-empty")
    total = 0.0
    any_comparable = False
    for row in matrix:
        for s in row:
            if s.comparable:
                total += s.value
                any_comparable = True
    if not any_comparable:
        return SimilarityScore.incomparable()
    return SimilarityScore(total / (len(matrix) * len(matrix[0])))


def mean_row_max(matrix: Sequence[Sequence[SimilarityScore]]) -> SimilarityScore:
    """Average over input predicates of the best-aligned source predicate."""
    if not matrix or not matrix[0]:
        raise EmptyPredicateSet("predicate sets must be non-empty")
    total = 0.0
    any_comparable = False
    for row in matrix:
        vals = [s.value for s in row if s.comparable]
        if vals:
            total += max(vals)
            any_comparable = True
    if not any_comparable:
        return SimilarityScore.incomparable()
    return SimilarityScore(total / len(matrix))


def psim(table, I, S, policy: OOVPolicy = OOVPolicy.SKIP) -> SimilarityScore:
    return mean_pairwise(similarity_matrix(table, I, S, policy))


def psim_a(table, I, S, policy: OOVPolicy = OOVPolicy.SKIP) -> SimilarityScore:
    return mean_row_max(similarity_matrix(table, I, S, policy))


def ssim(table: EmbeddingTable, a: LabeledSentence, b: LabeledSentence,
         policy: OOVPolicy = OOVPolicy.SKIP) -> SimilarityScore:
    u = mean_vector(table, a.tokens, policy)
    v = mean_vector(table, b.tokens, policy)
    if u is None or v is None:
        return SimilarityScore.incomparable()
    return SimilarityScore(cosine(u, v))
