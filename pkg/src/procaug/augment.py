"""Two-phase augmentation: pick source sentences, then swap in the input's entities.

Source-based strategies (LSIM, PSIM, PSIM-A, SSIM, WMD) keep the source
sentence's pattern (outside tokens and process predicates) and fill its typed
entity slots with entities from the input sentence.  The RE and RAE baselines
edit the input sentence in place instead.

Randomness (RE only, plus fraction sampling) uses numpy's PCG64 generator
seeded through ``SeedSequence((seed, sentence_ordinal))``, so output does not
depend on worker scheduling.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .corpus import Corpus, EntitySpan, LabeledSentence, extract_entity_spans
from .embeddings import EmbeddingTable, OOVPolicy, cosine, mean_vector
from .similarity import (
    DEFAULT_PATTERN_LABELS,
    SimilarityScore,
    label_overlap,
    mean_pairwise,
    mean_row_max,
    predicate_set,
    sim_predicate,
)
from .wmd import cost_matrix, nbow, solve_transport

log = logging.getLogger(__name__)


class AugmentationError(ValueError):
    pass


class EmptyCandidatePool(AugmentationError):
    pass


class NoPredicates(AugmentationError):
    pass


class MissingEmbeddings(AugmentationError):
    pass


class Strategy(str, enum.Enum):
    RE = "re"
    RAE = "rae"
    LSIM = "lsim"
    PSIM = "psim"
    PSIM_A = "psim-a"
    SSIM = "ssim"
    WMD = "wmd"

    @property
    def source_based(self) -> bool:
        return self not in (Strategy.RE, Strategy.RAE)

    @property
    def needs_embeddings(self) -> bool:
        return self not in (Strategy.RE, Strategy.LSIM)


@dataclass(frozen=True)
class AugmentationConfig:
    strategy: Strategy = Strategy.LSIM
    k: int = 5
    seed: int = 0
    prefilter_top_m: int = 50
    pattern_labels: frozenset[str] = DEFAULT_PATTERN_LABELS
    oov_policy: OOVPolicy = OOVPolicy.SKIP
    dedupe: bool = True

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "oov_policy", OOVPolicy(self.oov_policy))
        object.__setattr__(self, "pattern_labels", frozenset(self.pattern_labels))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.prefilter_top_m < self.k:
            raise ValueError(f"prefilter_top_m ({self.prefilter_top_m}) must be >= k ({self.k})")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class AugmentedSentence:
    sentence: LabeledSentence
    input_id: str
    source_id: str | None
    strategy: Strategy


def sentence_rng(seed: int, ordinal: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, ordinal))))


# Scores equal to this many decimals count as tied, so ties that are exact in
# real arithmetic do not flip on last-bit rounding (e.g. after rescaling vectors).
RANK_DECIMALS = 12


def _rank_key(value: float, descending: bool) -> float:
    return round(-value if descending else value, RANK_DECIMALS)


def _rank(scores: Sequence[tuple[SimilarityScore, int]], descending: bool) -> list[int]:
    """Positions ordered by score; ties by position, incomparable scores last."""
    return [pos for _, pos in sorted(
        scores, key=lambda sp: (not sp[0].comparable,
                                _rank_key(sp[0].value, descending) if sp[0].comparable else 0.0,
                                sp[1]))]


class CorpusIndex:
    """Per-corpus caches shared by every strategy: spans, mean vectors, WMD distances.

    Pairwise distances are always computed in (lower position, higher position)
    orientation so a value never depends on which sentence asked first.
    """

    def __init__(self, corpus: Corpus, table: EmbeddingTable | None = None,
                 policy: OOVPolicy = OOVPolicy.SKIP):
        self.corpus = corpus
        self.table = table
        self.policy = OOVPolicy(policy)
        self.positions = {s.id: i for i, s in enumerate(corpus.sentences)}
        self.spans = [extract_entity_spans(s) for s in corpus.sentences]
        self._sentence_unit = None
        self._wmd: dict[tuple[int, int], SimilarityScore] = {}
        self._nbow: dict = {}
        self._span_vec: dict[tuple[str, ...], np.ndarray | None] = {}
        self._pools: dict = {}
        self._rae: dict = {}

    def require_table(self) -> EmbeddingTable:
        if self.table is None:
            raise MissingEmbeddings("this strategy needs an embedding table")
        return self.table

    def span_vector(self, surface: tuple[str, ...]):
        if surface not in self._span_vec:
            self._span_vec[surface] = (
                None if self.table is None else mean_vector(self.table, surface, self.policy))
        return self._span_vec[surface]

    def sentence_units(self):
        """Unit-normalized mean vectors per sentence (zero rows where undefined) and a validity mask."""
        if self._sentence_unit is None:
            table = self.require_table()
            dim = table.dimension
            unit = np.zeros((len(self.corpus), dim))
            valid = np.zeros(len(self.corpus), dtype=bool)
            for i, s in enumerate(self.corpus.sentences):
                v = mean_vector(table, s.tokens, self.policy)
                if v is not None:
                    valid[i] = True
                    nv = np.linalg.norm(v)
                    if nv > 0:
                        unit[i] = v / nv
            self._sentence_unit = (unit, valid)
        return self._sentence_unit

    def nbow(self, i: int):
        if i not in self._nbow:
            self._nbow[i] = nbow(self.require_table(), self.corpus.sentences[i], self.policy)
        return self._nbow[i]

    def wmd(self, i: int, j: int) -> SimilarityScore:
        key = (i, j) if i < j else (j, i)
        if key not in self._wmd:
            da, db = self.nbow(key[0]), self.nbow(key[1])
            if da is None or db is None:
                self._wmd[key] = SimilarityScore.incomparable()
            else:
                res = solve_transport(da.weights, db.weights, cost_matrix(da, db))
                self._wmd[key] = SimilarityScore(res.objective)
        return self._wmd[key]

    def pool(self, entity_type: str, *, distinct: bool):
        """(surface, position) entries of a type across the corpus."""
        key = (entity_type, distinct)
        if key not in self._pools:
            entries = []
            seen = set()
            for pos, spans in enumerate(self.spans):
                for sp in spans:
                    if sp.entity_type != entity_type:
                        continue
                    if distinct:
                        if sp.surface in seen:
                            continue
                        seen.add(sp.surface)
                    entries.append((sp.surface, pos))
            self._pools[key] = entries
        return self._pools[key]


def _position(input: LabeledSentence, index: CorpusIndex) -> int:
    try:
        return index.positions[input.id]
    except KeyError:
        raise AugmentationError(f"input sentence {input.id!r} is not in the corpus") from None


def select_sources(input: LabeledSentence, corpus: Corpus, cfg: AugmentationConfig,
                   table: EmbeddingTable | None = None,
                   index: CorpusIndex | None = None) -> list[LabeledSentence]:
    """Up to ``cfg.k`` source sentences for ``input``, best first."""
    if not cfg.strategy.source_based:
        raise AugmentationError(f"{cfg.strategy.value} does not select source sentences")
    index = index or CorpusIndex(corpus, table, cfg.oov_policy)
    me = _position(input, index)
    candidates = [pos for pos in range(len(corpus)) if pos != me]
    if not candidates:
        raise EmptyCandidatePool(f"corpus has no sentence other than {input.id!r}")
    sents = corpus.sentences
    strategy = cfg.strategy

    if strategy is Strategy.LSIM:
        scored = [(SimilarityScore(label_overlap(input, sents[p])), p) for p in candidates]
        ranked = _rank(scored, descending=True)

    elif strategy in (Strategy.PSIM, Strategy.PSIM_A):
        table = index.require_table()
        mine = predicate_set(input, cfg.pattern_labels)
        if not mine:
            raise NoPredicates(f"sentence {input.id!r} has no {sorted(cfg.pattern_labels)} span")
        with_preds = [p for p in candidates
                      if any(sp.entity_type in cfg.pattern_labels for sp in index.spans[p])]
        overlap = [(SimilarityScore(label_overlap(input, sents[p])), p) for p in with_preds]
        shortlist = _rank(overlap, descending=True)[:cfg.prefilter_top_m]
        combine = mean_pairwise if strategy is Strategy.PSIM else mean_row_max
        scored = []
        for p in shortlist:
            theirs = [sp for sp in index.spans[p] if sp.entity_type in cfg.pattern_labels]
            matrix = [[sim_predicate(table, a, b, cfg.oov_policy) for b in theirs] for a in mine]
            scored.append((combine(matrix), p))
        ranked = _rank(scored, descending=True)

    elif strategy is Strategy.SSIM:
        unit, valid = index.sentence_units()
        if not valid[me]:
            scored = [(SimilarityScore.incomparable(), p) for p in candidates]
        else:
            sims = unit[candidates] @ unit[me]
            scored = [(SimilarityScore(min(1.0, max(-1.0, float(s)))) if valid[p]
                       else SimilarityScore.incomparable(), p)
                      for s, p in zip(sims, candidates)]
        ranked = _rank(scored, descending=True)

    elif strategy is Strategy.WMD:
        scored = [(index.wmd(me, p), p) for p in candidates]
        ranked = _rank(scored, descending=False)

    else:  # pragma: no cover
        raise AugmentationError(f"unhandled strategy {strategy}")

    return [sents[p] for p in ranked[:cfg.k]]


def _greedy_pairs(src_spans: list[EntitySpan], inp_spans: list[EntitySpan], index: CorpusIndex | None,
                  table, policy) -> dict[int, int]:
    """Map source-span slot -> input-span slot for one entity type."""
    def vec(sp):
        if index is not None:
            return index.span_vector(sp.surface)
        return None if table is None else mean_vector(table, sp.surface, policy)

    src_vecs = [vec(sp) for sp in src_spans]
    inp_vecs = [vec(sp) for sp in inp_spans]
    pairs = []
    for si, sv in enumerate(src_vecs):
        if sv is None:
            continue
        for ii, iv in enumerate(inp_vecs):
            if iv is not None:
                pairs.append((_rank_key(cosine(sv, iv), True), si, ii))
    pairs.sort()
    assign: dict[int, int] = {}
    used: set[int] = set()
    for _, si, ii in pairs:
        if si not in assign and ii not in used:
            assign[si] = ii
            used.add(ii)
    # leftovers (OOV on either side) pair up left to right
    free_inp = [ii for ii in range(len(inp_spans)) if ii not in used]
    for si in range(len(src_spans)):
        if si not in assign and free_inp:
            assign[si] = free_inp.pop(0)
    return assign


def _splice(base: LabeledSentence, new_id: str,
            spans: list[EntitySpan], new_surfaces: dict[int, tuple[str, ...]]) -> LabeledSentence:
    tokens: list[str] = []
    labels: list[str] = []
    cursor = 0
    for si, sp in enumerate(spans):
        tokens.extend(base.tokens[cursor:sp.start])
        labels.extend(base.labels[cursor:sp.start])
        surface = new_surfaces.get(si, sp.surface)
        tokens.extend(surface)
        labels.extend([sp.entity_type] * len(surface))
        cursor = sp.end
    tokens.extend(base.tokens[cursor:])
    labels.extend(base.labels[cursor:])
    return LabeledSentence(new_id, tuple(tokens), tuple(labels))


def replace_entities(input: LabeledSentence, source: LabeledSentence,
                     cfg: AugmentationConfig | None = None, table: EmbeddingTable | None = None,
                     *, new_id: str | None = None, index: CorpusIndex | None = None) -> AugmentedSentence:
    """Source pattern filled with the input's entities, matched by type."""
    cfg = cfg or AugmentationConfig()
    src_spans = extract_entity_spans(source)
    inp_spans = extract_entity_spans(input)
    by_type_src: dict[str, list[int]] = defaultdict(list)
    by_type_inp: dict[str, list[int]] = defaultdict(list)
    for si, sp in enumerate(src_spans):
        if sp.entity_type not in cfg.pattern_labels:
            by_type_src[sp.entity_type].append(si)
    for ii, sp in enumerate(inp_spans):
        if sp.entity_type not in cfg.pattern_labels:
            by_type_inp[sp.entity_type].append(ii)

    new_surfaces: dict[int, tuple[str, ...]] = {}
    for typ, slots in by_type_src.items():
        donors = by_type_inp.get(typ)
        if not donors:
            continue
        assign = _greedy_pairs([src_spans[s] for s in slots], [inp_spans[i] for i in donors],
                               index, table, cfg.oov_policy)
        for local_s, local_i in assign.items():
            new_surfaces[slots[local_s]] = inp_spans[donors[local_i]].surface

    sid = new_id if new_id is not None else f"{input.id}<{source.id}"
    out = _splice(source, sid, src_spans, new_surfaces)
    return AugmentedSentence(out, input.id, source.id, cfg.strategy)


def re_augment(input: LabeledSentence, corpus: Corpus, cfg: AugmentationConfig,
               rng: np.random.Generator, *, index: CorpusIndex | None = None,
               new_id: str | None = None) -> AugmentedSentence:
    """Replace each non-predicate entity by a random same-type entity from other sentences."""
    index = index or CorpusIndex(corpus, None, cfg.oov_policy)
    me = _position(input, index)
    spans = index.spans[me]
    new_surfaces = {}
    for si, sp in enumerate(spans):
        if sp.entity_type in cfg.pattern_labels:
            continue
        pool = [e for e in index.pool(sp.entity_type, distinct=False) if e[1] != me]
        if not pool:
            continue
        surface, _ = pool[int(rng.integers(len(pool)))]
        new_surfaces[si] = surface
    sid = new_id if new_id is not None else f"{input.id}-re"
    out = _splice(input, sid, spans, new_surfaces)
    return AugmentedSentence(out, input.id, None, Strategy.RE)


def rae_ranking(span: EntitySpan, index: CorpusIndex) -> list[tuple[str, ...]]:
    """Distinct same-type surfaces from the corpus, most similar to ``span`` first."""
    key = (span.entity_type, span.surface)
    if key in index._rae:
        return index._rae[key]
    query = index.span_vector(span.surface)
    scored = []
    surfaces = []
    for order, (surface, _) in enumerate(index.pool(span.entity_type, distinct=True)):
        if surface == span.surface:
            continue
        cand = index.span_vector(surface)
        if query is None or cand is None:
            score = SimilarityScore.incomparable()
        else:
            score = SimilarityScore(cosine(query, cand))
        scored.append((score, len(surfaces)))
        surfaces.append(surface)
    ranked = [surfaces[i] for i in _rank(scored, descending=True)]
    index._rae[key] = ranked
    return ranked


def rae_augment(input: LabeledSentence, corpus: Corpus, cfg: AugmentationConfig,
                table: EmbeddingTable | None, rank: int = 0, *, index: CorpusIndex | None = None,
                new_id: str | None = None) -> AugmentedSentence:
    """Replace each non-predicate entity by its ``rank``-th most similar same-type entity."""
    index = index or CorpusIndex(corpus, table, cfg.oov_policy)
    me = _position(input, index)
    spans = index.spans[me]
    new_surfaces = {}
    for si, sp in enumerate(spans):
        if sp.entity_type in cfg.pattern_labels:
            continue
        ranking = rae_ranking(sp, index)
        if rank < len(ranking):
            new_surfaces[si] = ranking[rank]
    sid = new_id if new_id is not None else f"{input.id}-rae{rank}"
    out = _splice(input, sid, spans, new_surfaces)
    return AugmentedSentence(out, input.id, None, Strategy.RAE)


def _augment_one(pos: int, corpus: Corpus, cfg: AugmentationConfig, index: CorpusIndex) -> list[AugmentedSentence]:
    input = corpus.sentences[pos]
    produced: list[AugmentedSentence] = []
    seen = {input.tokens}

    def emit(make, source_tokens=None):
        aug = make(f"{input.id}-aug{len(produced)}")
        toks = aug.sentence.tokens
        if cfg.dedupe and (toks in seen or toks == source_tokens):
            return
        seen.add(toks)
        produced.append(aug)

    if cfg.strategy is Strategy.RE:
        rng = sentence_rng(cfg.seed, pos)
        for _ in range(cfg.k):
            emit(lambda nid: re_augment(input, corpus, cfg, rng, index=index, new_id=nid))
    elif cfg.strategy is Strategy.RAE:
        index.require_table()
        for r in range(cfg.k):
            emit(lambda nid: rae_augment(input, corpus, cfg, index.table, r, index=index, new_id=nid))
    else:
        for src in select_sources(input, corpus, cfg, index.table, index):
            emit(lambda nid: replace_entities(input, src, cfg, index.table, new_id=nid, index=index),
                 src.tokens)
    return produced


_WORKER: dict = {}


def _worker_init(corpus, cfg, table):
    _WORKER["args"] = (corpus, cfg, CorpusIndex(corpus, table, cfg.oov_policy))


def _worker_run(positions):
    corpus, cfg, index = _WORKER["args"]
    return [_augment_one(p, corpus, cfg, index) for p in positions]


def augment_corpus(corpus: Corpus, cfg: AugmentationConfig, table: EmbeddingTable | None = None,
                   *, jobs: int = 1, index: CorpusIndex | None = None) -> list[AugmentedSentence]:
    """Augmentations for every sentence, in corpus order then rank order."""
    if len(corpus) == 0:
        raise AugmentationError("cannot augment an empty corpus")
    if cfg.strategy.needs_embeddings and table is None and (index is None or index.table is None):
        raise MissingEmbeddings(f"strategy {cfg.strategy.value} needs an embedding table")
    positions = list(range(len(corpus)))
    if jobs <= 1:
        if index is None or index.policy is not cfg.oov_policy:
            index = CorpusIndex(corpus, table, cfg.oov_policy)
        per_input = [_augment_one(p, corpus, cfg, index) for p in positions]
    else:
        chunk = max(1, math.ceil(len(positions) / (jobs * 4)))
        chunks = [positions[i:i + chunk] for i in range(0, len(positions), chunk)]
        with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init,
                                 initargs=(corpus, cfg, table if index is None else index.table)) as ex:
            per_input = [r for part in ex.map(_worker_run, chunks) for r in part]
    out = [aug for group in per_input for aug in group]
    log.info("augmented %d inputs into %d sentences with %s", len(corpus), len(out), cfg.strategy.value)
    return out


def sample_fraction(corpus: Corpus, fraction: float, seed: int) -> Corpus:
    """First ceil(fraction * N) sentences of a seeded shuffle, kept in original order."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = len(corpus)
    # decimal reading of the fraction avoids ceil(0.3 * 10) == 4
    take = math.ceil(Fraction(str(fraction)) * n)
    order = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    keep = sorted(int(i) for i in order[:take])
    return Corpus(tuple(corpus.sentences[i] for i in keep), corpus.label_set)
