"""Token-labeled corpora: parsing, serialization, entity spans.

A sentence is a sequence of tokens with one role label per token.  Labels are
raw entity types (``MAT``, ``PP``, ...) or the outside label ``O``; an entity
is a maximal run of tokens sharing the same non-``O`` label.  BIO-prefixed
input is accepted and normalized to raw labels while parsing.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

OUTSIDE = "O"
FORMATS = ("conll", "jsonl")


class CorpusError(ValueError):
    """Base class for corpus parsing and validation errors."""


class MalformedLine(CorpusError):
    pass


class LengthMismatch(CorpusError):
    pass


class EmptySentence(CorpusError):
    pass


class DecodeError(CorpusError):
    pass


class DuplicateId(CorpusError):
    pass


class UnknownLabel(CorpusError):
    pass


def _check_token(text: str) -> None:
    if not isinstance(text, str) or not text:
        raise MalformedLine(f"empty token {text!r}")
    if any(ch.isspace() for ch in text):
        raise MalformedLine(f"token contains whitespace: {text!r}")


@dataclass(frozen=True)
class LabeledSentence:
    id: str
    tokens: tuple[str, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.tokens:
            raise EmptySentence(f"sentence {self.id!r} has no tokens")
        if len(self.tokens) != len(self.labels):
            raise LengthMismatch(
                f"sentence {self.id!r}: {len(self.tokens)} tokens vs {len(self.labels)} labels"
            )
        for tok in self.tokens:
            _check_token(tok)
        for lab in self.labels:
            if not isinstance(lab, str) or not lab or any(ch.isspace() for ch in lab):
                raise MalformedLine(f"sentence {self.id!r}: bad label {lab!r}")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class EntitySpan:
    start: int
    end: int
    entity_type: str
    surface: tuple[str, ...]

    def __len__(self) -> int:
        return self.end - self.start

    @property
    def text(self) -> str:
        return " ".join(self.surface)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[LabeledSentence, ...]
    label_set: frozenset[str] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        sents = tuple(self.sentences)
        object.__setattr__(self, "sentences", sents)
        observed = {lab for s in sents for lab in s.labels if lab != OUTSIDE}
        if self.label_set is None:
            object.__setattr__(self, "label_set", frozenset(observed))
        else:
            object.__setattr__(self, "label_set", frozenset(self.label_set) - {OUTSIDE})
            unknown = observed - self.label_set
            if unknown:
                raise UnknownLabel(f"labels not declared in label_set: {sorted(unknown)}")
        seen: set[str] = set()
        for s in sents:
            if s.id in seen:
                raise DuplicateId(f"duplicate sentence id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    def position(self, sentence_id: str) -> int:
        for i, s in enumerate(self.sentences):
            if s.id == sentence_id:
                return i
        raise KeyError(sentence_id)


def extract_entity_spans(sentence: LabeledSentence) -> list[EntitySpan]:
    """Maximal runs of identical non-``O`` labels, left to right."""
    spans = []
    labels = sentence.labels
    i = 0
    n = len(labels)
    while i < n:
        lab = labels[i]
        j = i + 1
        while j < n and labels[j] == lab:
            j += 1
        if lab != OUTSIDE:
            spans.append(EntitySpan(i, j, lab, sentence.tokens[i:j]))
        i = j
    return spans


def label_multiset(sentence: LabeledSentence) -> Counter:
    return Counter(sentence.labels)


def collapse_labels(labels: Sequence[str]) -> list[str]:
    """Label sequence with each entity run collapsed to one symbol; ``O`` kept per token."""
    out: list[str] = []
    prev = None
    for lab in labels:
        if lab == OUTSIDE or lab != prev:
            out.append(lab)
        prev = lab
    return out


def _normalize_bio(labels: list[str], where: str) -> list[str]:
    if not any(lab.startswith(("B-", "I-")) for lab in labels):
        return labels
    out = []
    prev_type = None
    for lab in labels:
        if lab.startswith("B-"):
            typ = lab[2:]
        elif lab.startswith("I-"):
            typ = lab[2:]
            if prev_type != typ:
                raise MalformedLine(f"{where}: {lab} does not continue an entity of type {typ}")
        else:
            typ = lab
        if not typ:
            raise MalformedLine(f"{where}: empty entity type in {lab!r}")
        out.append(typ)
        prev_type = None if typ == OUTSIDE else typ
    return out


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DecodeError(str(e)) from e


def _parse_conll(text: str) -> list[LabeledSentence]:
    if text and not text.endswith("\n"):
        raise MalformedLine("CoNLL input must end with a newline")
    sentences = []
    tokens: list[str] = []
    labels: list[str] = []

    def flush():
        if tokens:
            sid = str(len(sentences))
            norm = _normalize_bio(labels, f"sentence {sid}")
            sentences.append(LabeledSentence(sid, tuple(tokens), tuple(norm)))
            tokens.clear()
            labels.clear()

    for lineno, line in enumerate(text.split("\n")[:-1], start=1):
        if line == "":
            flush()
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedLine(f"line {lineno}: expected 'token<TAB>label', got {line!r}")
        tok, lab = cols
        if not tok or not lab or any(ch.isspace() for ch in tok + lab):
            raise MalformedLine(f"line {lineno}: empty field or stray whitespace in {line!r}")
        tokens.append(tok)
        labels.append(lab)
    flush()
    return sentences


def _parse_jsonl(text: str) -> list[LabeledSentence]:
    sentences = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedLine(f"line {lineno}: invalid JSON ({e})") from e
        if not isinstance(obj, dict) or "tokens" not in obj or "labels" not in obj:
            raise MalformedLine(f"line {lineno}: expected an object with 'tokens' and 'labels'")
        toks, labs = obj["tokens"], obj["labels"]
        if not isinstance(toks, list) or not isinstance(labs, list):
            raise MalformedLine(f"line {lineno}: 'tokens' and 'labels' must be arrays")
        if len(toks) != len(labs):
            raise LengthMismatch(f"line {lineno}: {len(toks)} tokens vs {len(labs)} labels")
        if not toks:
            raise EmptySentence(f"line {lineno}: no tokens")
        sid = obj.get("id")
        sid = str(len(sentences)) if sid is None else str(sid)
        labs = _normalize_bio([str(lab) for lab in labs], f"line {lineno}")
        sentences.append(LabeledSentence(sid, tuple(toks), tuple(labs)))
    return sentences


def parse_corpus(data: bytes | str, format: str = "conll") -> Corpus:
    text = _decode(data)
    if format == "conll":
        sentences = _parse_conll(text)
    elif format == "jsonl":
        sentences = _parse_jsonl(text)
    else:
        raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    return Corpus(tuple(sentences))


def write_corpus(corpus: Corpus | Iterable[LabeledSentence], format: str = "conll") -> str:
    sentences = corpus.sentences if isinstance(corpus, Corpus) else tuple(corpus)
    if format == "conll":
        parts = []
        for s in sentences:
            parts.append("".join(f"{t}\t{l}\n" for t, l in zip(s.tokens, s.labels)))
        return "\n".join(parts) + ("\n" if parts else "")
    if format == "jsonl":
        return "".join(
            json.dumps({"id": s.id, "tokens": list(s.tokens), "labels": list(s.labels)},
                       ensure_ascii=False) + "\n"
            for s in sentences
        )
    raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")


def read_corpus(path, format: str | None = None) -> Corpus:
    path = str(path)
    if format is None:
        format = "jsonl" if path.endswith((".jsonl", ".json")) else "conll"
    with open(path, "rb") as f:
        return parse_corpus(f.read(), format)


def save_corpus(corpus, path, format: str = "conll") -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(write_corpus(corpus, format))
