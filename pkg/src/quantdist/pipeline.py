"""Corpus ingestion: sentence splitting, candidate objects, co-occurrence.

Sentences arrive either as plain text (every content word becomes an
UNKNOWN-pos candidate) or pre-annotated with coarse POS tags and
dependency heads in a CoNLL-like column file. Each measurement mention in
a sentence is paired with every candidate object in range, producing
co-occurrence records for the aggregator. Sentences containing a negation
word contribute nothing at all.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import AnnotationFormatError
from .parser import scan_measurements, tokenize
from .units import Quantity, UnitRegistry

NEGATION_WORDS = frozenset({"not", "no", "without", "neither", "nor"})

# words that end in "." without ending the sentence
ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "st", "mt", "no", "vs", "etc",
        "fig", "jr", "sr", "inc", "ltd", "co", "gen", "col", "capt",
        "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
        "oct", "nov", "dec", "approx", "dept", "est", "u.s", "u.k", "e.g", "i.e",
    }
)

_BOUNDARY_RE = re.compile(r"([.!?]+)(\s+)(?=[A-Z0-9])")
_WORD_RE = re.compile(r"^[a-z]+(?:-[a-z]+)*$")


class Pos(Enum):
    NOUN = "NOUN"
    ADJ = "ADJ"
    VERB = "VERB"
    OTHER = "OTHER"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class TokenAnnotation:
    surface: str
    pos: Pos = Pos.UNKNOWN
    head_index: int | None = None


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: tuple[TokenAnnotation, ...]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @classmethod
    def from_plain(cls, sentence: str) -> "AnnotatedSentence":
        return cls(tokens=tuple(TokenAnnotation(t) for t in tokenize(sentence)))


@dataclass(frozen=True)
class ObjectKey:
    """What a measurement is attributed to: token or phrase, plus head."""

    surface: str
    pos: Pos = Pos.UNKNOWN
    head: str | None = None

    def __post_init__(self):
        if not self.surface:
            raise ValueError("ObjectKey surface must be nonempty")

    def without_head(self) -> "ObjectKey":
        if self.head is None:
            return self
        return ObjectKey(self.surface, self.pos, None)


@dataclass(frozen=True)
class CooccurrenceRecord:
    object: ObjectKey
    quantity: Quantity
    token_distance: int  # token gap; 0 means the spans are adjacent


@dataclass(frozen=True)
class ExtractionConfig:
    max_distance: int | None = None  # None = whole sentence
    min_phrase_count: int = 5
    max_phrase_len: int = 3
    negation_words: frozenset = NEGATION_WORDS

    def __post_init__(self):
        if self.max_distance is not None and not 1 <= self.max_distance <= 100:
            raise ValueError("max_distance must be None or within 1..100")
        if self.max_phrase_len < 1:
            raise ValueError("max_phrase_len must be >= 1")
        if self.min_phrase_count < 1:
            raise ValueError("min_phrase_count must be >= 1")


def load_stopwords() -> frozenset:
    text = resources.files("quantdist.data").joinpath("stopwords.txt").read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


_STOPWORDS: frozenset | None = None


def stopwords() -> frozenset:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = load_stopwords()
    return _STOPWORDS


def split_sentences(text: str) -> list[str]:
    """Split on sentence-final punctuation followed by a capital or digit."""
    out = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        prev = text[start : m.end(1)]
        last_word = prev.rsplit(None, 1)[-1] if prev.split() else ""
        if last_word.rstrip(".").lower() in ABBREVIATIONS:
            continue
        out.append(text[start : m.end(1)].strip())
        start = m.end()
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return [s for s in out if s]


def contains_negation(tokens, negation_words=NEGATION_WORDS) -> bool:
    return any(t.lower() in negation_words for t in tokens)


def _span_gap(a_start, a_end, b_start, b_end) -> int | None:
    """Token gap between two end-exclusive spans; None when they overlap."""
    if a_end <= b_start:
        return b_start - a_end
    if b_end <= a_start:
        return a_start - b_end
    return None


def _candidate_objects(sentence: AnnotatedSentence, config: ExtractionConfig):
    """(ObjectKey, start, end) triples for tokens and noun phrases."""
    tokens = sentence.tokens
    stops = stopwords()
    candidates = []
    for i, tok in enumerate(tokens):
        low = tok.surface.lower()
        if tok.pos is Pos.UNKNOWN:
            if _WORD_RE.match(low) and low not in stops:
                candidates.append((ObjectKey(low, Pos.UNKNOWN, None), i, i + 1))
        elif tok.pos in (Pos.NOUN, Pos.ADJ, Pos.VERB):
            head = None
            if tok.head_index is not None:
                head = tokens[tok.head_index].surface.lower()
            candidates.append((ObjectKey(low, tok.pos, head), i, i + 1))
    # contiguous noun runs become phrases headed by their final noun
    run_start = None
    for i in range(len(tokens) + 1):
        is_noun = i < len(tokens) and tokens[i].pos is Pos.NOUN
        if is_noun and run_start is None:
            run_start = i
        elif not is_noun and run_start is not None:
            for s in range(run_start, i):
                for e in range(s + 2, min(i, s + config.max_phrase_len) + 1):
                    surface = " ".join(t.surface.lower() for t in tokens[s:e])
                    head = tokens[e - 1].surface.lower()
                    candidates.append((ObjectKey(surface, Pos.NOUN, head), s, e))
            run_start = None
    return candidates


def extract_records(
    sentence: AnnotatedSentence, config: ExtractionConfig, registry: UnitRegistry
) -> list[CooccurrenceRecord]:
    """Pair every mention with every candidate object within range.

    A sentence containing any negation word yields no records at all.
    Records whose token gap reaches max_distance are dropped, which makes
    the k=3 and k=10 record sets nest inside the whole-sentence set.
    """
    surfaces = sentence.surfaces()
    if contains_negation(surfaces, config.negation_words):
        return []
    mentions = scan_measurements(surfaces, registry)
    if not mentions:
        return []
    records = []
    candidates = _candidate_objects(sentence, config)
    for mention in mentions:
        for key, start, end in candidates:
            gap = _span_gap(start, end, mention.start, mention.end)
            if gap is None:
                continue  # object inside the measurement span
            if config.max_distance is not None and gap >= config.max_distance:
                continue
            records.append(
                CooccurrenceRecord(object=key, quantity=mention.quantity, token_distance=gap)
            )
    return records


_POS_BY_NAME = {p.name: p for p in Pos}


def read_annotated(path):
    """Yield AnnotatedSentence blocks from a column file.

    Format: one token per line as `index<TAB>surface<TAB>pos<TAB>head_index`,
    blank line between sentences; head_index is `-` for none. Malformed
    lines raise AnnotationFormatError with their line number.
    """
    pending: list[tuple[int, str, Pos, int | None]] = []
    pending_line = 0

    def flush():
        nonlocal pending
        if not pending:
            return None
        tokens = []
        n = len(pending)
        for idx, surface, pos, head in pending:
            if head is not None and (not 0 <= head < n or head == idx):
                raise AnnotationFormatError(
                    f"head index {head} invalid for a {n}-token sentence",
                    line_number=pending_line,
                    path=str(path),
                )
            tokens.append(TokenAnnotation(surface, pos, head))
        pending = []
        return AnnotatedSentence(tokens=tuple(tokens))

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                sent = flush()
                if sent:
                    yield sent
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise AnnotationFormatError(
                    f"expected 4 tab-separated columns, got {len(parts)}",
                    line_number=lineno,
                    path=str(path),
                )
            idx_s, surface, pos_s, head_s = (p.strip() for p in parts)
            try:
                idx = int(idx_s)
            except ValueError:
                raise AnnotationFormatError(
                    f"bad token index {idx_s!r}", line_number=lineno, path=str(path)
                ) from None
            if idx != len(pending):
                raise AnnotationFormatError(
                    f"token index {idx} out of order (expected {len(pending)})",
                    line_number=lineno,
                    path=str(path),
                )
            if not surface:
                raise AnnotationFormatError(
                    "empty token surface", line_number=lineno, path=str(path)
                )
            pos = _POS_BY_NAME.get(pos_s.upper())
            if pos is None or pos is Pos.UNKNOWN:
                raise AnnotationFormatError(
                    f"unknown pos tag {pos_s!r}", line_number=lineno, path=str(path)
                )
            if head_s in ("-", "_", ""):
                head = None
            else:
                try:
                    head = int(head_s)
                except ValueError:
                    raise AnnotationFormatError(
                        f"bad head index {head_s!r}", line_number=lineno, path=str(path)
                    ) from None
            pending.append((idx, surface, pos, head))
            pending_line = lineno
        sent = flush()
        if sent:
            yield sent
