"""Second-stage reranking by target-token relevance probability.

A scorer maps (query, passage) pairs to a pair of logits for the positive
and negative target words; relevance is the two-way softmax probability of
the positive one. Long documents are segmented into overlapping sentence
windows and a document's probability is the maximum over its passages.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from .analysis import AnalyzerConfig, analyze
from .corpus import Document, RunEntry


@dataclass(frozen=True)
class TargetWordConfig:
    positive: str = "true"
    negative: str = "false"

    def __post_init__(self):
        if not self.positive or not self.negative:
            raise ValueError("target words must be non-empty")
        if self.positive == self.negative:
            raise ValueError("positive and negative target words must differ")


@dataclass(frozen=True)
class ScoreRecord:
    logit_pos: float
    logit_neg: float
    prob: float


@dataclass(frozen=True)
class Passage:
    doc_id: str
    passage_index: int
    text: str
    sentence_span: tuple[int, int]  # inclusive sentence indices


@dataclass(frozen=True)
class WindowConfig:
    size: int = 10
    stride: int = 5

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"window size must be >= 1, got {self.size}")
        if not 1 <= self.stride <= self.size:
            raise ValueError(
                f"stride must be in [1, size], got stride={self.stride} size={self.size}"
            )


class Scorer(Protocol):
    def score_batch(
        self, pairs: Sequence[tuple[str, str]], target: TargetWordConfig
    ) -> list[tuple[float, float]]:
        """Return one (logit_pos, logit_neg) per (query, passage) pair, in order."""
        ...


class ScoringError(RuntimeError):
    """A scorer failed; the message identifies the document involved."""


def render_prompt(query_text: str, passage_text: str) -> str:
    """Render the scoring prompt; inputs are substituted verbatim."""
    return f"Query: {query_text} Document: {passage_text} Relevant:"


def relevance_prob(logit_pos: float, logit_neg: float) -> float:
    """Two-way softmax probability of the positive target, computed stably."""
    if not (math.isfinite(logit_pos) and math.isfinite(logit_neg)):
        raise ValueError(f"logits must be finite, got ({logit_pos}, {logit_neg})")
    d = logit_neg - logit_pos
    if d >= 0:
        e = math.exp(-d)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(d))


_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    """Split after '.', '!' or '?' followed by whitespace; trims segments.

    Text with no terminator comes back as a single sentence; whitespace-only
    input yields no sentences.
    """
    stripped = text.strip()
    if not stripped:
        return []
    return [part.strip() for part in _SENTENCE_SPLIT_RE.split(stripped) if part.strip()]


def make_passages(
    sentences: Sequence[str],
    doc_id: str = "",
    size: int = 10,
    stride: int = 5,
) -> list[Passage]:
    """Sliding sentence windows: starts at 0, stride, 2*stride, ...

    Trailing partial windows are emitted as-is and generation stops once a
    window's end reaches the last sentence, so the window count is
    1 + ceil(max(0, n - size) / stride).
    """
    WindowConfig(size=size, stride=stride)
    n = len(sentences)
    if n == 0:
        return []
    passages: list[Passage] = []
    start = 0
    index = 0
    while True:
        end = min(start + size, n) - 1
        passages.append(
            Passage(
                doc_id=doc_id,
                passage_index=index,
                text=" ".join(sentences[start : end + 1]),
                sentence_span=(start, end),
            )
        )
        if end >= n - 1:
            break
        start += stride
        index += 1
    return passages


def overlap_score(
    query_text: str, passage_text: str, cfg: AnalyzerConfig | None = None
) -> tuple[float, float]:
    """Deterministic toy scorer: logits (v, 1 - v) from query-term overlap.

    v is the fraction of distinct analyzed query terms present in the
    passage. Requires a query that analyzes to at least one term.
    """
    query_terms = set(analyze(query_text, cfg))
    if not query_terms:
        raise ValueError(f"query analyzes to no terms: {query_text!r}")
    passage_terms = set(analyze(passage_text, cfg))
    v = len(query_terms & passage_terms) / len(query_terms)
    return (v, 1.0 - v)


@dataclass(frozen=True)
class OverlapScorer:
    """Scorer backed by :func:`overlap_score`; ignores the target words."""

    cfg: AnalyzerConfig | None = None

    def score_batch(
        self, pairs: Sequence[tuple[str, str]], target: TargetWordConfig
    ) -> list[tuple[float, float]]:
        return [overlap_score(q, p, self.cfg) for q, p in pairs]


def score_document(
    doc: Document,
    query_text: str,
    scorer: Scorer,
    target: TargetWordConfig,
    window: WindowConfig = WindowConfig(),
) -> tuple[ScoreRecord, int]:
    """Max-aggregated relevance over the document's passages.

    All passages go to the scorer in a single batch; ties on probability
    resolve to the lowest passage index.
    """
    sentences = split_sentences(doc.text)
    if sentences:
        passages = make_passages(
            sentences, doc_id=doc.id, size=window.size, stride=window.stride
        )
    elif doc.text.strip():
        passages = [
            Passage(doc_id=doc.id, passage_index=0, text=doc.text.strip(), sentence_span=(0, 0))
        ]
    else:
        raise ValueError(f"document {doc.id} has no text to score")
    pairs = [(query_text, p.text) for p in passages]
    try:
        logits = scorer.score_batch(pairs, target)
    except Exception as exc:
        raise ScoringError(
            f"scorer failed on document {doc.id} ({len(pairs)} passages)"
        ) from exc
    if len(logits) != len(pairs):
        raise ScoringError(
            f"scorer returned {len(logits)} results for {len(pairs)} passages "
            f"of document {doc.id}"
        )
    best: ScoreRecord | None = None
    best_index = 0
    for i, (logit_pos, logit_neg) in enumerate(logits):
        record = ScoreRecord(logit_pos, logit_neg, relevance_prob(logit_pos, logit_neg))
        if best is None or record.prob > best.prob:
            best = record
            best_index = i
    assert best is not None
    return best, best_index


def rerank(
    candidates: Sequence[RunEntry],
    query_text: str,
    corpus_lookup: Mapping[str, Document],
    scorer: Scorer,
    target: TargetWordConfig,
    window: WindowConfig = WindowConfig(),
) -> list[RunEntry]:
    """Reorder candidates by relevance probability (ties by doc id).

    The output contains exactly the candidate document set; scores are the
    probabilities and ranks are reassigned from 1.
    """
    missing = sorted(
        {e.doc_id for e in candidates if e.doc_id not in corpus_lookup}
    )
    if missing:
        raise KeyError(f"candidate documents missing from corpus: {', '.join(missing)}")
    scored: list[tuple[str, float]] = []
    for entry in candidates:
        record, _ = score_document(
            corpus_lookup[entry.doc_id], query_text, scorer, target, window
        )
        scored.append((entry.doc_id, record.prob))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [
        RunEntry(doc_id=doc_id, score=prob, rank=i + 1)
        for i, (doc_id, prob) in enumerate(scored)
    ]
