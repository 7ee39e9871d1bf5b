"""BM25 scoring and top-k search.

Per-term contribution for a query term t and document d:

    idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl/avgdl))
    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))

Defaults k1=0.9, b=0.4. Query terms are not deduplicated: each occurrence
in the query contributes once. Terms with df=0 are skipped. The idf
argument is always > 1, so idf is strictly positive and no clamping is
needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .analysis import AnalyzerConfig, analyze
from .corpus import RunEntry
from .index import InvertedIndex


@dataclass(frozen=True)
class BM25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass
class WeightedQuery:
    """Term-weighted query; all weights finite and positive.

    ``expanded`` is False when feedback-based expansion fell back to the
    original query because no feedback documents were retrieved.
    """

    weights: dict[str, float]
    expanded: bool = True

    def validate(self) -> None:
        if not self.weights:
            raise ValueError("weighted query must contain at least one term")
        for term, w in self.weights.items():
            if not (math.isfinite(w) and w > 0.0):
                raise ValueError(f"weight for {term!r} must be finite and > 0, got {w}")


def idf(index: InvertedIndex, term: str) -> float:
    df = index.df(term)
    return math.log(1.0 + (index.n_docs - df + 0.5) / (df + 0.5))


def term_score(index: InvertedIndex, params: BM25Params, term: str, doc_id: str) -> float:
    tf = index.tf(term, doc_id)
    if tf == 0:
        return 0.0
    dl = index.doc_lens[doc_id]
    norm = params.k1 * (1.0 - params.b + params.b * dl / index.avgdl)
    return idf(index, term) * tf * (params.k1 + 1.0) / (tf + norm)


def bm25_score(
    index: InvertedIndex, params: BM25Params, query_terms: list[str], doc_id: str
) -> float:
    """Score one document against analyzed query terms."""
    if doc_id not in index.doc_lens:
        raise KeyError(f"unknown document id: {doc_id}")
    return sum(term_score(index, params, t, doc_id) for t in query_terms)


def _ranked_entries(scores: Mapping[str, float], k: int) -> list[RunEntry]:
    hits = [(doc_id, s) for doc_id, s in scores.items() if s > 0.0]
    hits.sort(key=lambda item: (-item[1], item[0]))
    return [
        RunEntry(doc_id=doc_id, score=s, rank=i + 1)
        for i, (doc_id, s) in enumerate(hits[:k])
    ]


def _accumulate(
    index: InvertedIndex,
    params: BM25Params,
    weighted_terms: list[tuple[str, float]],
) -> dict[str, float]:
    scores: dict[str, float] = {}
    for term, weight in weighted_terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        term_idf = idf(index, term)
        for doc_id, tf in plist:
            dl = index.doc_lens[doc_id]
            norm = params.k1 * (1.0 - params.b + params.b * dl / index.avgdl)
            contrib = term_idf * tf * (params.k1 + 1.0) / (tf + norm)
            scores[doc_id] = scores.get(doc_id, 0.0) + weight * contrib
    return scores


def search(
    index: InvertedIndex,
    params: BM25Params,
    cfg: AnalyzerConfig,
    query_text: str,
    k: int = 1000,
) -> list[RunEntry]:
    """Top-k documents with positive BM25 score, ties broken by doc id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    terms = analyze(query_text, cfg)
    scores = _accumulate(index, params, [(t, 1.0) for t in terms])
    return _ranked_entries(scores, k)


def search_weighted(
    index: InvertedIndex,
    params: BM25Params,
    cfg: AnalyzerConfig,
    wq: WeightedQuery,
    k: int = 1000,
) -> list[RunEntry]:
    """Like :func:`search`, scoring sum(weight(t) * per-term BM25 contribution).

    Query terms in ``wq`` are already analyzed; ``cfg`` is accepted for
    signature symmetry with :func:`search` and is unused here.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    wq.validate()
    scores = _accumulate(index, params, sorted(wq.weights.items()))
    return _ranked_entries(scores, k)
