"""RM3 pseudo-relevance-feedback query expansion.

Given a query, the expansion:

  (a) retrieves the top ``fb_docs`` documents with BM25;
  (b) normalizes their retrieval scores to sum to 1, giving doc weights s_i;
  (c) estimates a feedback model P(w) = sum_i s_i * tf(w, d_i) / dl(d_i);
  (d) keeps the ``fb_terms`` highest-P(w) terms (ties broken by term,
      ascending) and renormalizes them to sum to 1;
  (e) interpolates: weight(w) = a * P_q(w) + (1 - a) * P(w), where
      a = ``orig_weight`` and P_q is the occurrence frequency of w in the
      analyzed query. Zero-weight terms are dropped.

With no retrievable feedback documents the original query weights are
returned unchanged and the result is flagged ``expanded=False``.
"""

from __future__ import annotations

from collections import Counter

from .analysis import AnalyzerConfig, analyze
from .bm25 import BM25Params, WeightedQuery, search
from .index import InvertedIndex


def _query_model(terms: list[str]) -> dict[str, float]:
    counts = Counter(terms)
    n = len(terms)
    return {t: c / n for t, c in counts.items()}


def rm3_expand(
    index: InvertedIndex,
    params: BM25Params,
    cfg: AnalyzerConfig,
    query_text: str,
    fb_docs: int = 10,
    fb_terms: int = 10,
    orig_weight: float = 0.5,
) -> WeightedQuery:
    if fb_docs < 1:
        raise ValueError(f"fb_docs must be >= 1, got {fb_docs}")
    if fb_terms < 1:
        raise ValueError(f"fb_terms must be >= 1, got {fb_terms}")
    if not 0.0 <= orig_weight <= 1.0:
        raise ValueError(f"orig_weight must be in [0, 1], got {orig_weight}")
    query_terms = analyze(query_text, cfg)
    if not query_terms:
        raise ValueError(f"query analyzes to no terms: {query_text!r}")
    p_query = _query_model(query_terms)

    hits = search(index, params, cfg, query_text, fb_docs)
    if not hits:
        return WeightedQuery(weights=dict(p_query), expanded=False)

    total = sum(h.score for h in hits)
    doc_weight = {h.doc_id: h.score / total for h in hits}

    # Feedback term distribution over everything that occurs in the
    # feedback documents (one pass over the postings lists).
    fb_ids = set(doc_weight)
    p_fb: dict[str, float] = {}
    for term, plist in index.postings.items():
        mass = 0.0
        for doc_id, tf in plist:
            if doc_id in fb_ids:
                dl = index.doc_lens[doc_id]
                if dl > 0:
                    mass += doc_weight[doc_id] * tf / dl
        if mass > 0.0:
            p_fb[term] = mass

    kept = sorted(p_fb.items(), key=lambda item: (-item[1], item[0]))[:fb_terms]
    kept_total = sum(p for _, p in kept)
    p_fb_norm = {t: p / kept_total for t, p in kept}

    weights: dict[str, float] = {}
    for term in sorted(set(p_query) | set(p_fb_norm)):
        w = orig_weight * p_query.get(term, 0.0) + (1.0 - orig_weight) * p_fb_norm.get(term, 0.0)
        if w > 0.0:
            weights[term] = w
    wq = WeightedQuery(weights=weights)
    wq.validate()
    return wq
