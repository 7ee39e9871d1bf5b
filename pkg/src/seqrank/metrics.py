"""Ranking metrics over runs and qrels.

All metrics read ranked order only, never run scores, so any strictly
order-preserving rescoring leaves them unchanged. Per-topic values lie in
[0, 1]; aggregates are arithmetic means computed with exact summation.

Topic handling follows the usual trec-eval conventions:

* MRR@k and P@k evaluate every topic in the run; topics with no qrels
  entry contribute 0 and are listed in ``unjudged_topics``.
* AP and nDCG@k skip topics with no relevant (grade >= 1) document; those
  are listed in ``excluded_topics`` and do not affect the aggregate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import BinaryIO

from .corpus import QrelSet, RunList


@dataclass
class MetricReport:
    metric_name: str
    cutoff: int | None
    per_topic: dict[str, float]
    aggregate: float
    unjudged_topics: list[str] = field(default_factory=list)
    excluded_topics: list[str] = field(default_factory=list)

    @property
    def n_topics(self) -> int:
        return len(self.per_topic)


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def _finish(
    name: str,
    cutoff: int | None,
    per_topic: dict[str, float],
    unjudged: list[str],
    excluded: list[str],
) -> MetricReport:
    return MetricReport(
        metric_name=name,
        cutoff=cutoff,
        per_topic=per_topic,
        aggregate=_mean(list(per_topic.values())),
        unjudged_topics=unjudged,
        excluded_topics=excluded,
    )


def mrr_at_k(run: RunList, qrels: QrelSet, k: int = 10) -> MetricReport:
    """Reciprocal rank of the first relevant document within the top k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    per_topic: dict[str, float] = {}
    unjudged: list[str] = []
    judged_topics = set(qrels.topic_ids())
    for topic_id, entries in run.topics.items():
        if topic_id not in judged_topics:
            unjudged.append(topic_id)
        value = 0.0
        for entry in entries[:k]:
            if qrels.grade(topic_id, entry.doc_id) >= 1:
                value = 1.0 / entry.rank
                break
        per_topic[topic_id] = value
    return _finish(f"mrr@{k}", k, per_topic, unjudged, [])


def precision_at_k(run: RunList, qrels: QrelSet, k: int = 20) -> MetricReport:
    """Fraction of the top k that is relevant; short lists pad as non-relevant."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    per_topic: dict[str, float] = {}
    unjudged: list[str] = []
    judged_topics = set(qrels.topic_ids())
    for topic_id, entries in run.topics.items():
        if topic_id not in judged_topics:
            unjudged.append(topic_id)
        hits = sum(1 for e in entries[:k] if qrels.grade(topic_id, e.doc_id) >= 1)
        per_topic[topic_id] = hits / k
    return _finish(f"p@{k}", k, per_topic, unjudged, [])


def average_precision(run: RunList, qrels: QrelSet) -> MetricReport:
    """Mean of precision at each relevant retrieved rank, over all relevants."""
    per_topic: dict[str, float] = {}
    excluded: list[str] = []
    for topic_id, entries in run.topics.items():
        total_relevant = qrels.relevant_count(topic_id)
        if total_relevant == 0:
            excluded.append(topic_id)
            continue
        hits = 0
        acc = 0.0
        for entry in entries:
            if qrels.grade(topic_id, entry.doc_id) >= 1:
                hits += 1
                acc += hits / entry.rank
        per_topic[topic_id] = acc / total_relevant
    return _finish("ap", None, per_topic, [], excluded)


def ndcg_at_k(run: RunList, qrels: QrelSet, k: int = 20) -> MetricReport:
    """Exponential-gain nDCG: gain (2^grade - 1), discount log2(rank + 1)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    per_topic: dict[str, float] = {}
    excluded: list[str] = []
    for topic_id, entries in run.topics.items():
        grades = qrels.grades_for_topic(topic_id)
        ideal = sorted(grades.values(), reverse=True)[:k]
        idcg = math.fsum(
            (2.0**g - 1.0) / math.log2(i + 2) for i, g in enumerate(ideal)
        )
        if idcg == 0.0:
            excluded.append(topic_id)
            continue
        dcg = math.fsum(
            (2.0 ** grades.get(e.doc_id, 0) - 1.0) / math.log2(e.rank + 1)
            for e in entries[:k]
        )
        per_topic[topic_id] = dcg / idcg
    return _finish(f"ndcg@{k}", k, per_topic, [], excluded)


def write_report_tsv(report: MetricReport, sink: BinaryIO) -> None:
    for topic_id, value in report.per_topic.items():
        sink.write(f"{topic_id}\t{value:.6f}\n".encode("utf-8"))


def report_summary(report: MetricReport) -> dict:
    return {
        "metric": report.metric_name,
        "cutoff": report.cutoff,
        "aggregate": report.aggregate,
        "nTopics": report.n_topics,
        "excludedTopics": list(report.excluded_topics),
    }


def write_report_json(report: MetricReport, sink: BinaryIO) -> None:
    sink.write(json.dumps(report_summary(report), indent=2).encode("utf-8"))
    sink.write(b"\n")
