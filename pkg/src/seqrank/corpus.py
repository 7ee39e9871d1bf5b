"""Corpus, topic, qrels, run-file and training-instance I/O.

All parsers consume binary streams, insist on UTF-8, and report failures
with 1-based line numbers. Formats:

* corpus: TSV ``docId \\t text`` or JSONL ``{"id": ..., "text": ...}``
* topics: TSV with 2 columns (id, title) or 3 columns (id, title, description)
* qrels:  whitespace-separated ``topicId 0 docId grade``
* runs:   ``topicId Q0 docId rank score tag`` with scores printed to
  6 decimal places (ASCII, '.' separator) so runs diff cleanly
* training instances: TSV ``query \\t document \\t label`` with label
  ``positive`` or ``negative``
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator

LABEL_POSITIVE = "positive"
LABEL_NEGATIVE = "negative"


class ParseError(ValueError):
    """Malformed input; carries the 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class DuplicateIdError(ParseError):
    """An identifier (or identifier pair) occurred more than once."""


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class Topic:
    id: str
    title: str
    description: str = ""


@dataclass(frozen=True)
class TrainInstance:
    query_text: str
    doc_text: str
    label: str  # LABEL_POSITIVE or LABEL_NEGATIVE


@dataclass
class QrelSet:
    """Graded relevance judgments keyed by (topicId, docId).

    Grade 0 entries are retained: they record judged-non-relevant documents.
    """

    entries: dict[tuple[str, str], int] = field(default_factory=dict)

    def grade(self, topic_id: str, doc_id: str) -> int:
        return self.entries.get((topic_id, doc_id), 0)

    def topic_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for topic_id, _ in self.entries:
            seen.setdefault(topic_id)
        return list(seen)

    def relevant_count(self, topic_id: str) -> int:
        return sum(
            1 for (t, _), g in self.entries.items() if t == topic_id and g >= 1
        )

    def grades_for_topic(self, topic_id: str) -> dict[str, int]:
        return {d: g for (t, d), g in self.entries.items() if t == topic_id}


@dataclass(frozen=True)
class RunEntry:
    doc_id: str
    score: float
    rank: int


@dataclass
class RunList:
    """Per-topic rankings plus the run tag.

    Invariants (checked by :meth:`validate`): ranks are contiguous 1..n,
    scores non-increasing with rank, no duplicate document within a topic.
    """

    topics: dict[str, list[RunEntry]] = field(default_factory=dict)
    tag: str = "run"

    def validate(self) -> None:
        if not self.tag or _has_whitespace(self.tag):
            raise ValueError(f"run tag must be non-empty without whitespace: {self.tag!r}")
        for topic_id, entries in self.topics.items():
            if not topic_id or _has_whitespace(topic_id):
                raise ValueError(f"bad topic id in run: {topic_id!r}")
            seen: set[str] = set()
            prev_score = math.inf
            for i, entry in enumerate(entries):
                if not entry.doc_id or _has_whitespace(entry.doc_id):
                    raise ValueError(f"bad doc id in run for topic {topic_id}: {entry.doc_id!r}")
                if entry.rank != i + 1:
                    raise ValueError(
                        f"topic {topic_id}: rank {entry.rank} at position {i + 1}; "
                        "ranks must be contiguous from 1"
                    )
                if not math.isfinite(entry.score):
                    raise ValueError(f"topic {topic_id}: non-finite score at rank {entry.rank}")
                if entry.score > prev_score:
                    raise ValueError(
                        f"topic {topic_id}: score increases at rank {entry.rank}"
                    )
                if entry.doc_id in seen:
                    raise ValueError(f"topic {topic_id}: duplicate doc {entry.doc_id}")
                seen.add(entry.doc_id)
                prev_score = entry.score


def _has_whitespace(s: str) -> bool:
    return any(c.isspace() for c in s)


def _decoded_lines(stream: BinaryIO) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, decoded line) pairs; reject non-UTF-8."""
    for i, raw in enumerate(stream, start=1):
        if raw.endswith(b"\n"):
            raw = raw[:-1]
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        try:
            yield i, raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8: {exc}", i) from exc


def parse_corpus(stream: BinaryIO, format: str = "tsv") -> Iterator[Document]:
    """Parse a document corpus, yielding documents in input order.

    ``format`` is ``"tsv"`` (docId, text) or ``"jsonl"``. Ids must be
    non-empty, whitespace-free and unique.
    """
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"unknown corpus format: {format!r}")
    seen: set[str] = set()
    for line_no, line in _decoded_lines(stream):
        if format == "tsv":
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(
                    f"expected 2 tab-separated columns, got {len(parts)}", line_no
                )
            doc_id, text = parts
        else:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON record: {exc.msg}", line_no) from exc
            if not isinstance(record, dict):
                raise ParseError("JSON record is not an object", line_no)
            doc_id = record.get("id")
            text = record.get("text")
            if not isinstance(doc_id, str) or not isinstance(text, str):
                raise ParseError('record must have string "id" and "text"', line_no)
        if not doc_id or _has_whitespace(doc_id):
            raise ParseError(f"bad document id: {doc_id!r}", line_no)
        if doc_id in seen:
            raise DuplicateIdError(f"duplicate document id: {doc_id}", line_no)
        seen.add(doc_id)
        yield Document(id=doc_id, text=text)


def parse_topics(stream: BinaryIO, format: str = "tsv2") -> Iterator[Topic]:
    """Parse topics; ``tsv2`` rows are (id, title), ``tsv3`` add a description."""
    if format not in ("tsv2", "tsv3"):
        raise ValueError(f"unknown topics format: {format!r}")
    want = 2 if format == "tsv2" else 3
    seen: set[str] = set()
    for line_no, line in _decoded_lines(stream):
        parts = line.split("\t")
        if len(parts) != want:
            raise ParseError(
                f"expected {want} tab-separated columns, got {len(parts)}", line_no
            )
        topic_id = parts[0]
        if not topic_id or _has_whitespace(topic_id):
            raise ParseError(f"bad topic id: {topic_id!r}", line_no)
        if topic_id in seen:
            raise DuplicateIdError(f"duplicate topic id: {topic_id}", line_no)
        seen.add(topic_id)
        if want == 2:
            yield Topic(id=topic_id, title=parts[1])
        else:
            yield Topic(id=topic_id, title=parts[1], description=parts[2])


def parse_qrels(stream: BinaryIO) -> QrelSet:
    """Parse whitespace-separated qrels lines ``topicId 0 docId grade``."""
    qrels = QrelSet()
    for line_no, line in _decoded_lines(stream):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 columns, got {len(parts)}", line_no)
        topic_id, _, doc_id, grade_str = parts
        if not (grade_str.isdigit() or (grade_str.startswith("-") and grade_str[1:].isdigit())):
            raise ParseError(f"grade is not an integer: {grade_str!r}", line_no)
        grade = int(grade_str)
        if grade < 0:
            raise ParseError(f"negative grade: {grade}", line_no)
        key = (topic_id, doc_id)
        if key in qrels.entries:
            raise DuplicateIdError(
                f"duplicate qrels entry for topic {topic_id}, doc {doc_id}", line_no
            )
        qrels.entries[key] = grade
    return qrels


def write_run(run: RunList, sink: BinaryIO) -> None:
    """Write a run in 6-column format; refuses runs violating invariants."""
    run.validate()
    for topic_id, entries in run.topics.items():
        for entry in entries:
            line = f"{topic_id} Q0 {entry.doc_id} {entry.rank} {entry.score:.6f} {run.tag}\n"
            sink.write(line.encode("utf-8"))


def parse_run(stream: BinaryIO) -> RunList:
    """Parse a 6-column run file, validating the RunList invariants."""
    topics: dict[str, list[RunEntry]] = {}
    tag: str | None = None
    for line_no, line in _decoded_lines(stream):
        parts = line.split()
        if len(parts) != 6:
            raise ParseError(f"expected 6 columns, got {len(parts)}", line_no)
        topic_id, _, doc_id, rank_str, score_str, line_tag = parts
        try:
            rank = int(rank_str)
        except ValueError as exc:
            raise ParseError(f"rank is not an integer: {rank_str!r}", line_no) from exc
        if rank < 1:
            raise ParseError(f"rank must be >= 1, got {rank}", line_no)
        try:
            score = float(score_str)
        except ValueError as exc:
            raise ParseError(f"score is not a number: {score_str!r}", line_no) from exc
        if not math.isfinite(score):
            raise ParseError(f"non-finite score: {score_str}", line_no)
        if tag is None:
            tag = line_tag
        elif line_tag != tag:
            raise ParseError(f"conflicting run tags {tag!r} and {line_tag!r}", line_no)
        entries = topics.setdefault(topic_id, [])
        if rank != len(entries) + 1:
            raise ParseError(
                f"topic {topic_id}: expected rank {len(entries) + 1}, got {rank}", line_no
            )
        if entries and score > entries[-1].score:
            raise ParseError(f"topic {topic_id}: score increases at rank {rank}", line_no)
        if any(e.doc_id == doc_id for e in entries):
            raise DuplicateIdError(f"topic {topic_id}: duplicate doc {doc_id}", line_no)
        entries.append(RunEntry(doc_id=doc_id, score=score, rank=rank))
    run = RunList(topics=topics, tag=tag if tag is not None else "run")
    run.validate()
    return run


def parse_train_instances(stream: BinaryIO) -> Iterator[TrainInstance]:
    """Parse TSV training instances ``query \\t document \\t label``."""
    for line_no, line in _decoded_lines(stream):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(parts)}", line_no)
        query_text, doc_text, label = parts
        if label not in (LABEL_POSITIVE, LABEL_NEGATIVE):
            raise ParseError(
                f"label must be {LABEL_POSITIVE!r} or {LABEL_NEGATIVE!r}, got {label!r}",
                line_no,
            )
        yield TrainInstance(query_text=query_text, doc_text=doc_text, label=label)


def write_train_instances(instances: Iterable[TrainInstance], sink: BinaryIO) -> None:
    for inst in instances:
        sink.write(f"{inst.query_text}\t{inst.doc_text}\t{inst.label}\n".encode("utf-8"))
