"""Synthetic ranking benchmark generator.

Builds a small deterministic corpus where bag-of-words retrieval is
beatable by design: for most topics a short "distractor" document repeats
a subset of the query terms (high tf, short length) while the genuinely
relevant document buries all query terms in one sentence of a long
document. BM25 prefers the distractor; a term-overlap reranker working on
sentence windows recovers the relevant document.

Expected first-stage rankings ship with the fixture, recomputed here by a
direct brute-force pass over raw token counts (independent of the index
and search implementations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import AnalyzerConfig, analyze
from .corpus import Document, QrelSet, Topic
from .sampling import SplitMix64


@dataclass
class SyntheticFixture:
    documents: list[Document]
    topics: list[Topic]
    qrels: QrelSet
    answer_doc: dict[str, str]  # topic id -> relevant doc id
    distractor_doc: dict[str, str]  # topic id -> judged non-relevant doc id
    expected_first_stage: dict[str, list[str]]  # brute-force BM25 ranking
    inversion_topics: list[str] = field(default_factory=list)


def _bruteforce_bm25_ranking(
    doc_tokens: dict[str, list[str]], query_terms: list[str], k1: float, b: float
) -> list[str]:
    """Rank documents for one query straight from raw token lists."""
    n = len(doc_tokens)
    avgdl = sum(len(toks) for toks in doc_tokens.values()) / n
    df: dict[str, int] = {}
    for toks in doc_tokens.values():
        for term in set(toks):
            df[term] = df.get(term, 0) + 1
    scored: list[tuple[float, str]] = []
    for doc_id, toks in doc_tokens.items():
        score = 0.0
        for term in query_terms:
            tf = toks.count(term)
            if tf == 0:
                continue
            idf = math.log(1.0 + (n - df[term] + 0.5) / (df[term] + 0.5))
            norm = k1 * (1.0 - b + b * len(toks) / avgdl)
            score += idf * tf * (k1 + 1.0) / (tf + norm)
        if score > 0.0:
            scored.append((score, doc_id))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [doc_id for _, doc_id in scored]


def generate_fixture(
    n_topics: int = 20,
    n_inversions: int = 15,
    n_fillers: int = 160,
    seed: int = 13,
    terms_per_query: int = 4,
    cfg: AnalyzerConfig | None = None,
    k1: float = 0.9,
    b: float = 0.4,
) -> SyntheticFixture:
    if n_inversions > n_topics:
        raise ValueError("cannot have more inversion topics than topics")
    if cfg is None:
        cfg = AnalyzerConfig()
    rng = SplitMix64(seed)
    letters = "abcdefghij"[:terms_per_query]

    documents: list[Document] = []
    topics: list[Topic] = []
    qrels = QrelSet()
    answer_doc: dict[str, str] = {}
    distractor_doc: dict[str, str] = {}

    for i in range(n_topics):
        topic_id = f"q{i:02d}"
        terms = [f"kw{i}{c}" for c in letters]
        title = " ".join(terms)
        description = f"Find passages covering {' '.join(terms)}."
        topics.append(Topic(id=topic_id, title=title, description=description))

        ans_id = f"ans{i:03d}"
        dis_id = f"dis{i:03d}"
        answer_doc[topic_id] = ans_id
        distractor_doc[topic_id] = dis_id
        if i < n_inversions:
            # Long document: the query terms share one sentence deep inside.
            n_sentences = 30
            hit_at = 18 + rng.randbelow(8)  # within the last two windows
            sentences = []
            for j in range(n_sentences):
                if j == hit_at:
                    sentences.append(" ".join(terms) + ".")
                else:
                    sentences.append(f"pad{i}x{j} pad{i}y{j} pad{i}z{j}.")
            ans_text = " ".join(sentences)
        else:
            ans_text = f"{' '.join(terms)}. pad{i}x0 pad{i}y0."
        documents.append(Document(id=ans_id, text=ans_text))

        # Two of the query terms, repeated; short, so BM25 likes it.
        dis_terms = (terms[0] + " ") * 4 + (terms[1] + " ") * 4
        documents.append(Document(id=dis_id, text=dis_terms.strip() + "."))

        qrels.entries[(topic_id, ans_id)] = 1
        qrels.entries[(topic_id, dis_id)] = 0

    for j in range(n_fillers):
        n_tokens = 12 + rng.randbelow(13)
        words = [f"jnk{j}w{t}" for t in range(n_tokens)]
        # Break fillers into short sentences so they segment like prose.
        sentences = [
            " ".join(words[s : s + 5]) + "." for s in range(0, len(words), 5)
        ]
        documents.append(Document(id=f"fil{j:03d}", text=" ".join(sentences)))

    doc_tokens = {doc.id: analyze(doc.text, cfg) for doc in documents}
    expected: dict[str, list[str]] = {}
    inversions: list[str] = []
    for topic in topics:
        ranking = _bruteforce_bm25_ranking(
            doc_tokens, analyze(topic.title, cfg), k1, b
        )
        expected[topic.id] = ranking
        ans, dis = answer_doc[topic.id], distractor_doc[topic.id]
        if dis in ranking and ans in ranking and ranking.index(dis) < ranking.index(ans):
            inversions.append(topic.id)
    if len(inversions) < n_inversions:
        raise AssertionError(
            f"fixture construction produced {len(inversions)} BM25 inversions, "
            f"expected at least {n_inversions}"
        )

    return SyntheticFixture(
        documents=documents,
        topics=topics,
        qrels=qrels,
        answer_doc=answer_doc,
        distractor_doc=distractor_doc,
        expected_first_stage=expected,
        inversion_topics=inversions,
    )


def write_fixture_files(fixture: SyntheticFixture, out_dir: str | Path) -> dict[str, Path]:
    """Write corpus.tsv, topics.tsv and qrels.txt; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.tsv"
    topics_path = out / "topics.tsv"
    qrels_path = out / "qrels.txt"
    with corpus_path.open("wb") as sink:
        for doc in fixture.documents:
            sink.write(f"{doc.id}\t{doc.text}\n".encode("utf-8"))
    with topics_path.open("wb") as sink:
        for topic in fixture.topics:
            sink.write(
                f"{topic.id}\t{topic.title}\t{topic.description}\n".encode("utf-8")
            )
    with qrels_path.open("wb") as sink:
        for (topic_id, doc_id), grade in fixture.qrels.entries.items():
            sink.write(f"{topic_id} 0 {doc_id} {grade}\n".encode("utf-8"))
    return {"corpus": corpus_path, "topics": topics_path, "qrels": qrels_path}
