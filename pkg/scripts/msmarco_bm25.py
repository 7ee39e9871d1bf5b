#!/usr/bin/env python3
"""Full-data BM25 baseline on a user-supplied passage collection.

Expects the collection as TSV (docId \\t text), queries as 2-column TSV and
TREC qrels. With the MS MARCO passage dev set this reproduces the classic
BM25 MRR@10 of about .184 with the default k1=0.9, b=0.4. Hours-scale on
the full 8.8M-passage collection; not part of CI.
"""

import argparse
import time

from seqrank.analysis import AnalyzerConfig
from seqrank.bm25 import BM25Params, search
from seqrank.corpus import RunList, parse_corpus, parse_qrels, parse_topics, write_run
from seqrank.index import build_index
from seqrank.metrics import mrr_at_k


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", required=True, help="collection TSV")
    parser.add_argument("--topics", required=True, help="queries TSV (id, text)")
    parser.add_argument("--qrels", required=True)
    parser.add_argument("--k", type=int, default=1000)
    parser.add_argument("--k1", type=float, default=0.9)
    parser.add_argument("--b", type=float, default=0.4)
    parser.add_argument("--out", default="bm25_msmarco.run")
    args = parser.parse_args()

    started = time.perf_counter()
    analyzer = AnalyzerConfig()
    with open(args.corpus, "rb") as f:
        index = build_index(parse_corpus(f, "tsv"), analyzer)
    print(f"indexed {index.n_docs} documents in {time.perf_counter() - started:.0f}s")

    with open(args.topics, "rb") as f:
        topics = list(parse_topics(f, "tsv2"))
    params = BM25Params(k1=args.k1, b=args.b)
    run = RunList(tag="bm25")
    for i, topic in enumerate(topics):
        entries = search(index, params, analyzer, topic.title, args.k)
        if entries:
            run.topics[topic.id] = entries
        if (i + 1) % 500 == 0:
            print(f"  {i + 1}/{len(topics)} topics")
    with open(args.out, "wb") as sink:
        write_run(run, sink)
    print(f"wrote {args.out}")

    with open(args.qrels, "rb") as f:
        qrels = parse_qrels(f)
    report = mrr_at_k(run, qrels, 10)
    print(f"MRR@10 = {report.aggregate:.4f} over {report.n_topics} topics")


if __name__ == "__main__":
    main()
