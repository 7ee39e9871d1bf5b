"""Command-line interface.

Subcommands: index, search, expand-search, rerank, evaluate, compare,
sample, probe, pipeline. Exit codes: 0 success, 1 usage error, 2 runtime
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analysis import AnalyzerConfig
from .bm25 import BM25Params, search, search_weighted
from .corpus import (
    ParseError,
    RunList,
    parse_corpus,
    parse_qrels,
    parse_run,
    parse_topics,
    parse_train_instances,
    write_run,
    write_train_instances,
)
from .index import IndexFormatError, build_index, load_index, save_index
from .pipeline import (
    METRIC_BUILDERS,
    PipelineConfigError,
    PipelineError,
    ScorerSettings,
    build_scorer,
    compare_reports,
    load_config,
    probing_report_dict,
    reranker_query,
    run_pipeline,
    run_probing,
    write_probing_tsv,
)
from .remote import RemoteScoringError
from .rerank import TargetWordConfig, WindowConfig, rerank
from .rm3 import rm3_expand

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _load_index_or_corpus(args):
    if getattr(args, "index", None):
        with open(args.index, "rb") as f:
            return load_index(f)
    with open(args.corpus, "rb") as f:
        return build_index(parse_corpus(f, args.corpus_format), AnalyzerConfig())


def _read_topics(args):
    with open(args.topics, "rb") as f:
        return list(parse_topics(f, args.topics_format))


def _write_run_file(run: RunList, path: str) -> None:
    with open(path, "wb") as sink:
        write_run(run, sink)
    logger.info("wrote %s", path)


def _cmd_index(args) -> int:
    with open(args.corpus, "rb") as f:
        index = build_index(parse_corpus(f, args.corpus_format), AnalyzerConfig())
    with open(args.out, "wb") as sink:
        save_index(index, sink)
    print(f"indexed {index.n_docs} documents, {len(index.postings)} terms -> {args.out}")
    return 0


def _cmd_search(args) -> int:
    index = _load_index_or_corpus(args)
    topics = _read_topics(args)
    params = BM25Params(k1=args.k1, b=args.b)
    analyzer = AnalyzerConfig()
    run = RunList(tag=args.tag)
    for topic in topics:
        entries = search(index, params, analyzer, topic.title, args.k)
        if entries:
            run.topics[topic.id] = entries
    _write_run_file(run, args.out)
    print(f"searched {len(topics)} topics -> {args.out}")
    return 0


def _cmd_expand_search(args) -> int:
    index = _load_index_or_corpus(args)
    topics = _read_topics(args)
    params = BM25Params(k1=args.k1, b=args.b)
    analyzer = AnalyzerConfig()
    run = RunList(tag=args.tag)
    for topic in topics:
        wq = rm3_expand(
            index,
            params,
            analyzer,
            topic.title,
            fb_docs=args.fb_docs,
            fb_terms=args.fb_terms,
            orig_weight=args.orig_weight,
        )
        entries = search_weighted(index, params, analyzer, wq, args.k)
        if entries:
            run.topics[topic.id] = entries
    _write_run_file(run, args.out)
    print(f"expanded and searched {len(topics)} topics -> {args.out}")
    return 0


def _cmd_rerank(args) -> int:
    with open(args.run, "rb") as f:
        first_run = parse_run(f)
    with open(args.corpus, "rb") as f:
        lookup = {doc.id: doc for doc in parse_corpus(f, args.corpus_format)}
    topics = {t.id: t for t in _read_topics(args)}
    target = TargetWordConfig(positive=args.positive, negative=args.negative)
    window = WindowConfig(size=args.window_size, stride=args.window_stride)
    settings = ScorerSettings(
        kind=args.scorer,
        endpoint=args.endpoint,
        batch_size=args.batch_size,
        timeout=args.timeout,
        retries=args.retries,
    )
    scorer = build_scorer(settings, AnalyzerConfig())
    out_run = RunList(tag=args.tag)
    for topic_id, entries in first_run.topics.items():
        if topic_id not in topics:
            raise KeyError(f"run topic {topic_id} missing from topics file")
        query_text = reranker_query(topics[topic_id], args.query_field)
        out_run.topics[topic_id] = rerank(
            entries[: args.depth] if args.depth else entries,
            query_text,
            lookup,
            scorer,
            target,
            window,
        )
    _write_run_file(out_run, args.out)
    print(f"reranked {len(out_run.topics)} topics -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    with open(args.run, "rb") as f:
        run = parse_run(f)
    with open(args.qrels, "rb") as f:
        qrels = parse_qrels(f)
    names = list(METRIC_BUILDERS) if args.metric == "all" else [args.metric]
    summary = {}
    for name in names:
        report = METRIC_BUILDERS[name](run, qrels)
        summary[name] = {
            "aggregate": report.aggregate,
            "nTopics": report.n_topics,
            "excludedTopics": report.excluded_topics,
        }
        if args.per_topic:
            for topic_id, value in report.per_topic.items():
                print(f"{name}\t{topic_id}\t{value:.6f}")
        print(f"{name}\tall\t{report.aggregate:.6f}")
    if args.out:
        Path(args.out).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_compare(args) -> int:
    with open(args.run_a, "rb") as f:
        run_a = parse_run(f)
    with open(args.run_b, "rb") as f:
        run_b = parse_run(f)
    with open(args.qrels, "rb") as f:
        qrels = parse_qrels(f)
    names = list(METRIC_BUILDERS) if args.metric == "all" else [args.metric]
    reports_a = {name: METRIC_BUILDERS[name](run_a, qrels) for name in names}
    reports_b = {name: METRIC_BUILDERS[name](run_b, qrels) for name in names}
    comparison = compare_reports(reports_a, reports_b, comparisons=args.comparisons)
    print(json.dumps(comparison, indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(comparison, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_sample(args) -> int:
    from .sampling import sample_balanced

    with open(args.instances, "rb") as f:
        pool = list(parse_train_instances(f))
    seed = args.seed if args.seed is not None else 0
    sample = sample_balanced(pool, args.n_pos, args.n_neg, seed)
    with open(args.out, "wb") as sink:
        write_train_instances(sample, sink)
    print(f"sampled {args.n_pos}+{args.n_neg} instances -> {args.out}")
    return 0


def _cmd_pipeline(args) -> int:
    cfg = load_config(args.config, seed=args.seed, output_dir=args.output_dir)
    result = run_pipeline(cfg)
    for path in result.output_files:
        print(f"wrote {path}")
    if result.comparison:
        print(json.dumps(result.comparison, indent=2))
    return 0


def _cmd_probe(args) -> int:
    cfg = load_config(args.config, seed=args.seed, output_dir=args.output_dir)
    train_pool = None
    if args.train_pool:
        with open(args.train_pool, "rb") as f:
            train_pool = list(parse_train_instances(f))
    report = run_probing(
        cfg,
        trials=args.trials,
        metric=args.metric,
        train_pool=train_pool,
        n_pos=args.n_pos,
        n_neg=args.n_neg,
    )
    out_path = Path(cfg.output_dir) / "probing.tsv"
    with out_path.open("wb") as sink:
        write_probing_tsv(report, sink)
    print(json.dumps(probing_report_dict(report), indent=2))
    print(f"wrote {out_path}")
    return 0


def _add_corpus_args(p: argparse.ArgumentParser, with_index: bool = True) -> None:
    if with_index:
        p.add_argument("--index", help="binary index file (alternative to --corpus)")
    p.add_argument("--corpus", help="corpus file")
    p.add_argument("--corpus-format", default="tsv", choices=["tsv", "jsonl"])


def _add_topics_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topics", required=True)
    p.add_argument("--topics-format", default="tsv2", choices=["tsv2", "tsv3"])


def _add_bm25_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k1", type=float, default=0.9)
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--k", type=int, default=1000, help="retrieval depth")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqrank", description=__doc__)
    parser.add_argument("--seed", type=int, default=None, help="override configured seed")
    parser.add_argument("--config", default=None, help="TOML pipeline config path")
    parser.add_argument("--output-dir", default=None, help="override configured output dir")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="build and save a binary index")
    _add_corpus_args(p, with_index=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_index, needs_corpus=True)

    p = sub.add_parser("search", help="BM25 retrieval over topic titles")
    _add_corpus_args(p)
    _add_topics_args(p)
    _add_bm25_args(p)
    p.add_argument("--tag", default="firststage")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("expand-search", help="BM25+RM3 retrieval over topic titles")
    _add_corpus_args(p)
    _add_topics_args(p)
    _add_bm25_args(p)
    p.add_argument("--fb-docs", type=int, default=10)
    p.add_argument("--fb-terms", type=int, default=10)
    p.add_argument("--orig-weight", type=float, default=0.5)
    p.add_argument("--tag", default="firststage")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_expand_search)

    p = sub.add_parser("rerank", help="rerank an existing run with a scorer")
    p.add_argument("--run", required=True, help="input run file")
    _add_corpus_args(p, with_index=False)
    _add_topics_args(p)
    p.add_argument("--scorer", default="overlap", choices=["overlap", "remote"])
    p.add_argument("--endpoint", default=None)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--retries", type=int, default=2)
    p.add_argument("--positive", default="true")
    p.add_argument("--negative", default="false")
    p.add_argument("--window-size", type=int, default=10)
    p.add_argument("--window-stride", type=int, default=5)
    p.add_argument("--query-field", default="auto", choices=["title", "description", "auto"])
    p.add_argument("--depth", type=int, default=None, help="rerank only the top N candidates")
    p.add_argument("--tag", default="seqrank")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rerank)

    p = sub.add_parser("evaluate", help="compute metrics for a run")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--metric", default="all", choices=["all", *METRIC_BUILDERS])
    p.add_argument("--per-topic", action="store_true")
    p.add_argument("--out", default=None, help="write a JSON summary here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="paired t-test between two runs")
    p.add_argument("--run-a", required=True)
    p.add_argument("--run-b", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--metric", default="all", choices=["all", *METRIC_BUILDERS])
    p.add_argument(
        "--comparisons",
        type=int,
        default=None,
        help="Bonferroni correction count (defaults to the number of metrics)",
    )
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sample", help="class-balanced training-instance sampling")
    p.add_argument("--instances", required=True, help="TSV pool of query/doc/label")
    p.add_argument("--n-pos", type=int, required=True)
    p.add_argument("--n-neg", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("probe", help="run the target-word probing suite")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--metric", default="mrr@10", choices=list(METRIC_BUILDERS))
    p.add_argument("--train-pool", default=None)
    p.add_argument("--n-pos", type=int, default=0)
    p.add_argument("--n-neg", type=int, default=0)
    p.set_defaults(func=_cmd_probe, needs_config=True)

    p = sub.add_parser("pipeline", help="run the full two-stage pipeline from a config")
    p.set_defaults(func=_cmd_pipeline, needs_config=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    if getattr(args, "needs_config", False) and not args.config:
        parser.error(f"--config is required for {args.command!r}")
    if args.command in ("search", "expand-search") and not (args.index or args.corpus):
        parser.error("one of --index or --corpus is required")
    if args.command in ("index", "rerank") and not args.corpus:
        parser.error("--corpus is required")
    try:
        return args.func(args)
    except (
        ParseError,
        IndexFormatError,
        PipelineConfigError,
        PipelineError,
        RemoteScoringError,
        ValueError,
        KeyError,
        OSError,
    ) as exc:
        sys.stderr.write(f"seqrank: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
