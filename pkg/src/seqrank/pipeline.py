"""End-to-end experiment orchestration.

A pipeline run: parse corpus/topics/qrels, build the index, retrieve
candidates (BM25 or BM25+RM3) using topic titles, rerank candidates with a
configured scorer using the topic description (or title, per
``query_field``), then evaluate both runs and compare them with paired
t-tests. Stages fail loudly with the stage name, and partially written
outputs are removed.

Configuration is a TOML file mirroring :class:`PipelineConfig` field names
(see README for the schema).
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import BinaryIO, Callable, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analysis import AnalyzerConfig, analyze
from .bm25 import BM25Params, search, search_weighted
from .corpus import (
    QrelSet,
    RunList,
    Topic,
    TrainInstance,
    parse_corpus,
    parse_qrels,
    parse_topics,
    write_run,
)
from .index import InvertedIndex, build_index
from .metrics import (
    MetricReport,
    average_precision,
    mrr_at_k,
    ndcg_at_k,
    precision_at_k,
    write_report_json,
    write_report_tsv,
)
from .remote import RemoteScorer
from .rerank import OverlapScorer, Scorer, TargetWordConfig, WindowConfig, rerank
from .rm3 import rm3_expand
from .sampling import sample_balanced
from .stats import bonferroni_adjust, mean_ci95, paired_t_test

logger = logging.getLogger(__name__)

FIRST_STAGE_TAG = "firststage"
RERANKED_TAG = "seqrank"

METRIC_BUILDERS: dict[str, Callable[[RunList, QrelSet], MetricReport]] = {
    "mrr@10": lambda run, qrels: mrr_at_k(run, qrels, 10),
    "ap": average_precision,
    "p@20": lambda run, qrels: precision_at_k(run, qrels, 20),
    "ndcg@20": lambda run, qrels: ndcg_at_k(run, qrels, 20),
}


class PipelineConfigError(ValueError):
    """Configuration problem detected before any pipeline work starts."""


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"pipeline stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class ScorerSettings:
    kind: str = "overlap"  # "overlap" | "remote"
    endpoint: str | None = None
    batch_size: int = 32
    timeout: float = 30.0
    retries: int = 2


@dataclass(frozen=True)
class RM3Settings:
    fb_docs: int = 10
    fb_terms: int = 10
    orig_weight: float = 0.5


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str = ""
    corpus_format: str = "tsv"
    topics: str = ""
    topics_format: str = "tsv3"
    qrels: str | None = None
    evaluate: bool = True
    first_stage: str = "bm25"  # "bm25" | "bm25_rm3"
    k: int = 1000
    query_field: str = "auto"  # reranker query source: title | description | auto
    seed: int = 0
    output_dir: str = "out"
    target: TargetWordConfig = field(default_factory=TargetWordConfig)
    window: WindowConfig = field(default_factory=WindowConfig)
    scorer: ScorerSettings = field(default_factory=ScorerSettings)
    rm3: RM3Settings = field(default_factory=RM3Settings)


def load_config(path: str | Path, **overrides) -> PipelineConfig:
    """Read a TOML pipeline config; keyword arguments override file values."""
    with open(path, "rb") as f:
        raw = tomllib.load(f)
    return config_from_dict(raw, **overrides)


def config_from_dict(raw: dict, **overrides) -> PipelineConfig:
    data = dict(raw)
    data.update({k: v for k, v in overrides.items() if v is not None})
    kwargs: dict = {}
    plain_fields = {
        "corpus", "corpus_format", "topics", "topics_format", "qrels", "evaluate",
        "first_stage", "k", "query_field", "seed", "output_dir",
    }
    for name in plain_fields & set(data):
        kwargs[name] = data[name]
    if "target" in data:
        kwargs["target"] = (
            data["target"]
            if isinstance(data["target"], TargetWordConfig)
            else TargetWordConfig(**data["target"])
        )
    if "window" in data:
        kwargs["window"] = (
            data["window"]
            if isinstance(data["window"], WindowConfig)
            else WindowConfig(**data["window"])
        )
    if "scorer" in data:
        kwargs["scorer"] = (
            data["scorer"]
            if isinstance(data["scorer"], ScorerSettings)
            else ScorerSettings(**data["scorer"])
        )
    if "rm3" in data:
        kwargs["rm3"] = (
            data["rm3"] if isinstance(data["rm3"], RM3Settings) else RM3Settings(**data["rm3"])
        )
    unknown = set(data) - plain_fields - {"target", "window", "scorer", "rm3"}
    if unknown:
        raise PipelineConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return PipelineConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise PipelineConfigError(str(exc)) from exc


@dataclass
class PipelineResult:
    first_stage_run: RunList
    reranked_run: RunList
    reports: dict[str, dict[str, MetricReport]]  # tag -> metric -> report
    comparison: dict[str, dict] | None
    output_files: list[Path]


def build_scorer(settings: ScorerSettings, analyzer: AnalyzerConfig) -> Scorer:
    if settings.kind == "overlap":
        return OverlapScorer(cfg=analyzer)
    if settings.kind == "remote":
        if not settings.endpoint:
            raise PipelineConfigError("remote scorer requires an endpoint")
        return RemoteScorer(
            endpoint=settings.endpoint,
            batch_size=settings.batch_size,
            timeout=settings.timeout,
            retries=settings.retries,
        )
    raise PipelineConfigError(f"unknown scorer kind: {settings.kind!r}")


def _validate_config(cfg: PipelineConfig) -> None:
    if not cfg.corpus:
        raise PipelineConfigError("corpus path is required")
    if not cfg.topics:
        raise PipelineConfigError("topics path is required")
    if cfg.evaluate and not cfg.qrels:
        raise PipelineConfigError("evaluation requested but no qrels path configured")
    if cfg.k < 1:
        raise PipelineConfigError(f"candidate depth k must be >= 1, got {cfg.k}")
    if cfg.first_stage not in ("bm25", "bm25_rm3"):
        raise PipelineConfigError(f"unknown first stage: {cfg.first_stage!r}")
    if cfg.query_field not in ("title", "description", "auto"):
        raise PipelineConfigError(f"unknown query_field: {cfg.query_field!r}")
    if cfg.scorer.kind == "remote" and not cfg.scorer.endpoint:
        raise PipelineConfigError("remote scorer requires an endpoint")
    if cfg.scorer.kind not in ("overlap", "remote"):
        raise PipelineConfigError(f"unknown scorer kind: {cfg.scorer.kind!r}")
    for label, path in (("corpus", cfg.corpus), ("topics", cfg.topics)):
        if not Path(path).is_file():
            raise PipelineConfigError(f"{label} file not found: {path}")
    if cfg.evaluate and cfg.qrels and not Path(cfg.qrels).is_file():
        raise PipelineConfigError(f"qrels file not found: {cfg.qrels}")


def reranker_query(topic: Topic, query_field: str) -> str:
    if query_field == "title":
        return topic.title
    if query_field == "description":
        return topic.description
    return topic.description if topic.description else topic.title


def first_stage_entries(
    index: InvertedIndex,
    params: BM25Params,
    analyzer: AnalyzerConfig,
    cfg: PipelineConfig,
    query_text: str,
):
    if cfg.first_stage == "bm25":
        return search(index, params, analyzer, query_text, cfg.k)
    wq = rm3_expand(
        index,
        params,
        analyzer,
        query_text,
        fb_docs=cfg.rm3.fb_docs,
        fb_terms=cfg.rm3.fb_terms,
        orig_weight=cfg.rm3.orig_weight,
    )
    return search_weighted(index, params, analyzer, wq, cfg.k)


def evaluate_run(run: RunList, qrels: QrelSet) -> dict[str, MetricReport]:
    return {name: builder(run, qrels) for name, builder in METRIC_BUILDERS.items()}


def compare_reports(
    reports_a: dict[str, MetricReport],
    reports_b: dict[str, MetricReport],
    comparisons: int | None = None,
) -> dict[str, dict]:
    """Paired t-tests per metric; Bonferroni over the number of metrics."""
    m = comparisons if comparisons is not None else len(reports_a)
    out: dict[str, dict] = {}
    for name, report_a in reports_a.items():
        report_b = reports_b[name]
        result = paired_t_test(report_a.per_topic, report_b.per_topic)
        out[name] = {
            "mean_a": report_a.aggregate,
            "mean_b": report_b.aggregate,
            "t": result.t,
            "df": result.df,
            "p": result.p,
            "p_bonferroni": bonferroni_adjust(result.p, m),
            "n": result.n,
        }
    return out


def run_pipeline(cfg: PipelineConfig, params: BM25Params | None = None) -> PipelineResult:
    """Execute the full two-stage pipeline described by ``cfg``.

    With the overlap scorer the procedure is fully deterministic: rerunning
    the same configuration reproduces every output file byte for byte.
    """
    _validate_config(cfg)
    analyzer = AnalyzerConfig()
    params = params or BM25Params()
    written: list[Path] = []

    def fail(stage: str, exc: Exception) -> PipelineError:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        return PipelineError(stage, exc)

    stage = "load"
    try:
        with open(cfg.corpus, "rb") as f:
            documents = list(parse_corpus(f, cfg.corpus_format))
        with open(cfg.topics, "rb") as f:
            topics = list(parse_topics(f, cfg.topics_format))
        qrels = None
        if cfg.evaluate and cfg.qrels:
            with open(cfg.qrels, "rb") as f:
                qrels = parse_qrels(f)
    except Exception as exc:
        raise fail(stage, exc) from exc

    stage = "index"
    try:
        index = build_index(documents, analyzer)
    except Exception as exc:
        raise fail(stage, exc) from exc

    stage = "first_stage"
    try:
        first_run = RunList(tag=FIRST_STAGE_TAG)
        for topic in topics:
            if not analyze(topic.title, analyzer):
                logger.warning("topic %s title analyzes to no terms; skipped", topic.id)
                continue
            entries = first_stage_entries(index, params, analyzer, cfg, topic.title)
            if entries:
                first_run.topics[topic.id] = entries
    except Exception as exc:
        raise fail(stage, exc) from exc

    out_dir = Path(cfg.output_dir)
    stage = "write_first_stage"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        first_path = out_dir / "firststage.run"
        with first_path.open("wb") as sink:
            write_run(first_run, sink)
        written.append(first_path)
    except Exception as exc:
        raise fail(stage, exc) from exc

    stage = "rerank"
    try:
        scorer = build_scorer(cfg.scorer, analyzer)
        lookup = {doc.id: doc for doc in documents}
        topic_by_id = {topic.id: topic for topic in topics}
        reranked = RunList(tag=RERANKED_TAG)
        for topic_id, entries in first_run.topics.items():
            query_text = reranker_query(topic_by_id[topic_id], cfg.query_field)
            reranked.topics[topic_id] = rerank(
                entries, query_text, lookup, scorer, cfg.target, cfg.window
            )
        reranked_path = out_dir / "seqrank.run"
        with reranked_path.open("wb") as sink:
            write_run(reranked, sink)
        written.append(reranked_path)
    except Exception as exc:
        raise fail(stage, exc) from exc

    reports: dict[str, dict[str, MetricReport]] = {}
    comparison = None
    if qrels is not None:
        stage = "evaluate"
        try:
            reports[FIRST_STAGE_TAG] = evaluate_run(first_run, qrels)
            reports[RERANKED_TAG] = evaluate_run(reranked, qrels)
            for tag, tag_reports in reports.items():
                for name, report in tag_reports.items():
                    stem = f"{tag}_{name.replace('@', '')}"
                    tsv_path = out_dir / f"{stem}.tsv"
                    with tsv_path.open("wb") as sink:
                        write_report_tsv(report, sink)
                    written.append(tsv_path)
                    json_path = out_dir / f"{stem}.json"
                    with json_path.open("wb") as sink:
                        write_report_json(report, sink)
                    written.append(json_path)
            comparison = compare_reports(reports[RERANKED_TAG], reports[FIRST_STAGE_TAG])
            comparison_path = out_dir / "comparison.json"
            comparison_path.write_bytes(
                json.dumps(comparison, indent=2).encode("utf-8") + b"\n"
            )
            written.append(comparison_path)
        except Exception as exc:
            raise fail(stage, exc) from exc

    return PipelineResult(
        first_stage_run=first_run,
        reranked_run=reranked,
        reports=reports,
        comparison=comparison,
        output_files=written,
    )


# ---------------------------------------------------------------------------
# Target-word probing harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbingConfig:
    name: str
    target: TargetWordConfig


def probing_suite() -> list[ProbingConfig]:
    """The six target-word configurations exercised by the probing harness."""
    return [
        ProbingConfig("Baseline", TargetWordConfig("true", "false")),
        ProbingConfig("Reverse", TargetWordConfig("false", "true")),
        ProbingConfig("Antonyms", TargetWordConfig("hot", "cold")),
        ProbingConfig("RelatedWords", TargetWordConfig("apple", "orange")),
        ProbingConfig("UnrelatedWords", TargetWordConfig("hot", "orange")),
        ProbingConfig("Subwords", TargetWordConfig("▁ab", "▁de")),
    ]


@dataclass
class ProbingRow:
    name: str
    positive: str
    negative: str
    mean: float
    ci_half_width: float | None  # None when trials < 2
    values: list[float]


@dataclass
class ProbingReport:
    metric: str
    trials: int
    rows: list[ProbingRow]


TrainerHook = Callable[[ProbingConfig, int, list[TrainInstance]], None]


def run_probing(
    base_cfg: PipelineConfig,
    suite: Sequence[ProbingConfig] | None = None,
    trials: int = 5,
    metric: str = "mrr@10",
    train_pool: Sequence[TrainInstance] | None = None,
    n_pos: int = 0,
    n_neg: int = 0,
    trainer: TrainerHook | None = None,
) -> ProbingReport:
    """Run the pipeline for every probing config x trial and tabulate results.

    Trial i uses seed ``base_cfg.seed + i``. When a training pool is given,
    a balanced sample is drawn per trial with that seed and handed to the
    ``trainer`` hook (if any) before the pipeline runs; with the built-in
    overlap scorer this only exercises the sampling plumbing. A failing
    trial aborts the whole suite.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if metric not in METRIC_BUILDERS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRIC_BUILDERS)}")
    if not base_cfg.evaluate:
        raise PipelineConfigError("probing needs evaluation enabled (qrels configured)")
    suite = list(suite) if suite is not None else probing_suite()
    names = [probe.name for probe in suite]
    if len(set(names)) != len(names):
        raise ValueError(f"probing config names must be unique, got {names}")

    rows: list[ProbingRow] = []
    base_out = Path(base_cfg.output_dir)
    for probe in suite:
        values: list[float] = []
        for trial in range(trials):
            seed = base_cfg.seed + trial
            if train_pool is not None:
                sample = sample_balanced(train_pool, n_pos, n_neg, seed)
                if trainer is not None:
                    trainer(probe, trial, sample)
            trial_dir = base_out / probe.name.lower() / f"trial{trial}"
            cfg = replace(
                base_cfg, seed=seed, target=probe.target, output_dir=str(trial_dir)
            )
            result = run_pipeline(cfg)
            values.append(result.reports[RERANKED_TAG][metric].aggregate)
        if trials >= 2:
            mean, half = mean_ci95(values)
        else:
            mean, half = values[0], None
        rows.append(
            ProbingRow(
                name=probe.name,
                positive=probe.target.positive,
                negative=probe.target.negative,
                mean=mean,
                ci_half_width=half,
                values=values,
            )
        )
    return ProbingReport(metric=metric, trials=trials, rows=rows)


def write_probing_tsv(report: ProbingReport, sink: BinaryIO) -> None:
    sink.write(b"name\tpositive\tnegative\tmean\tci95_half_width\n")
    for row in report.rows:
        half = "n/a" if row.ci_half_width is None else f"{row.ci_half_width:.6f}"
        sink.write(
            f"{row.name}\t{row.positive}\t{row.negative}\t{row.mean:.6f}\t{half}\n".encode(
                "utf-8"
            )
        )


def probing_report_dict(report: ProbingReport) -> dict:
    return {
        "metric": report.metric,
        "trials": report.trials,
        "rows": [
            {
                "name": row.name,
                "positive": row.positive,
                "negative": row.negative,
                "mean": row.mean,
                "ci95_half_width": row.ci_half_width,
                "values": row.values,
            }
            for row in report.rows
        ],
    }
