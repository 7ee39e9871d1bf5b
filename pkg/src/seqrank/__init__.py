"""Two-stage document ranking toolkit.

Bag-of-words candidate retrieval (BM25, optionally RM3-expanded), second
stage reranking by two-way softmax over target-token logits with sliding
window segmentation and max aggregation, plus evaluation metrics and
significance testing.
"""

from .analysis import AnalyzerConfig, DEFAULT_STOPWORDS, analyze, porter_stem
from .bm25 import BM25Params, WeightedQuery, bm25_score, search, search_weighted
from .corpus import (
    Document,
    ParseError,
    QrelSet,
    RunEntry,
    RunList,
    Topic,
    TrainInstance,
    parse_corpus,
    parse_qrels,
    parse_run,
    parse_topics,
    write_run,
)
from .index import InvertedIndex, build_index, load_index, save_index
from .metrics import (
    MetricReport,
    average_precision,
    mrr_at_k,
    ndcg_at_k,
    precision_at_k,
)
from .pipeline import (
    PipelineConfig,
    ProbingConfig,
    probing_suite,
    run_pipeline,
    run_probing,
)
from .remote import RemoteScorer, remote_score_batch
from .rerank import (
    OverlapScorer,
    Passage,
    ScoreRecord,
    Scorer,
    TargetWordConfig,
    WindowConfig,
    make_passages,
    overlap_score,
    relevance_prob,
    render_prompt,
    rerank,
    score_document,
    split_sentences,
)
from .rm3 import rm3_expand
from .sampling import SplitMix64, sample_balanced
from .stats import (
    TTestResult,
    bonferroni_adjust,
    mean_ci95,
    paired_t_test,
    student_t_cdf,
    student_t_quantile,
)

__version__ = "0.1.0"
