import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqrank.corpus import Document, RunEntry
from seqrank.rerank import (
    OverlapScorer,
    ScoringError,
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

from conftest import PLAIN

TARGET = TargetWordConfig()


class TestRenderPrompt:
    def test_exact_template(self):
        assert render_prompt("who?", "a doc") == "Query: who? Document: a doc Relevant:"

    def test_empty_substitution(self):
        assert render_prompt("", "") == "Query:  Document:  Relevant:"

    def test_no_escaping(self):
        prompt = render_prompt("Document: sneaky", "x")
        assert prompt == "Query: Document: sneaky Document: x Relevant:"


class TestRelevanceProb:
    def test_symmetry_at_zero(self):
        assert relevance_prob(0.0, 0.0) == 0.5

    def test_known_value(self):
        assert relevance_prob(2.0, 0.0) == pytest.approx(0.880797, abs=1e-6)
        assert relevance_prob(2.0, 0.0) == pytest.approx(1 / (1 + math.exp(-2)))

    def test_large_gap_is_stable(self):
        p = relevance_prob(1000.0, 0.0)
        assert p >= 1 - 1e-12
        q = relevance_prob(0.0, 1000.0)
        assert 0.0 <= q <= 1e-12

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            relevance_prob(math.inf, 0.0)
        with pytest.raises(ValueError):
            relevance_prob(0.0, math.nan)

    @given(
        st.floats(-500, 500, allow_nan=False),
        st.floats(-500, 500, allow_nan=False),
    )
    def test_complement_sums_to_one(self, a, b):
        assert relevance_prob(a, b) + relevance_prob(b, a) == pytest.approx(1.0, abs=1e-12)

    @given(
        st.floats(-100, 100, allow_nan=False),
        st.floats(-100, 100, allow_nan=False),
        st.floats(-50, 50, allow_nan=False),
    )
    def test_shift_invariance(self, a, b, c):
        assert relevance_prob(a + c, b + c) == pytest.approx(
            relevance_prob(a, b), abs=1e-9
        )

    def test_ordering_matches_logit_difference(self):
        # Logits bounded so the softmax stays strictly monotone in float64.
        rng = random.Random(7)
        pairs = [(rng.uniform(-15, 15), rng.uniform(-15, 15)) for _ in range(1000)]
        by_prob = sorted(range(1000), key=lambda i: relevance_prob(*pairs[i]))
        by_diff = sorted(range(1000), key=lambda i: pairs[i][0] - pairs[i][1])
        assert by_prob == by_diff


class TestSplitSentences:
    def test_terminators(self):
        assert split_sentences("A. B? C!") == ["A.", "B?", "C!"]

    def test_no_terminator(self):
        assert split_sentences("no terminator here") == ["no terminator here"]

    def test_whitespace_collapsed(self):
        assert split_sentences("x.   y.") == ["x.", "y."]

    def test_empty_and_whitespace(self):
        assert split_sentences("") == []
        assert split_sentences("   \n ") == []

    def test_terminator_without_space_keeps_going(self):
        assert split_sentences("e.g.the end") == ["e.g.the end"]

    def test_newlines_split_too(self):
        assert split_sentences("One.\nTwo!") == ["One.", "Two!"]


class TestMakePassages:
    def test_twelve_sentences(self):
        sents = [f"s{i}." for i in range(12)]
        passages = make_passages(sents, size=10, stride=5)
        assert [p.sentence_span for p in passages] == [(0, 9), (5, 11)]

    def test_short_document(self):
        passages = make_passages(["a.", "b.", "c."], size=10, stride=5)
        assert [p.sentence_span for p in passages] == [(0, 2)]

    def test_twenty_five_sentences(self):
        passages = make_passages([f"s{i}." for i in range(25)], size=10, stride=5)
        assert [p.sentence_span[0] for p in passages] == [0, 5, 10, 15]
        assert passages[-1].sentence_span == (15, 24)

    def test_empty_input(self):
        assert make_passages([], size=10, stride=5) == []

    def test_window_count_formula_exhaustive(self):
        for n in range(1, 201):
            passages = make_passages([f"s{i}." for i in range(n)], size=10, stride=5)
            expected = 1 + math.ceil(max(0, n - 10) / 5)
            assert len(passages) == expected, f"n={n}"
            covered = set()
            for p in passages:
                start, end = p.sentence_span
                covered.update(range(start, end + 1))
            assert covered == set(range(n)), f"n={n}"
            assert passages[0].sentence_span[0] == 0

    @given(
        st.integers(1, 60),
        st.integers(1, 12),
        st.integers(1, 12),
    )
    def test_coverage_property(self, n, size, stride):
        if stride > size:
            stride = size
        passages = make_passages([f"s{i}." for i in range(n)], size=size, stride=stride)
        assert len(passages) == 1 + math.ceil(max(0, n - size) / stride)
        covered = set()
        for p in passages:
            start, end = p.sentence_span
            assert end - start + 1 <= size
            covered.update(range(start, end + 1))
        assert covered == set(range(n))

    def test_text_joins_sentences(self):
        passages = make_passages(["A.", "B."], size=10, stride=5)
        assert passages[0].text == "A. B."

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            make_passages(["a."], size=0, stride=1)
        with pytest.raises(ValueError):
            make_passages(["a."], size=5, stride=6)


class TestOverlapScore:
    def test_full_overlap(self):
        lp, ln = overlap_score("cat dog", "dog and cat", PLAIN)
        assert (lp, ln) == (1.0, 0.0)
        assert relevance_prob(lp, ln) == pytest.approx(0.731059, abs=1e-6)

    def test_zero_overlap(self):
        lp, ln = overlap_score("cat", "nothing here", PLAIN)
        assert (lp, ln) == (0.0, 1.0)
        assert relevance_prob(lp, ln) == pytest.approx(0.268941, abs=1e-6)

    def test_half_overlap(self):
        lp, ln = overlap_score("cat dog", "only cat", PLAIN)
        assert (lp, ln) == (0.5, 0.5)
        assert relevance_prob(lp, ln) == 0.5

    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            overlap_score("...", "text", PLAIN)


class TestScoreDocument:
    def test_single_passage(self):
        doc = Document("d", "just one sentence here")
        record, idx = score_document(doc, "one sentence", OverlapScorer(PLAIN), TARGET)
        assert idx == 0
        assert record.prob > 0.5

    def test_max_aggregation_picks_best_window(self):
        sentences = [f"filler{i} pad{i}." for i in range(12)]
        sentences[11] = "cat dog."
        doc = Document("d", " ".join(sentences))
        record, idx = score_document(
            doc, "cat dog", OverlapScorer(PLAIN), TARGET, WindowConfig(10, 5)
        )
        assert idx == 1  # window (5, 11) holds the matching sentence
        assert record.prob == pytest.approx(relevance_prob(1.0, 0.0))

    def test_tie_goes_to_first_passage(self):
        class ConstantScorer:
            def score_batch(self, pairs, target):
                return [(0.7, 0.3)] * len(pairs)

        doc = Document("d", " ".join(f"s{i}." for i in range(12)))
        record, idx = score_document(doc, "whatever", ConstantScorer(), TARGET)
        assert idx == 0

    def test_explicit_probs_max(self):
        class ListScorer:
            def __init__(self, logits):
                self.logits = logits

            def score_batch(self, pairs, target):
                assert len(pairs) == len(self.logits)
                return self.logits

        doc = Document("d", " ".join(f"s{i}." for i in range(12)))  # 2 windows
        probs = [0.2, 0.9]
        logits = [(math.log(p / (1 - p)), 0.0) for p in probs]
        record, idx = score_document(doc, "q", ListScorer(logits), TARGET)
        assert idx == 1
        assert record.prob == pytest.approx(0.9)

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError):
            score_document(Document("d", "   "), "q", OverlapScorer(PLAIN), TARGET)

    def test_scorer_failure_names_document(self):
        class BrokenScorer:
            def score_batch(self, pairs, target):
                raise RuntimeError("boom")

        with pytest.raises(ScoringError) as exc:
            score_document(Document("doc7", "text."), "q", BrokenScorer(), TARGET)
        assert "doc7" in str(exc.value)

    def test_length_mismatch_detected(self):
        class ShortScorer:
            def score_batch(self, pairs, target):
                return [(0.0, 0.0)] * (len(pairs) - 1)

        doc = Document("d", " ".join(f"s{i}." for i in range(12)))
        with pytest.raises(ScoringError):
            score_document(doc, "q", ShortScorer(), TARGET)


class TestRerank:
    CORPUS = {
        "d1": Document("d1", "nothing relevant at all"),
        "d2": Document("d2", "cat and dog together"),
        "d3": Document("d3", "only cat here"),
    }

    def candidates(self, *doc_ids):
        return [
            RunEntry(doc_id=d, score=10.0 - i, rank=i + 1)
            for i, d in enumerate(doc_ids)
        ]

    def test_orders_by_probability(self):
        out = rerank(
            self.candidates("d1", "d2"),
            "cat dog",
            self.CORPUS,
            OverlapScorer(PLAIN),
            TARGET,
        )
        assert [e.doc_id for e in out] == ["d2", "d1"]
        assert [e.rank for e in out] == [1, 2]
        assert out[0].score == pytest.approx(relevance_prob(1.0, 0.0))

    def test_equal_probs_tie_by_doc_id(self):
        class ConstantScorer:
            def score_batch(self, pairs, target):
                return [(0.0, 0.0)] * len(pairs)

        out = rerank(
            self.candidates("d3", "d1", "d2"),
            "q",
            self.CORPUS,
            ConstantScorer(),
            TARGET,
        )
        assert [e.doc_id for e in out] == ["d1", "d2", "d3"]

    def test_input_order_irrelevant(self):
        a = rerank(
            self.candidates("d1", "d2", "d3"),
            "cat dog",
            self.CORPUS,
            OverlapScorer(PLAIN),
            TARGET,
        )
        b = rerank(
            self.candidates("d3", "d2", "d1"),
            "cat dog",
            self.CORPUS,
            OverlapScorer(PLAIN),
            TARGET,
        )
        assert a == b

    def test_superset_overlap_beats_subset(self):
        out = rerank(
            self.candidates("d3", "d2"),
            "cat dog",
            self.CORPUS,
            OverlapScorer(PLAIN),
            TARGET,
        )
        assert [e.doc_id for e in out] == ["d2", "d3"]

    def test_missing_docs_listed(self):
        with pytest.raises(KeyError) as exc:
            rerank(
                self.candidates("d1", "nope1", "nope2"),
                "q",
                self.CORPUS,
                OverlapScorer(PLAIN),
                TARGET,
            )
        assert "nope1" in str(exc.value) and "nope2" in str(exc.value)


class TestTargetWordConfig:
    def test_defaults(self):
        assert TARGET.positive == "true"
        assert TARGET.negative == "false"

    def test_equal_words_rejected(self):
        with pytest.raises(ValueError):
            TargetWordConfig("same", "same")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            TargetWordConfig("", "x")
