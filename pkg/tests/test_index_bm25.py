import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqrank.analysis import analyze
from seqrank.bm25 import BM25Params, bm25_score, search
from seqrank.corpus import Document
from seqrank.index import (
    FORMAT_VERSION,
    IndexFormatError,
    build_index,
    load_index,
    save_index,
)

from conftest import PLAIN, THREE_DOCS

PARAMS = BM25Params(k1=0.9, b=0.4)


def oracle_bm25(docs, query_terms, doc_id, k1=0.9, b=0.4):
    """Recompute the score term by term straight from the raw documents."""
    token_lists = {d.id: analyze(d.text, PLAIN) for d in docs}
    n = len(docs)
    avgdl = sum(len(toks) for toks in token_lists.values()) / n
    score = 0.0
    for term in query_terms:
        df = sum(1 for toks in token_lists.values() if term in toks)
        if df == 0:
            continue
        tf = token_lists[doc_id].count(term)
        if tf == 0:
            continue
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        dl = len(token_lists[doc_id])
        score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
    return score


class TestBuildIndex:
    def test_three_doc_stats(self, three_doc_index):
        index = three_doc_index
        assert index.n_docs == 3
        assert index.avgdl == pytest.approx(8 / 3)
        assert index.df("cat") == 2
        assert index.tf("cat", "d2") == 2
        index.check_consistency()

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            build_index([], PLAIN)

    def test_duplicate_id_rejected(self):
        with pytest.raises(ValueError):
            build_index([Document("d", "a"), Document("d", "b")], PLAIN)

    def test_single_doc(self):
        index = build_index([Document("d", "a a a")], PLAIN)
        assert index.postings["a"] == [("d", 3)]
        assert index.avgdl == 3

    def test_empty_analyzed_doc_counts(self):
        index = build_index([Document("d1", "cat"), Document("d2", "...")], PLAIN)
        assert index.n_docs == 2
        assert index.doc_lens["d2"] == 0
        assert index.avgdl == 0.5

    def test_postings_sorted_by_doc_id(self):
        docs = [Document(f"d{9 - i}", "shared term") for i in range(5)]
        index = build_index(docs, PLAIN)
        ids = [doc_id for doc_id, _ in index.postings["shared"]]
        assert ids == sorted(ids)


class TestBM25Score:
    def test_hand_computed_d1(self, three_doc_index):
        score = bm25_score(three_doc_index, PARAMS, ["cat"], "d1")
        assert score == pytest.approx(0.4592, abs=1e-4)
        assert math.log(1.6) == pytest.approx(0.4700, abs=1e-4)

    def test_hand_computed_d2(self, three_doc_index):
        score = bm25_score(three_doc_index, PARAMS, ["cat"], "d2")
        assert score == pytest.approx(0.6064, abs=1e-4)

    def test_unknown_term_scores_zero(self, three_doc_index):
        assert bm25_score(three_doc_index, PARAMS, ["zzz"], "d1") == 0.0

    def test_unknown_doc_rejected(self, three_doc_index):
        with pytest.raises(KeyError):
            bm25_score(three_doc_index, PARAMS, ["cat"], "nope")

    def test_duplicate_query_terms_add_up(self, three_doc_index):
        single = bm25_score(three_doc_index, PARAMS, ["cat"], "d1")
        double = bm25_score(three_doc_index, PARAMS, ["cat", "cat"], "d1")
        assert double == pytest.approx(2 * single, rel=1e-12)

    def test_matches_oracle(self, three_doc_index):
        for doc in THREE_DOCS:
            for terms in (["cat"], ["dog", "cat"], ["mat", "mat", "runs"]):
                got = bm25_score(three_doc_index, PARAMS, terms, doc.id)
                want = oracle_bm25(THREE_DOCS, terms, doc.id)
                assert got == pytest.approx(want, rel=1e-9, abs=1e-12)

    @given(
        st.lists(
            st.lists(st.sampled_from("abcde"), min_size=0, max_size=8),
            min_size=1,
            max_size=6,
        ),
        st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4),
    )
    def test_oracle_equivalence_randomized(self, doc_tokens, query):
        docs = [Document(f"d{i}", " ".join(toks)) for i, toks in enumerate(doc_tokens)]
        index = build_index(docs, PLAIN)
        for doc in docs:
            got = bm25_score(index, PARAMS, query, doc.id)
            want = oracle_bm25(docs, query, doc.id)
            assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


class TestSearch:
    def test_ranking_and_scores(self, three_doc_index):
        entries = search(three_doc_index, PARAMS, PLAIN, "cat", 1000)
        assert [e.doc_id for e in entries] == ["d2", "d1"]
        assert entries[0].score == pytest.approx(0.6064, abs=1e-4)
        assert [e.rank for e in entries] == [1, 2]

    def test_no_match_is_empty(self, three_doc_index):
        assert search(three_doc_index, PARAMS, PLAIN, "zzz", 10) == []

    def test_truncation(self, three_doc_index):
        entries = search(three_doc_index, PARAMS, PLAIN, "cat", 1)
        assert [e.doc_id for e in entries] == ["d2"]

    def test_tie_break_by_doc_id(self):
        docs = [Document("db", "x"), Document("da", "x"), Document("dc", "x")]
        index = build_index(docs, PLAIN)
        entries = search(index, PARAMS, PLAIN, "x", 10)
        assert [e.doc_id for e in entries] == ["da", "db", "dc"]

    def test_k_must_be_positive(self, three_doc_index):
        with pytest.raises(ValueError):
            search(three_doc_index, PARAMS, PLAIN, "cat", 0)


class TestPersistence:
    def test_round_trip(self, three_doc_index):
        sink = io.BytesIO()
        save_index(three_doc_index, sink)
        loaded = load_index(io.BytesIO(sink.getvalue()))
        assert loaded.n_docs == three_doc_index.n_docs
        assert loaded.avgdl == pytest.approx(three_doc_index.avgdl)
        assert loaded.doc_lens == three_doc_index.doc_lens
        assert loaded.postings == three_doc_index.postings
        assert loaded.doc_ids == three_doc_index.doc_ids
        loaded.check_consistency()

    def test_search_equivalent_after_reload(self, three_doc_index):
        sink = io.BytesIO()
        save_index(three_doc_index, sink)
        loaded = load_index(io.BytesIO(sink.getvalue()))
        a = search(three_doc_index, PARAMS, PLAIN, "cat dog", 10)
        b = search(loaded, PARAMS, PLAIN, "cat dog", 10)
        assert a == b

    def test_bad_magic(self):
        with pytest.raises(IndexFormatError):
            load_index(io.BytesIO(b"NOPE" + b"\x00" * 16))

    def test_version_mismatch(self, three_doc_index):
        sink = io.BytesIO()
        save_index(three_doc_index, sink)
        data = bytearray(sink.getvalue())
        data[4] = FORMAT_VERSION + 1
        with pytest.raises(IndexFormatError) as exc:
            load_index(io.BytesIO(bytes(data)))
        assert "version" in str(exc.value)

    def test_truncated_file(self, three_doc_index):
        sink = io.BytesIO()
        save_index(three_doc_index, sink)
        with pytest.raises(IndexFormatError):
            load_index(io.BytesIO(sink.getvalue()[:20]))


class TestParams:
    def test_k1_validation(self):
        with pytest.raises(ValueError):
            BM25Params(k1=0.0)

    def test_b_validation(self):
        with pytest.raises(ValueError):
            BM25Params(b=1.5)
