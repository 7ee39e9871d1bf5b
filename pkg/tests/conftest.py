import pytest
from hypothesis import settings

from seqrank.analysis import AnalyzerConfig
from seqrank.corpus import Document
from seqrank.index import build_index

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

#: Analyzer with no stopwords and no stemming: token identity is obvious.
PLAIN = AnalyzerConfig(stopwords=frozenset(), stem="none")

THREE_DOCS = [
    Document("d1", "cat sat mat"),
    Document("d2", "cat cat dog"),
    Document("d3", "dog runs"),
]


@pytest.fixture
def three_doc_index():
    return build_index(THREE_DOCS, PLAIN)


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion (skipif fires
    # during setup, so skips are caught there).
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        print(f"\nACCEPTANCE {'PASS' if report.passed else 'FAIL'}: {name}")
    elif report.when == "setup" and report.skipped:
        print(f"\nACCEPTANCE SKIP: {name}")
