import pytest
from fastapi.testclient import TestClient

from seqrank_service.app import create_app
from seqrank_service.engine import ScoringEngine
from seqrank_service.model import build_tiny


@pytest.fixture(scope="session")
def engine():
    model, tokenizer = build_tiny()
    return ScoringEngine(model, tokenizer, max_input_tokens=512, batch_limit=16)


@pytest.fixture(scope="session")
def client(engine):
    app = create_app(engine=engine)
    # raise_server_exceptions off so the "internal" handler is exercised
    return TestClient(app, raise_server_exceptions=False)


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        print(f"\nACCEPTANCE {'PASS' if report.passed else 'FAIL'}: {name}")
    elif report.when == "setup" and report.skipped:
        print(f"\nACCEPTANCE SKIP: {name}")
