"""HTTP client for the target-token scoring service.

Wire protocol: POST {endpoint}/score with

    {"target": {"positive": "...", "negative": "..."},
     "pairs": [{"query": "...", "document": "..."}, ...]}

and a response of

    {"scores": [{"logit_pos": <number>, "logit_neg": <number>}, ...]}

index-aligned with the request. Errors arrive as
``{"error": {"code": "...", "message": "..."}}``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import requests

from .rerank import TargetWordConfig


class RemoteScoringError(RuntimeError):
    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        self.code = code


def _post_batch(
    url: str,
    batch: Sequence[tuple[str, str]],
    target: TargetWordConfig,
    timeout: float,
    retries: int,
) -> list[tuple[float, float]]:
    payload = {
        "target": {"positive": target.positive, "negative": target.negative},
        "pairs": [{"query": q, "document": d} for q, d in batch],
    }
    last_error: Exception | None = None
    for attempt in range(retries + 1):
        if attempt:
            time.sleep(min(0.25 * 2 ** (attempt - 1), 2.0))
        try:
            response = requests.post(url, json=payload, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
            continue
        if response.status_code >= 500:
            last_error = RemoteScoringError(
                f"server error {response.status_code}: {response.text[:200]}"
            )
            continue
        try:
            body = response.json()
        except ValueError as exc:
            raise RemoteScoringError(f"non-JSON response: {response.text[:200]}") from exc
        if isinstance(body, dict) and "error" in body:
            err = body["error"] or {}
            raise RemoteScoringError(
                str(err.get("message", "unknown service error")),
                code=err.get("code"),
            )
        if response.status_code != 200:
            raise RemoteScoringError(f"unexpected status {response.status_code}")
        scores = body.get("scores") if isinstance(body, dict) else None
        if not isinstance(scores, list):
            raise RemoteScoringError('response missing "scores" array')
        if len(scores) != len(batch):
            raise RemoteScoringError(
                f"response length {len(scores)} does not match request length {len(batch)}"
            )
        out: list[tuple[float, float]] = []
        for record in scores:
            try:
                lp = float(record["logit_pos"])
                ln = float(record["logit_neg"])
            except (TypeError, KeyError, ValueError) as exc:
                raise RemoteScoringError(f"malformed score record: {record!r}") from exc
            if not (math.isfinite(lp) and math.isfinite(ln)):
                raise RemoteScoringError(f"non-finite logits in response: ({lp}, {ln})")
            out.append((lp, ln))
        return out
    raise RemoteScoringError(
        f"scoring request failed after {retries + 1} attempts: {last_error}"
    )


def remote_score_batch(
    endpoint: str,
    pairs: Sequence[tuple[str, str]],
    target: TargetWordConfig,
    batch_size: int = 32,
    timeout: float = 30.0,
    retries: int = 2,
) -> list[tuple[float, float]]:
    """Score pairs against a remote service, preserving order across batches."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    url = endpoint.rstrip("/") + "/score"
    results: list[tuple[float, float]] = []
    for start in range(0, len(pairs), batch_size):
        results.extend(
            _post_batch(url, pairs[start : start + batch_size], target, timeout, retries)
        )
    return results


@dataclass(frozen=True)
class RemoteScorer:
    """Scorer backed by a running scoring service."""

    endpoint: str
    batch_size: int = 32
    timeout: float = 30.0
    retries: int = 2

    def score_batch(
        self, pairs: Sequence[tuple[str, str]], target: TargetWordConfig
    ) -> list[tuple[float, float]]:
        return remote_score_batch(
            self.endpoint, pairs, target, self.batch_size, self.timeout, self.retries
        )
