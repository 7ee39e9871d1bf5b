"""HTTP surface.

POST /score
    {"target": {"positive": "...", "negative": "..."},
     "pairs": [{"query": "...", "document": "..."}]}
    -> {"scores": [{"logit_pos": <num>, "logit_neg": <num>}]}, index-aligned.

GET /healthz -> {"status": "ok"}

Errors: {"error": {"code": <code>, "message": <text>}} with codes
"bad_request", "multi_token_target", "internal".
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import ScoringEngine, TargetWordError
from .model import ServiceConfig, load_model

logger = logging.getLogger(__name__)


class WireTarget(BaseModel):
    positive: str
    negative: str


class WirePair(BaseModel):
    query: str
    document: str


class ScoreRequest(BaseModel):
    target: WireTarget
    pairs: list[WirePair]


class WireLogits(BaseModel):
    logit_pos: float
    logit_neg: float


class ScoreResponse(BaseModel):
    scores: list[WireLogits]


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(config: ServiceConfig | None = None, engine: ScoringEngine | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if engine is None:
        model, tokenizer = load_model(config.model)
        engine = ScoringEngine(
            model,
            tokenizer,
            max_input_tokens=config.max_input_tokens,
            batch_limit=config.batch_limit,
        )

    app = FastAPI(title="seqrank scoring service")
    app.state.engine = engine

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError):
        return _error_response(400, "bad_request", str(exc.errors()[:3]))

    @app.exception_handler(TargetWordError)
    async def on_target_error(request: Request, exc: TargetWordError):
        return _error_response(400, "multi_token_target", str(exc))

    @app.exception_handler(Exception)
    async def on_internal(request: Request, exc: Exception):
        logger.exception("internal error")
        return _error_response(500, "internal", str(exc))

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/score", response_model=ScoreResponse)
    async def score(request: ScoreRequest):
        logits = engine.score_pairs(
            [(pair.query, pair.document) for pair in request.pairs],
            request.target.positive,
            request.target.negative,
        )
        return ScoreResponse(
            scores=[WireLogits(logit_pos=lp, logit_neg=ln) for lp, ln in logits]
        )

    return app
