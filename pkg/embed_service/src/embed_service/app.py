"""HTTP embedding microservice: batch /embed endpoint plus /health probe."""
from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from embed_service.encoder import load_encoder

DEFAULT_MODEL = "hash-v1"
DEFAULT_PORT = 8901
MAX_BATCH_TEXTS = 512
MAX_TEXT_CHARS = 512


class EmbedRequest(BaseModel):
    texts: list[str]


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(model_id: str | None = None) -> FastAPI:
    """Build the service around one encoder checkpoint.

    ``model_id`` defaults to the EMBED_MODEL environment variable. Handling
    is stateless — the only state is the encoder loaded here — so the app is
    safe under concurrent clients; batching happens inside one request only.
    """
    resolved = model_id if model_id is not None else os.environ.get("EMBED_MODEL", DEFAULT_MODEL)
    encoder = load_encoder(resolved)
    app = FastAPI(title="embed-service", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(400, "malformed request body")

    @app.get("/health")
    async def health() -> JSONResponse:
        if encoder is None:
            return _error(503, f"model {resolved!r} is not loaded")
        return JSONResponse(
            content={"status": "ok", "model": encoder.model_id},
            headers={"X-Model-Id": encoder.model_id},
        )

    @app.post("/embed")
    async def embed(request: EmbedRequest) -> JSONResponse:
        if encoder is None:
            return _error(503, f"model {resolved!r} is not loaded")
        texts = request.texts
        if not texts:
            return _error(400, "texts must not be empty")
        if any(not text for text in texts):
            return _error(400, "texts must not contain empty strings")
        if len(texts) > MAX_BATCH_TEXTS:
            return _error(413, f"at most {MAX_BATCH_TEXTS} texts per call")
        if any(len(text) > MAX_TEXT_CHARS for text in texts):
            return _error(413, f"each text must be at most {MAX_TEXT_CHARS} characters")
        return JSONResponse(
            content={"dim": encoder.dim, "vectors": encoder.encode(texts)},
            headers={"X-Model-Id": encoder.model_id},
        )

    return app
