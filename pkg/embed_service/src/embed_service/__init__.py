"""HTTP embedding microservice with pluggable encoder checkpoints."""
from __future__ import annotations

from embed_service.app import (
    DEFAULT_MODEL,
    DEFAULT_PORT,
    MAX_BATCH_TEXTS,
    MAX_TEXT_CHARS,
    create_app,
)
from embed_service.encoder import Encoder, HashEncoder, load_encoder

__all__ = [
    "DEFAULT_MODEL",
    "DEFAULT_PORT",
    "MAX_BATCH_TEXTS",
    "MAX_TEXT_CHARS",
    "Encoder",
    "HashEncoder",
    "create_app",
    "load_encoder",
]

__version__ = "0.1.0"
