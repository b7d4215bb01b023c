"""Text encoders served over the embedding wire protocol."""
from __future__ import annotations

import math
from typing import Protocol, Sequence

_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_FNV_MASK = (1 << 64) - 1

HASH_MODEL_ID = "hash-v1"
HASH_DIM = 256


class Encoder(Protocol):
    """A loaded checkpoint that turns texts into unit-normalized vectors."""

    model_id: str
    dim: int

    def encode(self, texts: Sequence[str]) -> list[list[float]]: ...


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _FNV_MASK
    return h


class HashEncoder:
    """Character unigram/bigram counts hashed into 256 buckets, L2-normalized.

    Grams are bucketed by 64-bit FNV-1a over their UTF-8 bytes, making the
    vectors bit-exact across platforms: any client pinning the ``hash-v1``
    identifier computes the same embedding locally and remotely. This is the
    single normalization point in the stack — callers never re-normalize.
    """

    model_id = HASH_MODEL_ID
    dim = HASH_DIM

    def encode(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._encode_one(text) for text in texts]

    def _encode_one(self, text: str) -> list[float]:
        if not text:
            raise ValueError("cannot encode empty text")
        counts = [0] * self.dim
        for gram in self._grams(text):
            counts[_fnv1a64(gram.encode("utf-8")) % self.dim] += 1
        norm = math.sqrt(sum(c * c for c in counts))
        return [c / norm for c in counts]

    @staticmethod
    def _grams(text: str) -> list[str]:
        return list(text) + [text[i : i + 2] for i in range(len(text) - 1)]


def load_encoder(model_id: str) -> Encoder | None:
    """Return the encoder for ``model_id``, or None when unknown.

    Unknown checkpoints do not raise: the service still starts and answers
    503 on every endpoint, so a misconfigured deployment reports "not ready"
    at the HTTP layer instead of dying before it can be probed.
    """
    if model_id == HASH_MODEL_ID:
        return HashEncoder()
    return None
