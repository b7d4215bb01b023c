"""Semantic filtering: n-gram matching score plus an embedding cosine gate."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import requests

from axisaug.model import AxisAugError, DiseasePair, FilterVerdict

DEFAULT_ALPHA = 0.7
DEFAULT_BETA = 0.8
EMBED_DIM = 256
BUILTIN_MODEL_ID = "hash-v1"


class ProviderError(AxisAugError):
    """The embedding provider failed for good, retries included."""


def ngm(udn: str, sdn: str) -> float:
    """Normalized n-gram matching score over distinct character n-grams.

    Sums shared n-gram counts for n = 1..min(len), divided by the shorter
    length; can exceed 1 for near-identical strings.
    """
    if not udn or not sdn:
        raise ValueError("ngm requires non-empty strings")
    shorter = min(len(udn), len(sdn))
    total = 0
    for n in range(1, shorter + 1):
        grams_u = {udn[i : i + n] for i in range(len(udn) - n + 1)}
        grams_s = {sdn[i : i + n] for i in range(len(sdn) - n + 1)}
        total += len(grams_u & grams_s)
    return total / shorter


class EmbeddingProvider(Protocol):
    dim: int
    model_id: str

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_FNV_MASK = (1 << 64) - 1


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _FNV_MASK
    return h


class HashEmbeddingProvider:
    """Deterministic character-gram hash embedder; bit-exact across platforms.

    Unigram and bigram counts are accumulated into 256 buckets selected by
    64-bit FNV-1a over the gram's UTF-8 bytes, then L2-normalized.
    """

    dim = EMBED_DIM
    model_id = BUILTIN_MODEL_ID

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._embed_one(text) for text in texts]

    def _embed_one(self, text: str) -> list[float]:
        if not text:
            raise ValueError("cannot embed empty text")
        counts = [0] * self.dim
        for gram in self._grams(text):
            counts[_fnv1a64(gram.encode("utf-8")) % self.dim] += 1
        norm = math.sqrt(sum(c * c for c in counts))
        return [c / norm for c in counts]

    @staticmethod
    def _grams(text: str) -> list[str]:
        return list(text) + [text[i : i + 2] for i in range(len(text) - 1)]


class RemoteEmbeddingProvider:
    """Client for the embedding service's POST /embed wire contract."""

    def __init__(
        self,
        base_url: str,
        timeout: float = 10.0,
        retries: int = 3,
        backoff: float = 0.5,
        session: requests.Session | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self.dim = -1  # learned from the first response
        self.model_id = "remote"

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        last_error: Exception | None = None
        for attempt in range(self.retries):
            if attempt and self.backoff:
                time.sleep(self.backoff * attempt)
            try:
                response = self.session.post(
                    f"{self.base_url}/embed", json={"texts": list(texts)}, timeout=self.timeout
                )
                if response.status_code != 200:
                    raise ProviderError(
                        f"embed endpoint returned {response.status_code}: {response.text[:200]}"
                    )
                body = response.json()
                vectors = body["vectors"]
                if len(vectors) != len(texts):
                    raise ProviderError(
                        f"asked for {len(texts)} vectors, got {len(vectors)}"
                    )
                self.dim = int(body["dim"])
                self.model_id = response.headers.get("X-Model-Id", self.model_id)
                return vectors
            except (requests.RequestException, ProviderError, KeyError, ValueError) as exc:
                last_error = exc
        raise ProviderError(f"embedding service failed after {self.retries} attempts: {last_error}")


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(u, v))


def cosine_gate(udn: str, sdn: str, provider: EmbeddingProvider) -> float:
    """Cosine between the provider's unit vectors for the two names."""
    vectors = provider.embed([udn, sdn])
    return cosine(vectors[0], vectors[1])


@dataclass
class FilterOutcome:
    kept: list[DiseasePair] = field(default_factory=list)
    verdicts: list[FilterVerdict] = field(default_factory=list)


def filter_pairs(
    pairs: Sequence[DiseasePair],
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    provider: EmbeddingProvider | None = None,
    batch_size: int = 64,
) -> FilterOutcome:
    """Keep pairs passing both strict gates; emit a verdict for every pair.

    Multi-SDN pairs are judged one (udn, sdn) row at a time, so the kept list
    contains single-SDN pairs in input order.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if not -1 <= beta <= 1:
        raise ValueError("beta must lie in [-1, 1]")
    provider = provider or HashEmbeddingProvider()

    rows = [(pair, sdn) for pair in pairs for sdn in pair.sdns]
    unique_texts: list[str] = []
    seen: set[str] = set()
    for pair, sdn in rows:
        for text in (pair.udn, sdn):
            if text not in seen:
                seen.add(text)
                unique_texts.append(text)
    vectors: dict[str, list[float]] = {}
    for start in range(0, len(unique_texts), batch_size):
        batch = unique_texts[start : start + batch_size]
        for text, vector in zip(batch, provider.embed(batch)):
            vectors[text] = vector

    outcome = FilterOutcome()
    for pair, sdn in rows:
        verdict = FilterVerdict.evaluate(
            udn=pair.udn,
            sdn=sdn,
            ngm=ngm(pair.udn, sdn),
            cosine=cosine(vectors[pair.udn], vectors[sdn]),
            alpha=alpha,
            beta=beta,
        )
        outcome.verdicts.append(verdict)
        if verdict.passed:
            outcome.kept.append(
                DiseasePair(udn=pair.udn, sdns=(sdn,), provenance=pair.provenance)
            )
    return outcome
