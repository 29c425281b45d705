"""Text embedding providers and cosine similarity.

Two providers share one interface: a remote HTTP client (the production
path, fronting whatever sentence-transformer service is deployed) and a
deterministic hashing provider used for offline tests and fixtures. All
vectors are L2-normalized at the boundary so the index can use plain dot
products as cosine similarity.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import DimensionMismatch, EmptyText, ProviderUnavailable

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    provider_id: str

    @property
    def dimension(self) -> int:
        return len(self.values)

    def to_numpy(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    provider_id: str
    kind: str  # "remote_http" | "deterministic_test"
    dimension: int = 256
    endpoint: str = ""
    timeout: float = 10.0
    max_batch: int = 64

    def __post_init__(self):
        if self.dimension < 8:
            raise ValueError("dimension must be >= 8")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine of the angle between two vectors; dot product for unit vectors."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions differ: {a.dimension} vs {b.dimension}")
    av, bv = a.to_numpy(), b.to_numpy()
    na, nb = np.linalg.norm(av), np.linalg.norm(bv)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(np.dot(av, bv) / (na * nb))


class HashingEmbeddingProvider:
    """Deterministic bag-of-tokens embedder for offline tests.

    Lowercase, split on non-alphanumeric runs; each token's 64-bit FNV-1a
    hash picks a component (h mod D) and a sign (+1 if the top hash bit is
    0, else -1); the accumulated vector is L2-normalized.
    """

    def __init__(self, dimension: int = 256, provider_id: str = "deterministic_test"):
        if dimension < 8:
            raise ValueError("dimension must be >= 8")
        self.dimension = dimension
        self.provider_id = provider_id

    def embed_one(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        tokens = [t for t in _TOKEN_SPLIT.split(text.lower()) if t]
        if not tokens:
            raise EmptyText("text contains no alphanumeric tokens")
        vec = np.zeros(self.dimension, dtype=np.float64)
        for tok in tokens:
            h = fnv1a64(tok.encode("utf-8"))
            sign = 1.0 if (h >> 63) == 0 else -1.0
            vec[h % self.dimension] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            # pathological sign cancellation; keep the output deterministic
            vec[0] = 1.0
            norm = 1.0
        vec /= norm
        return EmbeddingVector(tuple(vec.tolist()), self.provider_id)

    def embed_texts(self, texts: list[str]) -> list[EmbeddingVector]:
        if not texts:
            raise ValueError("texts must be non-empty")
        return [self.embed_one(t) for t in texts]


class RemoteEmbeddingProvider:
    """HTTP client speaking ``POST {"texts": [...]} -> {"vectors": [[...]]}``.

    Retries twice with exponential backoff (base 250 ms) on timeouts and
    5xx responses; rejects vectors of the wrong length.
    """

    RETRIES = 2
    BACKOFF_BASE = 0.25

    def __init__(self, config: EmbeddingProviderConfig, client: httpx.Client | None = None):
        self.config = config
        self.provider_id = config.provider_id
        self.dimension = config.dimension
        self._client = client or httpx.Client(timeout=config.timeout)

    def _post_batch(self, batch: list[str]) -> list[list[float]]:
        last_exc: Exception | None = None
        for attempt in range(self.RETRIES + 1):
            if attempt:
                time.sleep(self.BACKOFF_BASE * (2 ** (attempt - 1)))
            try:
                resp = self._client.post(self.config.endpoint, json={"texts": batch})
            except httpx.HTTPError as exc:
                last_exc = exc
                continue
            if resp.status_code >= 500:
                last_exc = ProviderUnavailable(f"server returned {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise ProviderUnavailable(f"embedding endpoint returned {resp.status_code}")
            return resp.json()["vectors"]
        raise ProviderUnavailable(
            f"embedding provider unreachable after {self.RETRIES + 1} attempts: {last_exc}",
            detail={"retries": self.RETRIES},
        )

    def embed_texts(self, texts: list[str]) -> list[EmbeddingVector]:
        if not texts:
            raise ValueError("texts must be non-empty")
        for t in texts:
            if not t.strip():
                raise EmptyText("cannot embed empty text")
        out: list[EmbeddingVector] = []
        for i in range(0, len(texts), self.config.max_batch):
            batch = texts[i:i + self.config.max_batch]
            for raw in self._post_batch(batch):
                if len(raw) != self.dimension:
                    raise DimensionMismatch(
                        f"provider returned dimension {len(raw)}, expected {self.dimension}")
                vec = np.asarray(raw, dtype=np.float64)
                norm = np.linalg.norm(vec)
                if norm == 0.0:
                    raise ProviderUnavailable("provider returned a zero vector")
                out.append(EmbeddingVector(tuple((vec / norm).tolist()), self.provider_id))
        return out


def make_provider(config: EmbeddingProviderConfig):
    if config.kind == "deterministic_test":
        return HashingEmbeddingProvider(config.dimension, config.provider_id)
    if config.kind == "remote_http":
        return RemoteEmbeddingProvider(config)
    raise ValueError(f"unknown provider kind {config.kind!r}")
