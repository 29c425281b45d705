"""Prompt intent routing via nearest-centroid matching.

Free-form prompts route to one of three pipeline modes. Centroids are the
normalized means of exemplar embeddings; classification is pure and
deterministic given the model and the embedding provider.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .embeddings import EmbeddingVector
from .errors import EmptyPrompt, InsufficientExemplars

MIN_EXEMPLARS = 5
DEFAULT_MARGIN_THRESHOLD = 0.05


class IntentLabel(str, Enum):
    explanation = "explanation"
    test_generation = "test_generation"
    material_generation = "material_generation"


@dataclass(frozen=True)
class IntentModel:
    centroids: dict[IntentLabel, EmbeddingVector]
    exemplars: dict[IntentLabel, tuple[str, ...]]
    margin_threshold: float
    provider_id: str


@dataclass(frozen=True)
class IntentResult:
    label: IntentLabel
    score: float
    runner_up: IntentLabel
    margin: float
    low_confidence: bool


def load_seed_exemplars() -> dict[IntentLabel, list[str]]:
    """Exemplar fixture shipped with the package."""
    raw = resources.files("coursetutor.fixtures").joinpath("intent_exemplars.json")
    data = json.loads(raw.read_text(encoding="utf-8"))
    return {IntentLabel(k): list(v) for k, v in data.items()}


def fit_centroids(exemplars: dict[IntentLabel, list[str]], provider,
                  margin_threshold: float = DEFAULT_MARGIN_THRESHOLD) -> IntentModel:
    for label in IntentLabel:
        texts = exemplars.get(label, [])
        if len(texts) < MIN_EXEMPLARS:
            raise InsufficientExemplars(
                f"label {label.value} has {len(texts)} exemplars, needs >= {MIN_EXEMPLARS}")
    centroids: dict[IntentLabel, EmbeddingVector] = {}
    for label in IntentLabel:
        vecs = provider.embed_texts(exemplars[label])
        mean = np.mean([v.to_numpy() for v in vecs], axis=0)
        norm = np.linalg.norm(mean)
        if norm == 0.0:
            raise ValueError(f"degenerate centroid for label {label.value}")
        centroids[label] = EmbeddingVector(tuple((mean / norm).tolist()), provider.provider_id)
    return IntentModel(
        centroids=centroids,
        exemplars={k: tuple(v) for k, v in exemplars.items()},
        margin_threshold=margin_threshold,
        provider_id=provider.provider_id,
    )


def classify_intent(prompt: str, model: IntentModel, provider) -> IntentResult:
    if not prompt.strip():
        raise EmptyPrompt("prompt is empty")
    query = provider.embed_texts([prompt])[0].to_numpy()
    scored = sorted(
        ((float(np.dot(query, c.to_numpy())), label) for label, c in model.centroids.items()),
        key=lambda pair: (-pair[0], pair[1].value),
    )
    (best_score, best), (second_score, second) = scored[0], scored[1]
    margin = best_score - second_score
    return IntentResult(
        label=best,
        score=best_score,
        runner_up=second,
        margin=margin,
        low_confidence=margin < model.margin_threshold,
    )
