"""The four retrieval/generation quality metrics.

A judge decomposes answers into claims, attributes ground-truth statements,
and verdicts context relevance; the metric layer only aggregates those
verdicts, so scripted judges make every score reproducible offline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..embeddings import cosine_similarity

_SENTENCE_SPLIT = re.compile(r"(?<=[.?!])\s+")

METRIC_FIELDS = ("faithfulness", "answer_relevancy", "context_recall",
                 "context_precision")


@dataclass(frozen=True)
class EvalCase:
    case_id: str
    question: str
    ground_truth: str
    retrieved_contexts: tuple[str, ...]
    answer: str
    discipline: str = "stem"
    mode: str = "quick"


@dataclass(frozen=True)
class MetricScores:
    faithfulness: float | None = None
    answer_relevancy: float | None = None
    context_recall: float | None = None
    context_precision: float | None = None

    def as_dict(self) -> dict:
        return {
            "faithfulness": self.faithfulness,
            "answer_relevancy": self.answer_relevancy,
            "context_recall": self.context_recall,
            "context_precision": self.context_precision,
        }


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_SPLIT.split(text.strip()) if s.strip()]


def faithfulness(case: EvalCase, judge) -> float | None:
    """Fraction of the answer's atomic claims supported by the contexts."""
    if not case.answer.strip():
        raise ValueError("faithfulness requires a non-empty answer")
    claims = judge.decompose_claims(case.answer)
    if not claims:
        return None
    verdicts = judge.verdict_claims(claims, list(case.retrieved_contexts))
    return sum(map(bool, verdicts)) / len(verdicts)


def answer_relevancy(case: EvalCase, judge, embed_provider,
                     n_questions: int = 3) -> float | None:
    """Mean similarity of reverse-generated questions to the original question."""
    if not case.answer.strip():
        raise ValueError("answer_relevancy requires a non-empty answer")
    generated = judge.generate_questions(case.answer, n_questions)
    if not generated:
        return None
    original = embed_provider.embed_texts([case.question])[0]
    sims = [cosine_similarity(vec, original)
            for vec in embed_provider.embed_texts(list(generated))]
    mean = sum(sims) / len(sims)
    return min(1.0, max(0.0, mean))


def context_recall(case: EvalCase, judge) -> float | None:
    """Fraction of ground-truth sentences attributable to the contexts."""
    if not case.ground_truth.strip():
        raise ValueError("context_recall requires a non-empty ground truth")
    sentences = split_sentences(case.ground_truth)
    if not sentences:
        return None
    verdicts = judge.verdict_statements(sentences, list(case.retrieved_contexts))
    return sum(map(bool, verdicts)) / len(verdicts)


def context_precision(case: EvalCase, judge) -> float:
    """Rank-weighted precision of relevant contexts in the retrieved list."""
    if not case.retrieved_contexts:
        raise ValueError("context_precision requires at least one context")
    verdicts = [int(bool(v)) for v in
                judge.verdict_contexts(case.question, list(case.retrieved_contexts))]
    return precision_from_verdicts(verdicts)


def precision_from_verdicts(verdicts: list[int]) -> float:
    total_relevant = sum(verdicts)
    if total_relevant == 0:
        return 0.0
    acc = 0.0
    seen = 0
    for k, v in enumerate(verdicts, start=1):
        seen += v
        if v:
            acc += seen / k
    return acc / total_relevant


def score_case(case: EvalCase, judge, embed_provider) -> MetricScores:
    return MetricScores(
        faithfulness=faithfulness(case, judge) if case.answer.strip() else None,
        answer_relevancy=(answer_relevancy(case, judge, embed_provider)
                          if case.answer.strip() else None),
        context_recall=(context_recall(case, judge)
                        if case.ground_truth.strip() else None),
        context_precision=(context_precision(case, judge)
                           if case.retrieved_contexts else None),
    )
