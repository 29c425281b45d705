"""JSON-safe converters between domain objects and store bodies / API payloads."""

from __future__ import annotations

from .quiz import (BloomLevel, Option, Question, Quiz, QuizScope, QuestionKind,
                   ReviewState)
from .tutor import ChatTurn, Citation, RetrievedContext


def citation_to_dict(c: Citation) -> dict:
    return {
        "chunk_id": c.chunk_id, "document_id": c.document_id,
        "document_title": c.document_title, "page_number": c.page_number,
        "fragment": c.fragment, "score": c.score,
    }


def citation_from_dict(d: dict) -> Citation:
    return Citation(d["chunk_id"], d["document_id"], d["document_title"],
                    d["page_number"], d["fragment"], d["score"])


def context_to_dict(ctx: RetrievedContext) -> dict:
    return {
        "chunk_id": ctx.chunk_id, "document_id": ctx.document_id,
        "document_title": ctx.document_title, "page_number": ctx.page_number,
        "ordinal": ctx.ordinal, "text": ctx.text, "score": ctx.score,
    }


def turn_to_dict(t: ChatTurn) -> dict:
    return {
        "turn_id": t.turn_id, "session_id": t.session_id, "course_id": t.course_id,
        "user_id": t.user_id, "prompt": t.prompt, "mode": t.mode,
        "retrieved": [context_to_dict(c) for c in t.retrieved],
        "answer": t.answer,
        "citations": [citation_to_dict(c) for c in t.citations],
        "created_at": t.created_at, "provider_usage": t.provider_usage,
        "status": t.status,
    }


def question_to_dict(q: Question) -> dict:
    return {
        "question_id": q.question_id, "stem": q.stem, "kind": q.kind.value,
        "options": [{"text": o.text, "correct": o.correct} for o in q.options],
        "explanation": q.explanation,
        "citations": [citation_to_dict(c) for c in q.citations],
        "bloom_level": q.bloom_level.value,
    }


def question_from_dict(d: dict) -> Question:
    return Question(
        question_id=d["question_id"],
        stem=d["stem"],
        kind=QuestionKind(d["kind"]),
        options=[Option(o["text"], o["correct"]) for o in d["options"]],
        explanation=d["explanation"],
        citations=[citation_from_dict(c) for c in d["citations"]],
        bloom_level=BloomLevel(d["bloom_level"]),
    )


def quiz_to_dict(quiz: Quiz) -> dict:
    return {
        "quiz_id": quiz.quiz_id, "course_id": quiz.course_id,
        "scope": {"kind": quiz.scope.kind, "topic": quiz.scope.topic,
                  "document_ids": list(quiz.scope.document_ids)},
        "questions": [question_to_dict(q) for q in quiz.questions],
        "review_state": quiz.review_state.value,
        "created_by": quiz.created_by, "reviewed_by": quiz.reviewed_by,
        "revision": quiz.revision, "shortfall": quiz.shortfall,
    }


def quiz_from_dict(d: dict) -> Quiz:
    return Quiz(
        quiz_id=d["quiz_id"],
        course_id=d["course_id"],
        scope=QuizScope(d["scope"]["kind"], d["scope"].get("topic", ""),
                        tuple(d["scope"].get("document_ids", ()))),
        questions=[question_from_dict(q) for q in d["questions"]],
        review_state=ReviewState(d["review_state"]),
        created_by=d.get("created_by", ""),
        reviewed_by=d.get("reviewed_by"),
        revision=d.get("revision", 1),
        shortfall=d.get("shortfall", 0),
    )
