"""Quiz generation parsing, review state machine, and grading.

Generated questions arrive in a strict line-oriented grammar
(``Q:/A:/X:/EXPLAIN:/CITE:``); malformed items are discarded, never
repaired. Quizzes start unreviewed and become student-visible only after a
teacher approves and publishes them; published quizzes are immutable.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field
from enum import Enum

from .errors import (ForbiddenRole, IllegalTransition, QuizNotPublished,
                     ValidationFailed, VersionConflict)
from .tutor import Citation, RetrievedContext, _truncate_fragment

_CITE_MARKER = re.compile(r"\[S(\d+)\]")
_FENCE = re.compile(r"^```.*$", re.MULTILINE)


class QuestionKind(str, Enum):
    multichoice = "multichoice"
    truefalse = "truefalse"
    shortanswer = "shortanswer"


class BloomLevel(str, Enum):
    remember = "remember"
    understand = "understand"
    apply = "apply"
    analyze = "analyze"
    evaluate = "evaluate"
    create = "create"


class ReviewState(str, Enum):
    unreviewed = "unreviewed"
    approved = "approved"
    rejected = "rejected"
    published = "published"


DEFAULT_BLOOM_MIX = {
    BloomLevel.remember: 0.3,
    BloomLevel.understand: 0.3,
    BloomLevel.apply: 0.2,
    BloomLevel.analyze: 0.2,
}


@dataclass(frozen=True)
class Option:
    text: str
    correct: bool


@dataclass
class Question:
    question_id: str
    stem: str
    kind: QuestionKind
    options: list[Option]
    explanation: str
    citations: list[Citation]
    bloom_level: BloomLevel


@dataclass(frozen=True)
class QuizScope:
    kind: str  # "whole_course" | "topic" | "documents"
    topic: str = ""
    document_ids: tuple[str, ...] = ()


@dataclass
class Quiz:
    quiz_id: str
    course_id: str
    scope: QuizScope
    questions: list[Question]
    review_state: ReviewState = ReviewState.unreviewed
    created_by: str = ""
    reviewed_by: str | None = None
    revision: int = 1
    shortfall: int = 0  # requested minus delivered question count


@dataclass
class QuizAttempt:
    attempt_id: str
    quiz_id: str
    user_id: str
    answers: dict
    score: float
    per_question: dict


def validate_question(q: Question) -> None:
    if not q.stem.strip():
        raise ValidationFailed("question stem is empty")
    if not q.explanation.strip():
        raise ValidationFailed("explanation is empty")
    if not q.citations:
        raise ValidationFailed("question has no citations")
    correct = sum(1 for o in q.options if o.correct)
    if q.kind is QuestionKind.multichoice:
        if len(q.options) < 3 or correct != 1:
            raise ValidationFailed("multichoice needs >= 3 options with exactly 1 correct")
    elif q.kind is QuestionKind.truefalse:
        if len(q.options) != 2 or correct != 1:
            raise ValidationFailed("truefalse needs exactly 2 options with exactly 1 correct")
    elif q.kind is QuestionKind.shortanswer:
        if not q.options or correct < 1:
            raise ValidationFailed("shortanswer needs at least one accepted answer")


def _derive_kind(correct_text: str, wrong: list[str]) -> QuestionKind | None:
    if not wrong:
        return QuestionKind.shortanswer
    if len(wrong) == 1:
        pair = {correct_text.strip().lower(), wrong[0].strip().lower()}
        if pair == {"true", "false"}:
            return QuestionKind.truefalse
        return None  # a 2-option multichoice is malformed
    return QuestionKind.multichoice


def _build_citations(markers: list[int], contexts: list[RetrievedContext]) -> list[Citation] | None:
    citations = []
    for m in markers:
        if not 1 <= m <= len(contexts):
            return None
        ctx = contexts[m - 1]
        citations.append(Citation(
            chunk_id=ctx.chunk_id,
            document_id=ctx.document_id,
            document_title=ctx.document_title,
            page_number=ctx.page_number,
            fragment=_truncate_fragment(ctx.text),
            score=ctx.score,
        ))
    return citations or None


def parse_generated_questions(text: str, contexts: list[RetrievedContext],
                              bloom_level: BloomLevel) -> list[Question]:
    """Parse provider output in the Q:/A:/X:/EXPLAIN:/CITE: grammar.

    Returns only well-formed, fully cited questions; everything else is
    dropped silently (the caller decides whether to retry).
    """
    body = _FENCE.sub("", text)
    blocks: list[list[str]] = []
    current: list[str] | None = None
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("Q:"):
            current = [line]
            blocks.append(current)
        elif current is not None:
            current.append(line)
    questions: list[Question] = []
    for block in blocks:
        stem = correct = explain = None
        wrong: list[str] = []
        markers: list[int] = []
        malformed = False
        for line in block:
            if line.startswith("Q:"):
                stem = line[2:].strip()
            elif line.startswith("A:"):
                if correct is not None:
                    malformed = True
                    break
                correct = line[2:].strip()
            elif line.startswith("X:"):
                wrong.append(line[2:].strip())
            elif line.startswith("EXPLAIN:"):
                explain = line[len("EXPLAIN:"):].strip()
            elif line.startswith("CITE:"):
                markers.extend(int(m) for m in _CITE_MARKER.findall(line))
            else:
                malformed = True
                break
        if malformed or not stem or correct is None or not explain:
            continue
        kind = _derive_kind(correct, wrong)
        if kind is None:
            continue
        citations = _build_citations(markers, contexts)
        if citations is None:
            continue
        if kind is QuestionKind.truefalse:
            options = [Option("True", correct.strip().lower() == "true"),
                       Option("False", correct.strip().lower() == "false")]
        elif kind is QuestionKind.shortanswer:
            options = [Option(correct, True)]
        else:
            options = [Option(correct, True)] + [Option(w, False) for w in wrong]
        q = Question(
            question_id=f"q{uuid.uuid4().hex[:12]}",
            stem=stem,
            kind=kind,
            options=options,
            explanation=explain,
            citations=citations,
            bloom_level=bloom_level,
        )
        try:
            validate_question(q)
        except ValidationFailed:
            continue
        questions.append(q)
    return questions


def bloom_schedule(n: int, mix: dict[BloomLevel, float] | None = None) -> list[BloomLevel]:
    """Deterministic bloom-level assignment for n questions (largest remainder)."""
    mix = mix or DEFAULT_BLOOM_MIX
    levels = list(mix)
    exact = {lvl: n * mix[lvl] for lvl in levels}
    counts = {lvl: int(exact[lvl]) for lvl in levels}
    leftover = n - sum(counts.values())
    for lvl in sorted(levels, key=lambda l: (-(exact[l] - counts[l]), l.value)):
        if leftover <= 0:
            break
        counts[lvl] += 1
        leftover -= 1
    out: list[BloomLevel] = []
    for lvl in levels:
        out.extend([lvl] * counts[lvl])
    return out[:n]


# --- review state machine -------------------------------------------------

_LEGAL = {
    ("unreviewed", "approve"): ReviewState.approved,
    ("unreviewed", "reject"): ReviewState.rejected,
    ("rejected", "edit"): ReviewState.unreviewed,
    ("approved", "edit"): ReviewState.unreviewed,
    ("approved", "publish"): ReviewState.published,
}

ACTIONS = ("approve", "reject", "edit", "publish")


def transition_review_state(quiz: Quiz, action: str, actor_id: str, actor_role: str,
                            edited_questions: list[Question] | None = None,
                            expected_revision: int | None = None) -> Quiz:
    if actor_role not in ("teacher", "admin"):
        raise ForbiddenRole(f"role {actor_role!r} may not review quizzes")
    if action not in ACTIONS:
        raise IllegalTransition(f"unknown action {action!r}")
    if expected_revision is not None and expected_revision != quiz.revision:
        raise VersionConflict(
            f"quiz revision is {quiz.revision}, request was for {expected_revision}")
    target = _LEGAL.get((quiz.review_state.value, action))
    if target is None:
        raise IllegalTransition(
            f"cannot {action} a quiz in state {quiz.review_state.value}")
    if action == "edit":
        if not edited_questions:
            raise ValidationFailed("edit requires an edited question payload")
        for q in edited_questions:
            validate_question(q)
        quiz.questions = edited_questions
    quiz.review_state = target
    quiz.reviewed_by = actor_id
    quiz.revision += 1
    return quiz


def student_visible(quiz: Quiz) -> bool:
    return quiz.review_state is ReviewState.published


# --- grading --------------------------------------------------------------

def _answer_correct(q: Question, answer) -> bool:
    if answer is None:
        return False
    if q.kind is QuestionKind.shortanswer:
        if not isinstance(answer, str):
            return False
        norm = answer.strip().lower()
        return any(o.correct and o.text.strip().lower() == norm for o in q.options)
    if not isinstance(answer, int) or isinstance(answer, bool):
        return False
    return 0 <= answer < len(q.options) and q.options[answer].correct


def grade_attempt(quiz: Quiz, answers: dict, user_id: str,
                  attempt_id: str | None = None) -> QuizAttempt:
    if quiz.review_state is not ReviewState.published:
        raise QuizNotPublished(f"quiz {quiz.quiz_id} is {quiz.review_state.value}")
    per_question = {}
    n_correct = 0
    for q in quiz.questions:
        ok = _answer_correct(q, answers.get(q.question_id))
        n_correct += ok
        per_question[q.question_id] = {
            "correct": ok,
            "explanation": q.explanation,
            "citations": q.citations,
        }
    return QuizAttempt(
        attempt_id=attempt_id or f"a{uuid.uuid4().hex[:12]}",
        quiz_id=quiz.quiz_id,
        user_id=user_id,
        answers=dict(answers),
        score=n_correct / len(quiz.questions) if quiz.questions else 0.0,
        per_question=per_question,
    )
