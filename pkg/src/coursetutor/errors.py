"""Exception hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` so the gateway can
serialize failures as ``{code, message, detail}`` without inspecting types.
"""

from __future__ import annotations


class TutorError(Exception):
    """Base class for all engine errors."""

    code = "internal_error"

    def __init__(self, message: str = "", detail: object = None):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.detail = detail

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


# --- ingest ---------------------------------------------------------------

class UnsupportedFormat(TutorError):
    code = "unsupported_format"


class MalformedPayload(TutorError):
    code = "malformed_payload"


class EmptyDocument(TutorError):
    code = "empty_document"


# --- embeddings -----------------------------------------------------------

class EmptyText(TutorError):
    code = "empty_text"


class ProviderUnavailable(TutorError):
    code = "provider_unavailable"


class DimensionMismatch(TutorError):
    code = "dimension_mismatch"


# --- index ----------------------------------------------------------------

class CourseMismatch(TutorError):
    code = "course_mismatch"


class UnknownCourse(TutorError):
    code = "unknown_course"


# --- intent ---------------------------------------------------------------

class EmptyPrompt(TutorError):
    code = "empty_prompt"


class InsufficientExemplars(TutorError):
    code = "insufficient_exemplars"


# --- quiz -----------------------------------------------------------------

class IllegalTransition(TutorError):
    code = "illegal_transition"


class ForbiddenRole(TutorError):
    code = "forbidden_role"


class ValidationFailed(TutorError):
    code = "validation_failed"


class QuizNotPublished(TutorError):
    code = "quiz_not_published"


class UnknownQuiz(TutorError):
    code = "unknown_quiz"


class NotApproved(TutorError):
    code = "not_approved"


class GenerationParseError(TutorError):
    code = "generation_parse_error"


# --- store ----------------------------------------------------------------

class VersionConflict(TutorError):
    code = "version_conflict"


class SchemaViolation(TutorError):
    code = "schema_violation"


class TooLarge(TutorError):
    code = "too_large"


class IntegrityError(TutorError):
    code = "integrity_error"


class NotFound(TutorError):
    code = "not_found"


# --- gateway --------------------------------------------------------------

class Unauthenticated(TutorError):
    code = "unauthenticated"


class Forbidden(TutorError):
    code = "forbidden"


class UnknownJob(TutorError):
    code = "unknown_job"


class QueueFull(TutorError):
    code = "queue_full"


# --- evalsuite ------------------------------------------------------------

class JudgeUnavailable(TutorError):
    code = "judge_unavailable"
