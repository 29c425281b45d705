"""Per-student coverage tracking for the learning dashboard.

Coverage is set-based: a document's coverage is the fraction of its distinct
chunks the student has touched through citations, explanation views, or quiz
attempts. Re-touching the same chunk never inflates progress.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum

from .errors import CourseMismatch, UnknownCourse

EVENT_KINDS = ("chat_citation", "quiz_explanation_view", "quiz_attempt")

COMPLETION_THRESHOLD = 0.8
MIN_INTERACTIONS = 3


class MaterialState(str, Enum):
    not_started = "not_started"
    in_progress = "in_progress"
    completed = "completed"


@dataclass(frozen=True)
class InteractionEvent:
    user_id: str
    course_id: str
    kind: str
    chunk_ids: tuple[str, ...]
    timestamp: float

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind in ("chat_citation", "quiz_explanation_view") and not self.chunk_ids:
            raise ValueError(f"{self.kind} events require chunk_ids")


@dataclass
class MaterialStatus:
    document_id: str
    status: MaterialState
    coverage: float
    interaction_count: int


def derive_status(coverage: float, interaction_count: int,
                  completion_threshold: float = COMPLETION_THRESHOLD,
                  min_interactions: int = MIN_INTERACTIONS) -> MaterialState:
    if interaction_count == 0:
        return MaterialState.not_started
    if coverage >= completion_threshold and interaction_count >= min_interactions:
        return MaterialState.completed
    return MaterialState.in_progress


class ProgressTracker:
    def __init__(self, completion_threshold: float = COMPLETION_THRESHOLD,
                 min_interactions: int = MIN_INTERACTIONS):
        self.completion_threshold = completion_threshold
        self.min_interactions = min_interactions
        self._lock = threading.RLock()
        # course -> chunk_id -> document_id
        self._chunk_doc: dict[str, dict[str, str]] = {}
        # course -> document_id -> total chunk count
        self._doc_totals: dict[str, dict[str, int]] = {}
        # (user, course) -> document_id -> set of touched chunk ids
        self._touched: dict[tuple[str, str], dict[str, set[str]]] = {}
        # (user, course) -> document_id -> interaction event count
        self._counts: dict[tuple[str, str], dict[str, int]] = {}
        self._seen_events: set = set()
        self._event_log: dict[str, list[InteractionEvent]] = {}

    def register_course(self, course_id: str) -> None:
        with self._lock:
            self._chunk_doc.setdefault(course_id, {})
            self._doc_totals.setdefault(course_id, {})

    def register_chunks(self, course_id: str, document_id: str,
                        chunk_ids: list[str]) -> None:
        with self._lock:
            self.register_course(course_id)
            mapping = self._chunk_doc[course_id]
            fresh = [c for c in chunk_ids if c not in mapping]
            for c in fresh:
                mapping[c] = document_id
            totals = self._doc_totals[course_id]
            totals[document_id] = totals.get(document_id, 0) + len(fresh)

    def record_interaction(self, event: InteractionEvent) -> bool:
        """Apply an event; returns False for an idempotent duplicate."""
        with self._lock:
            mapping = self._chunk_doc.get(event.course_id)
            if mapping is None:
                raise UnknownCourse(f"course {event.course_id!r} is not registered")
            for c in event.chunk_ids:
                if c not in mapping:
                    raise CourseMismatch(
                        f"chunk {c!r} does not belong to course {event.course_id!r}")
            key = (event.user_id, event.kind, event.timestamp, event.chunk_ids)
            if key in self._seen_events:
                return False
            self._seen_events.add(key)
            self._event_log.setdefault(event.course_id, []).append(event)
            user_key = (event.user_id, event.course_id)
            touched = self._touched.setdefault(user_key, {})
            counts = self._counts.setdefault(user_key, {})
            docs_hit = set()
            for c in event.chunk_ids:
                doc = mapping[c]
                touched.setdefault(doc, set()).add(c)
                docs_hit.add(doc)
            for doc in docs_hit:
                counts[doc] = counts.get(doc, 0) + 1
            return True

    def course_coverage(self, user_id: str, course_id: str) -> tuple[list[MaterialStatus], dict]:
        with self._lock:
            totals = self._doc_totals.get(course_id)
            if totals is None:
                raise UnknownCourse(f"course {course_id!r} is not registered")
            touched = self._touched.get((user_id, course_id), {})
            counts = self._counts.get((user_id, course_id), {})
            statuses = []
            touched_union: set[str] = set()
            for doc in sorted(totals):
                total = totals[doc]
                got = touched.get(doc, set())
                touched_union |= got
                coverage = len(got) / total if total else 0.0
                count = counts.get(doc, 0)
                statuses.append(MaterialStatus(
                    document_id=doc,
                    status=derive_status(coverage, count,
                                         self.completion_threshold, self.min_interactions),
                    coverage=coverage,
                    interaction_count=count,
                ))
            total_chunks = sum(totals.values())
            aggregate = {
                "touched_chunks": len(touched_union),
                "total_chunks": total_chunks,
                "coverage": len(touched_union) / total_chunks if total_chunks else 0.0,
            }
            return statuses, aggregate

    def export_events(self, course_id: str) -> list[dict]:
        """Raw event log for the teacher view, in insertion order."""
        with self._lock:
            if course_id not in self._chunk_doc:
                raise UnknownCourse(f"course {course_id!r} is not registered")
            return [
                {"user_id": e.user_id, "course_id": e.course_id, "kind": e.kind,
                 "chunk_ids": list(e.chunk_ids), "timestamp": e.timestamp}
                for e in self._event_log.get(course_id, [])
            ]
