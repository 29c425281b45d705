import pytest
from hypothesis import given, settings, strategies as st

from coursetutor.errors import CourseMismatch, UnknownCourse
from coursetutor.progress import (InteractionEvent, MaterialState,
                                  ProgressTracker, derive_status)


def tracker_with_doc(chunks=10):
    t = ProgressTracker()
    t.register_chunks("c1", "doc1", [f"ch{i}" for i in range(chunks)])
    return t


def ev(chunk_ids, user="u1", kind="chat_citation", ts=1.0, course="c1"):
    return InteractionEvent(user, course, kind, tuple(chunk_ids), ts)


class TestDeriveStatus:
    def test_zero_interactions_not_started(self):
        assert derive_status(0.0, 0) is MaterialState.not_started
        assert derive_status(1.0, 0) is MaterialState.not_started

    def test_threshold_boundaries(self):
        assert derive_status(0.8, 3) is MaterialState.completed
        assert derive_status(0.79, 3) is MaterialState.in_progress
        assert derive_status(0.8, 2) is MaterialState.in_progress
        assert derive_status(0.1, 1) is MaterialState.in_progress


class TestRecordInteraction:
    def test_event_validation(self):
        with pytest.raises(ValueError):
            InteractionEvent("u", "c", "chat_citation", (), 1.0)
        with pytest.raises(ValueError):
            InteractionEvent("u", "c", "made_up_kind", ("ch0",), 1.0)
        # quiz_attempt may arrive without chunks
        InteractionEvent("u", "c", "quiz_attempt", (), 1.0)

    def test_idempotent_duplicate(self):
        t = tracker_with_doc()
        assert t.record_interaction(ev(["ch0", "ch1"])) is True
        assert t.record_interaction(ev(["ch0", "ch1"])) is False
        statuses, agg = t.course_coverage("u1", "c1")
        assert agg["touched_chunks"] == 2
        assert statuses[0].interaction_count == 1

    def test_retouching_never_inflates(self):
        t = tracker_with_doc()
        t.record_interaction(ev(["ch0"], ts=1.0))
        t.record_interaction(ev(["ch0"], ts=2.0))
        _, agg = t.course_coverage("u1", "c1")
        assert agg["touched_chunks"] == 1

    def test_foreign_chunk_rejected(self):
        t = tracker_with_doc()
        t.register_chunks("c2", "docZ", ["zz0"])
        with pytest.raises(CourseMismatch):
            t.record_interaction(ev(["zz0"], course="c1"))

    def test_unknown_course(self):
        t = tracker_with_doc()
        with pytest.raises(UnknownCourse):
            t.record_interaction(ev(["ch0"], course="ghost"))
        with pytest.raises(UnknownCourse):
            t.course_coverage("u1", "ghost")


class TestCoverage:
    def test_per_document_and_aggregate(self):
        t = tracker_with_doc(10)
        t.register_chunks("c1", "doc2", ["d2-0", "d2-1"])
        for i, ts in ((0, 1.0), (1, 2.0), (2, 3.0)):
            t.record_interaction(ev([f"ch{i}"], ts=ts))
        statuses, agg = t.course_coverage("u1", "c1")
        by_doc = {s.document_id: s for s in statuses}
        assert by_doc["doc1"].coverage == pytest.approx(0.3)
        assert by_doc["doc1"].status is MaterialState.in_progress
        assert by_doc["doc2"].status is MaterialState.not_started
        assert agg == {"touched_chunks": 3, "total_chunks": 12,
                       "coverage": pytest.approx(0.25)}

    def test_completion_path(self):
        t = tracker_with_doc(5)
        for i in range(4):
            t.record_interaction(ev([f"ch{i}"], ts=float(i)))
        statuses, _ = t.course_coverage("u1", "c1")
        assert statuses[0].coverage == pytest.approx(0.8)
        assert statuses[0].status is MaterialState.completed

    def test_users_isolated(self):
        t = tracker_with_doc()
        t.record_interaction(ev(["ch0"], user="u1"))
        _, agg_other = t.course_coverage("u2", "c1")
        assert agg_other["touched_chunks"] == 0

    def test_export_events_order(self):
        t = tracker_with_doc()
        t.record_interaction(ev(["ch1"], ts=5.0))
        t.record_interaction(ev(["ch0"], ts=1.0, user="u2"))
        log = t.export_events("c1")
        assert [e["user_id"] for e in log] == ["u1", "u2"]
        assert log[0]["chunk_ids"] == ["ch1"]

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 9), st.floats(0, 100)),
                    min_size=0, max_size=40))
    def test_coverage_equals_distinct_touch_set(self, touches):
        t = tracker_with_doc(10)
        applied = set()
        for i, ts in touches:
            if t.record_interaction(ev([f"ch{i}"], ts=ts)):
                applied.add(i)
        statuses, agg = t.course_coverage("u1", "c1")
        assert agg["touched_chunks"] == len(applied)
        assert statuses[0].coverage == pytest.approx(len(applied) / 10)
        assert 0.0 <= statuses[0].coverage <= 1.0
