import xml.etree.ElementTree as ET

import pytest

from coursetutor.errors import NotApproved
from coursetutor.moodle_xml import export_moodle_xml, parse_moodle_xml
from coursetutor.quiz import (BloomLevel, Option, Question, Quiz, QuizScope,
                              QuestionKind, ReviewState)
from coursetutor.tutor import Citation


def cite():
    return Citation("ch0", "doc1", "Notes", 1, "fragment text", 0.5)


def quiz_fixture(state=ReviewState.approved):
    questions = [
        Question("q1", "Capital of France?", QuestionKind.multichoice,
                 [Option("Paris", True), Option("London", False),
                  Option("Rome", False)],
                 "Stated in the notes.", [cite()], BloomLevel.remember),
        Question("q2", "Paris is in France.", QuestionKind.truefalse,
                 [Option("True", True), Option("False", False)],
                 "Geography.", [cite()], BloomLevel.understand),
        Question("q3", "Name the river through Paris.", QuestionKind.shortanswer,
                 [Option("Seine", True)],
                 "The Seine crosses Paris.", [cite()], BloomLevel.remember),
    ]
    return Quiz("quiz1", "c1", QuizScope("whole_course"), questions,
                review_state=state)


class TestExportGate:
    @pytest.mark.parametrize("state", [ReviewState.unreviewed, ReviewState.rejected])
    def test_unapproved_rejected(self, state):
        with pytest.raises(NotApproved):
            export_moodle_xml(quiz_fixture(state))

    @pytest.mark.parametrize("state", [ReviewState.approved, ReviewState.published])
    def test_approved_and_published_allowed(self, state):
        assert export_moodle_xml(quiz_fixture(state)).startswith(b"<?xml")


class TestXmlShape:
    def test_well_formed_and_typed(self):
        root = ET.fromstring(export_moodle_xml(quiz_fixture()))
        assert root.tag == "quiz"
        types = [q.get("type") for q in root.findall("question")]
        assert types == ["multichoice", "truefalse", "shortanswer"]

    def test_exactly_one_full_fraction_per_question(self):
        root = ET.fromstring(export_moodle_xml(quiz_fixture()))
        for qel in root.findall("question"):
            fractions = [a.get("fraction") for a in qel.findall("answer")]
            assert fractions.count("100") == 1
            assert set(fractions) <= {"100", "0"}

    def test_feedback_present(self):
        root = ET.fromstring(export_moodle_xml(quiz_fixture()))
        for qel in root.findall("question"):
            assert qel.findtext("feedback/text")
            assert qel.find("questiontext").get("format") == "html"

    def test_special_characters_escaped(self):
        q = Question("q1", 'Is "x < y & y > z" valid?', QuestionKind.truefalse,
                     [Option("True", True), Option("False", False)],
                     "Operators & comparisons.", [cite()], BloomLevel.apply)
        quiz = Quiz("z", "c1", QuizScope("whole_course"), [q],
                    review_state=ReviewState.approved)
        data = export_moodle_xml(quiz)
        parsed = parse_moodle_xml(data)
        assert parsed[0]["stem"] == 'Is "x < y & y > z" valid?'
        assert parsed[0]["feedback"] == "Operators & comparisons."


class TestRoundTripAndStability:
    def test_round_trip_preserves_content(self):
        quiz = quiz_fixture()
        parsed = parse_moodle_xml(export_moodle_xml(quiz))
        assert len(parsed) == len(quiz.questions)
        for got, want in zip(parsed, quiz.questions):
            assert got["type"] == want.kind.value
            assert got["stem"] == want.stem
            assert got["feedback"] == want.explanation
            assert [(o["text"], o["correct"]) for o in got["options"]] == \
                [(o.text, o.correct) for o in want.options]

    def test_byte_stable_across_calls(self):
        quiz = quiz_fixture()
        assert export_moodle_xml(quiz) == export_moodle_xml(quiz)

    def test_byte_stable_across_equal_quizzes(self):
        assert export_moodle_xml(quiz_fixture()) == export_moodle_xml(quiz_fixture())
