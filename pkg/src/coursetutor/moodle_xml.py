"""Moodle XML export for approved quizzes, plus a re-import parser.

Output is byte-stable: element order is fixed, attributes are emitted in a
fixed order, and serialization always uses UTF-8 with an XML declaration.
Only approved or published quizzes may be exported (the human-in-the-loop
gate).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .errors import NotApproved
from .quiz import Question, Quiz, ReviewState

_NAME_LIMIT = 60


def _text_el(parent: ET.Element, tag: str, text: str, **attrs) -> ET.Element:
    el = ET.SubElement(parent, tag, attrs)
    inner = ET.SubElement(el, "text")
    inner.text = text
    return el


def _question_el(root: ET.Element, q: Question) -> None:
    qel = ET.SubElement(root, "question", {"type": q.kind.value})
    _text_el(qel, "name", q.stem[:_NAME_LIMIT])
    _text_el(qel, "questiontext", q.stem, format="html")
    _text_el(qel, "feedback", q.explanation, format="html")
    for opt in q.options:
        _text_el(qel, "answer", opt.text, fraction="100" if opt.correct else "0")


def export_moodle_xml(quiz: Quiz) -> bytes:
    """Serialize an approved/published quiz as Moodle XML bytes."""
    if quiz.review_state not in (ReviewState.approved, ReviewState.published):
        raise NotApproved(
            f"quiz {quiz.quiz_id} is {quiz.review_state.value}; only approved or "
            "published quizzes may be exported")
    root = ET.Element("quiz")
    for q in quiz.questions:
        _question_el(root, q)
    ET.indent(root)
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)


def parse_moodle_xml(data: bytes) -> list[dict]:
    """Parse Moodle XML back into plain question dicts (round-trip checks)."""
    root = ET.fromstring(data)
    if root.tag != "quiz":
        raise ValueError("root element must be <quiz>")
    out = []
    for qel in root.findall("question"):
        options = []
        for ans in qel.findall("answer"):
            options.append({
                "text": ans.findtext("text") or "",
                "correct": ans.get("fraction") == "100",
            })
        out.append({
            "type": qel.get("type"),
            "name": qel.findtext("name/text") or "",
            "stem": qel.findtext("questiontext/text") or "",
            "feedback": qel.findtext("feedback/text") or "",
            "options": options,
        })
    return out
