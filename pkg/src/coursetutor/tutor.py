"""Mode-aware prompt assembly and verifiable citations.

Three chat modes share one pipeline: retrieve course context, build a
mode-specific system prompt with stable ``[S1]..[Sk]`` context markers,
generate, then turn markers (or verbatim overlap) back into citations that
always point at a real chunk with its exact page number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

MODES = ("quick", "deep_understanding", "exam_coach")
DISCIPLINES = ("stem", "humanities")

# Non-negotiable grounding refusal for empty retrieval.
REFUSAL_TEXT = ("I don't know. The course materials available to me do not "
                "cover this question.")

HISTORY_WINDOW = 6
FRAGMENT_LIMIT = 300
OVERLAP_MIN = 40  # chars of verbatim overlap for the citation fallback

DEFAULT_TEMPERATURES = {"stem": 0.3, "humanities": 0.1}
DEFAULT_TOP_K = 10


@dataclass(frozen=True)
class ModeProfile:
    mode: str
    temperature: float
    top_k: int
    system_template: str
    discipline: str


@dataclass(frozen=True)
class RetrievedContext:
    """A retrieval hit joined with its chunk text and document title."""
    chunk_id: str
    document_id: str
    document_title: str
    page_number: int
    ordinal: int
    text: str
    score: float


@dataclass(frozen=True)
class Citation:
    chunk_id: str
    document_id: str
    document_title: str
    page_number: int
    fragment: str
    score: float


@dataclass
class ChatTurn:
    turn_id: str
    session_id: str
    course_id: str
    user_id: str
    prompt: str
    mode: str
    retrieved: list[RetrievedContext]
    answer: str
    citations: list[Citation]
    created_at: float
    provider_usage: dict = field(default_factory=dict)
    status: str = "succeeded"


def load_mode_template(mode: str, discipline: str,
                       template_dir: str | Path | None = None) -> str:
    """Template per (mode, discipline); an override directory wins if given."""
    name = f"{mode}_{discipline}.txt"
    if template_dir is not None:
        path = Path(template_dir) / name
        if path.exists():
            return path.read_text(encoding="utf-8")
    return resources.files("coursetutor.templates").joinpath(name).read_text(encoding="utf-8")


def default_mode_profile(mode: str, discipline: str = "stem",
                         template_dir: str | Path | None = None) -> ModeProfile:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if discipline not in DISCIPLINES:
        raise ValueError(f"unknown discipline {discipline!r}")
    return ModeProfile(
        mode=mode,
        temperature=DEFAULT_TEMPERATURES[discipline],
        top_k=DEFAULT_TOP_K,
        system_template=load_mode_template(mode, discipline, template_dir),
        discipline=discipline,
    )


def context_block(contexts: list[RetrievedContext]) -> str:
    lines = []
    for i, ctx in enumerate(contexts, start=1):
        lines.append(f"[S{i}] ({ctx.document_title}, p.{ctx.page_number}) {ctx.text}")
    return "\n".join(lines)


def compose_prompt(prompt: str, contexts: list[RetrievedContext],
                   profile: ModeProfile, history: list[ChatTurn] | None = None) -> dict:
    """Build the {system, user} pair sent to the generation provider."""
    history = (history or [])[-HISTORY_WINDOW:]
    system = profile.system_template.rstrip() + "\n\nContext:\n" + context_block(contexts) + "\n"
    parts = []
    if history:
        parts.append("Conversation so far:")
        for turn in history:
            parts.append(f"Student: {turn.prompt}")
            parts.append(f"Tutor: {turn.answer}")
        parts.append("")
    parts.append(prompt)
    return {"system": system, "user": "\n".join(parts)}


def _truncate_fragment(text: str, limit: int = FRAGMENT_LIMIT) -> str:
    if len(text) <= limit:
        return text
    cut = text.rfind(" ", 0, limit + 1)
    if cut <= 0:
        cut = limit
    return text[:cut].rstrip()


def _shares_long_substring(answer: str, chunk_text: str, length: int = OVERLAP_MIN) -> str | None:
    """First answer substring of `length` chars found verbatim in the chunk."""
    if len(answer) < length:
        return None
    for i in range(len(answer) - length + 1):
        window = answer[i:i + length]
        if window in chunk_text:
            return window
    return None


def extract_citations(answer: str, contexts: list[RetrievedContext]) -> list[Citation]:
    """Marker-based citation with a verbatim-overlap fallback."""
    citations: list[Citation] = []
    for i, ctx in enumerate(contexts, start=1):
        fragment: str | None = None
        if f"[S{i}]" in answer:
            fragment = _truncate_fragment(ctx.text)
        else:
            overlap = _shares_long_substring(answer, ctx.text)
            if overlap is not None:
                fragment = _truncate_fragment(overlap)
        if fragment is not None:
            citations.append(Citation(
                chunk_id=ctx.chunk_id,
                document_id=ctx.document_id,
                document_title=ctx.document_title,
                page_number=ctx.page_number,
                fragment=fragment,
                score=ctx.score,
            ))
    return citations
