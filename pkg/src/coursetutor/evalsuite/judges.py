"""Judge implementations behind one duck-typed interface.

``ScriptedJudge`` replays fixed verdicts for oracle fixtures. ``LexicalJudge``
is a deterministic heuristic (token overlap) used by the sweep harness.
``RemoteJudge`` delegates to a generation provider over the standard wire
contract; the test suite never needs it.
"""

from __future__ import annotations

import re
from importlib import resources

from ..errors import JudgeUnavailable
from .metrics import split_sentences

_TOKEN = re.compile(r"[a-z0-9]+")

_STOPWORDS = frozenset("""
a an and are as at be but by for from has have how in is it its of on or
that the this to was what when where which who why will with you your
""".split())


def content_tokens(text: str) -> set[str]:
    return {t for t in _TOKEN.findall(text.lower()) if t not in _STOPWORDS}


class ScriptedJudge:
    """Replays fixed outputs, independent of the inputs."""

    def __init__(self, claims: list[str] | None = None,
                 claim_verdicts: list[bool] | None = None,
                 statement_verdicts: list[bool] | None = None,
                 context_verdicts: list[int] | None = None,
                 questions: list[str] | None = None):
        self._claims = claims
        self._claim_verdicts = claim_verdicts or []
        self._statement_verdicts = statement_verdicts or []
        self._context_verdicts = context_verdicts or []
        self._questions = questions or []

    def decompose_claims(self, answer: str) -> list[str]:
        if self._claims is not None:
            return list(self._claims)
        return split_sentences(answer)

    def verdict_claims(self, claims, contexts) -> list[bool]:
        return list(self._claim_verdicts[:len(claims)])

    def verdict_statements(self, statements, contexts) -> list[bool]:
        return list(self._statement_verdicts[:len(statements)])

    def verdict_contexts(self, question, contexts) -> list[int]:
        return list(self._context_verdicts[:len(contexts)])

    def generate_questions(self, answer: str, n: int) -> list[str]:
        return list(self._questions[:n])


class LexicalJudge:
    """Deterministic token-overlap judge for offline sweeps.

    A claim or statement counts as supported when at least ``support_ratio``
    of its content tokens appear in some single context; a context counts as
    relevant when it covers at least ``relevance_ratio`` of the question's
    content tokens.
    """

    def __init__(self, support_ratio: float = 0.5, relevance_ratio: float = 0.6):
        self.support_ratio = support_ratio
        self.relevance_ratio = relevance_ratio

    def decompose_claims(self, answer: str) -> list[str]:
        return split_sentences(answer)

    def _supported(self, text: str, contexts: list[str]) -> bool:
        tokens = content_tokens(text)
        if not tokens:
            return False
        return any(len(tokens & content_tokens(c)) / len(tokens) >= self.support_ratio
                   for c in contexts)

    def verdict_claims(self, claims, contexts) -> list[bool]:
        return [self._supported(c, contexts) for c in claims]

    def verdict_statements(self, statements, contexts) -> list[bool]:
        return [self._supported(s, contexts) for s in statements]

    def verdict_contexts(self, question, contexts) -> list[int]:
        qtokens = content_tokens(question)
        if not qtokens:
            return [0] * len(contexts)
        return [int(len(qtokens & content_tokens(c)) / len(qtokens)
                    >= self.relevance_ratio)
                for c in contexts]

    def generate_questions(self, answer: str, n: int) -> list[str]:
        sentences = split_sentences(answer)
        return [f"What about: {s}" for s in sentences[:n]] or [answer[:80]]


def _load_prompt(name: str) -> str:
    return resources.files("coursetutor.fixtures.judge_prompts") \
        .joinpath(name).read_text(encoding="utf-8")


class RemoteJudge:
    """LLM judge over the generation-provider wire contract.

    Prompts ship as fixtures; responses are expected as one verdict token
    per line (``S``/``U`` for claims, ``A``/``N`` for attribution, ``1``/``0``
    for context relevance) or one generated question per line.
    """

    def __init__(self, generator, temperature: float = 0.0):
        self._generator = generator
        self._temperature = temperature

    def _ask(self, prompt_name: str, user: str) -> str:
        try:
            return self._generator.generate(_load_prompt(prompt_name), user,
                                            self._temperature).text
        except Exception as exc:
            raise JudgeUnavailable(f"judge provider failed: {exc}")

    def decompose_claims(self, answer: str) -> list[str]:
        text = self._ask("decompose_claims.txt", answer)
        return [line.strip("- ").strip() for line in text.splitlines() if line.strip()]

    def _verdict_lines(self, prompt_name: str, user: str, yes: str, n: int) -> list[bool]:
        text = self._ask(prompt_name, user)
        lines = [line.strip().upper() for line in text.splitlines() if line.strip()]
        if len(lines) < n:
            raise JudgeUnavailable(f"judge returned {len(lines)} verdicts, expected {n}")
        return [line.startswith(yes) for line in lines[:n]]

    def verdict_claims(self, claims, contexts) -> list[bool]:
        user = "Contexts:\n" + "\n".join(contexts) + "\n\nClaims:\n" + "\n".join(claims)
        return self._verdict_lines("verdict_claims.txt", user, "S", len(claims))

    def verdict_statements(self, statements, contexts) -> list[bool]:
        user = ("Contexts:\n" + "\n".join(contexts) +
                "\n\nStatements:\n" + "\n".join(statements))
        return self._verdict_lines("verdict_statements.txt", user, "A", len(statements))

    def verdict_contexts(self, question, contexts) -> list[int]:
        user = "Question: " + question + "\n\nContexts:\n" + "\n".join(contexts)
        flags = self._verdict_lines("verdict_contexts.txt", user, "1", len(contexts))
        return [int(f) for f in flags]

    def generate_questions(self, answer: str, n: int) -> list[str]:
        text = self._ask("generate_questions.txt", f"n={n}\n\n{answer}")
        return [line.strip() for line in text.splitlines() if line.strip()][:n]
