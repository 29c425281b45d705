"""Text-generation providers behind one call shape.

The remote client speaks ``POST {"system","user","temperature","max_tokens"}
-> {"text","tokens_in","tokens_out"}``. The echo stub makes the whole chat
pipeline reproducible offline; the scripted provider replays canned outputs
for parser and evaluation tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import httpx

from .errors import ProviderUnavailable

_MODE_RE = re.compile(r"^mode:\s*(\w+)", re.MULTILINE)
_MARKER_RE = re.compile(r"\[S\d+\]")


@dataclass(frozen=True)
class GenerationResult:
    text: str
    tokens_in: int
    tokens_out: int


@dataclass(frozen=True)
class GenerationProviderConfig:
    provider_id: str
    kind: str  # "remote_http" | "deterministic_stub"
    endpoint: str = ""
    timeout: float = 30.0
    max_output_tokens: int = 1024


class EchoStubGenerator:
    """Deterministic stand-in: echoes mode, context markers and the prompt."""

    provider_id = "stub"

    def generate(self, system: str, user: str, temperature: float,
                 max_tokens: int = 1024) -> GenerationResult:
        mode_match = _MODE_RE.search(system)
        mode = mode_match.group(1) if mode_match else "unknown"
        markers = sorted(set(_MARKER_RE.findall(system)),
                         key=lambda m: int(m[2:-1]))
        text = f"MODE:{mode} CONTEXT:{''.join(markers)} ECHO:{user[:80]}"
        return GenerationResult(text, len(system.split()) + len(user.split()),
                                len(text.split()))


class ScriptedGenerator:
    """Replays a queue of canned outputs; raises when exhausted unless cycling."""

    provider_id = "scripted"

    def __init__(self, outputs: list[str], cycle: bool = False):
        if not outputs:
            raise ValueError("outputs must be non-empty")
        self._outputs = list(outputs)
        self._cycle = cycle
        self._pos = 0
        self.calls: list[tuple[str, str, float]] = []

    def generate(self, system: str, user: str, temperature: float,
                 max_tokens: int = 1024) -> GenerationResult:
        self.calls.append((system, user, temperature))
        if self._pos >= len(self._outputs):
            if not self._cycle:
                raise ProviderUnavailable("scripted generator exhausted")
            self._pos = 0
        text = self._outputs[self._pos]
        self._pos += 1
        return GenerationResult(text, len(system.split()) + len(user.split()),
                                len(text.split()))


class RemoteHttpGenerator:
    def __init__(self, config: GenerationProviderConfig, client: httpx.Client | None = None):
        self.config = config
        self.provider_id = config.provider_id
        self._client = client or httpx.Client(timeout=config.timeout)

    def generate(self, system: str, user: str, temperature: float,
                 max_tokens: int | None = None) -> GenerationResult:
        body = {
            "system": system,
            "user": user,
            "temperature": temperature,
            "max_tokens": max_tokens or self.config.max_output_tokens,
        }
        try:
            resp = self._client.post(self.config.endpoint, json=body)
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"generation endpoint unreachable: {exc}")
        if resp.status_code != 200:
            raise ProviderUnavailable(f"generation endpoint returned {resp.status_code}")
        data = resp.json()
        return GenerationResult(data["text"], int(data.get("tokens_in", 0)),
                                int(data.get("tokens_out", 0)))


def make_generator(config: GenerationProviderConfig):
    if config.kind == "deterministic_stub":
        return EchoStubGenerator()
    if config.kind == "remote_http":
        return RemoteHttpGenerator(config)
    raise ValueError(f"unknown generator kind {config.kind!r}")
