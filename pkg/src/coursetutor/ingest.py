"""Document parsing and chunking.

Uploads arrive either as raw text (plain text / markdown, with optional
form-feed page separators) or as an ``external_extracted`` JSON interchange
payload produced by an out-of-process extractor for binary formats.
Parsed documents are split per page into overlapping, size-bounded chunks;
chunks never cross page boundaries so citations stay page-exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import EmptyDocument, MalformedPayload, UnsupportedFormat

SOURCE_FORMATS = ("plain_text", "markdown", "external_extracted")

# Maximum distance a chunk start may move backward to land on whitespace.
SNAP_WINDOW = 32


@dataclass(frozen=True)
class PageText:
    page_number: int
    text: str

    def __post_init__(self):
        if self.page_number < 1:
            raise ValueError("page_number must be >= 1")


@dataclass
class ExtractedDocument:
    document_id: str
    course_id: str
    title: str
    pages: list[PageText]
    source_format: str
    checksum: str


@dataclass(frozen=True)
class ChunkProfile:
    name: str
    chunk_size: int
    overlap: int
    snap_to_whitespace: bool = True

    def __post_init__(self):
        if self.chunk_size < 64:
            raise ValueError("chunk_size must be >= 64")
        if not 0 <= self.overlap < self.chunk_size:
            raise ValueError("overlap must satisfy 0 <= overlap < chunk_size")


# Defaults: overlap is 12.5% of chunk size.
STEM_PROFILE = ChunkProfile("stem", chunk_size=512, overlap=64)
HUMANITIES_PROFILE = ChunkProfile("humanities", chunk_size=1000, overlap=125)

PROFILES = {"stem": STEM_PROFILE, "humanities": HUMANITIES_PROFILE}


@dataclass
class Chunk:
    chunk_id: str
    document_id: str
    course_id: str
    page_number: int
    char_start: int
    char_end: int
    text: str
    ordinal: int


def content_checksum(pages: list[PageText]) -> str:
    """Hex digest over the concatenated page texts (form-feed separated)."""
    joined = "\x0c".join(p.text for p in pages)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def _document_id(course_id: str, checksum: str) -> str:
    h = hashlib.sha256(f"{course_id}:{checksum}".encode("utf-8")).hexdigest()
    return f"d{h[:16]}"


def _pages_from_text(text: str) -> list[PageText]:
    parts = text.split("\x0c")
    return [PageText(i + 1, part) for i, part in enumerate(parts)]


def _pages_from_interchange(raw: bytes) -> tuple[str, list[PageText]]:
    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedPayload(f"interchange payload is not valid UTF-8 JSON: {exc}")
    if not isinstance(payload, dict):
        raise MalformedPayload("interchange payload must be a JSON object")
    title = payload.get("title")
    pages = payload.get("pages")
    if not isinstance(title, str) or not isinstance(pages, list) or not pages:
        raise MalformedPayload("payload requires 'title' (string) and non-empty 'pages' (list)")
    seen: set[int] = set()
    out: list[PageText] = []
    for item in pages:
        if not isinstance(item, dict):
            raise MalformedPayload("each page must be an object")
        num = item.get("page_number")
        text = item.get("text")
        if not isinstance(num, int) or isinstance(num, bool) or num <= 0:
            raise MalformedPayload(f"page_number must be a positive integer, got {num!r}")
        if not isinstance(text, str):
            raise MalformedPayload("page text must be a string")
        if num in seen:
            raise MalformedPayload(f"duplicate page_number {num}")
        seen.add(num)
        out.append(PageText(num, text))
    out.sort(key=lambda p: p.page_number)
    return title, out


def parse_document(raw: bytes, source_format: str, course_id: str,
                   title: str = "untitled") -> ExtractedDocument:
    """Parse an upload into a normalized document. Deterministic in its inputs."""
    if source_format not in SOURCE_FORMATS:
        raise UnsupportedFormat(f"unknown format tag {source_format!r}")
    if source_format == "external_extracted":
        title, pages = _pages_from_interchange(raw)
    else:
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedPayload(f"upload is not valid UTF-8: {exc}")
        pages = _pages_from_text(text)
    if not any(p.text.strip() for p in pages):
        raise EmptyDocument("no extractable text")
    checksum = content_checksum(pages)
    return ExtractedDocument(
        document_id=_document_id(course_id, checksum),
        course_id=course_id,
        title=title,
        pages=pages,
        source_format=source_format,
        checksum=checksum,
    )


def _snap_start(text: str, start: int) -> int:
    """Move a chunk start backward to just after the nearest whitespace.

    Bounded by SNAP_WINDOW; the caller closes any coverage gap this could open.
    """
    if start == 0 or text[start].isspace() or text[start - 1].isspace():
        return start
    for j in range(start - 1, max(start - 1 - SNAP_WINDOW, -1), -1):
        if text[j].isspace():
            return j + 1
    return start


def chunk_page(page: PageText, profile: ChunkProfile) -> list[tuple[int, int]]:
    """Sliding-window spans over one page; stride = chunk_size - overlap."""
    text = page.text
    n = len(text)
    if not text:
        return []
    stride = profile.chunk_size - profile.overlap
    spans: list[tuple[int, int]] = []
    nominal = 0
    prev_end = 0
    while nominal < n:
        start = nominal
        if profile.snap_to_whitespace:
            start = _snap_start(text, start)
        # never leave a gap behind the previous chunk
        start = min(start, prev_end)
        end = min(start + profile.chunk_size, n)
        spans.append((start, end))
        prev_end = end
        if end >= n:
            break
        nominal += stride
    return spans


def chunk_text(doc: ExtractedDocument, profile: ChunkProfile) -> list[Chunk]:
    """Split a document into chunks; chunks never span pages."""
    chunks: list[Chunk] = []
    ordinal = 0
    for page in doc.pages:
        for start, end in chunk_page(page, profile):
            chunks.append(Chunk(
                chunk_id=f"{doc.document_id}-c{ordinal:05d}",
                document_id=doc.document_id,
                course_id=doc.course_id,
                page_number=page.page_number,
                char_start=start,
                char_end=end,
                text=page.text[start:end],
                ordinal=ordinal,
            ))
            ordinal += 1
    return chunks
