"""File-backed persistence for entities and blobs.

Zero-dependency reference backend: one JSON file per entity under a
directory per kind, written temp-then-rename so acknowledged writes survive
an abrupt stop. Optimistic versioning serializes writers per key; course
scoping is enforced here as well as at the gateway.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from .errors import (IntegrityError, NotFound, SchemaViolation, TooLarge,
                     VersionConflict)

SCHEMA_VERSION = 1
MAX_BLOB_BYTES = 100 * 1024 * 1024

# Minimal per-kind schemas: required body keys.
ENTITY_SCHEMAS: dict[str, tuple[str, ...]] = {
    "course": ("name", "discipline"),
    "document": ("title", "checksum"),
    "turn": ("session_id", "prompt", "answer", "mode"),
    "quiz": ("review_state", "questions"),
    "attempt": ("quiz_id", "user_id", "score"),
    "event": ("user_id", "kind"),
    "job": ("kind", "state"),
    "session": ("user_id",),
}


@dataclass
class EntityRecord:
    entity_kind: str
    entity_id: str
    body: dict
    version: int
    course_id: str | None = None
    created_at: float = 0.0
    updated_at: float = 0.0


@dataclass(frozen=True)
class BlobRef:
    blob_id: str
    course_id: str
    content_type: str
    size_bytes: int
    checksum: str


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with open(tmp, "wb") as f:
        f.write(data)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


class EntityStore:
    """One directory per kind; one JSON file per entity."""

    def __init__(self, root: str | Path, migrations: dict | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        # hook: {(kind, from_schema_version): callable(body) -> body}
        self.migrations = migrations or {}

    def _path(self, kind: str, entity_id: str) -> Path:
        d = self.root / kind
        d.mkdir(parents=True, exist_ok=True)
        return d / f"{entity_id}.json"

    def _validate(self, kind: str, body: dict) -> None:
        required = ENTITY_SCHEMAS.get(kind)
        if required is None:
            raise SchemaViolation(f"unknown entity kind {kind!r}")
        missing = [k for k in required if k not in body]
        if missing:
            raise SchemaViolation(f"{kind} body missing keys: {missing}")

    def persist_entity(self, kind: str, entity_id: str, body: dict,
                       expected_version: int = 0, course_id: str | None = None) -> int:
        """Create (expected_version=0) or update; returns the new version."""
        self._validate(kind, body)
        now = time.time()
        with self._lock:
            path = self._path(kind, entity_id)
            if path.exists():
                current = json.loads(path.read_text(encoding="utf-8"))
                if current["version"] != expected_version:
                    raise VersionConflict(
                        f"{kind}/{entity_id}: version is {current['version']}, "
                        f"write expected {expected_version}")
                record = {
                    "version": current["version"] + 1,
                    "course_id": course_id if course_id is not None else current.get("course_id"),
                    "created_at": current["created_at"],
                    "updated_at": now,
                    "schema_version": SCHEMA_VERSION,
                    "body": body,
                }
            else:
                if expected_version != 0:
                    raise VersionConflict(
                        f"{kind}/{entity_id} does not exist; create with expected_version=0")
                record = {
                    "version": 1,
                    "course_id": course_id,
                    "created_at": now,
                    "updated_at": now,
                    "schema_version": SCHEMA_VERSION,
                    "body": body,
                }
            _atomic_write(path, json.dumps(record, sort_keys=True).encode("utf-8"))
            return record["version"]

    def _load(self, kind: str, path: Path) -> EntityRecord:
        raw = json.loads(path.read_text(encoding="utf-8"))
        body = raw["body"]
        hook = self.migrations.get((kind, raw.get("schema_version", 0)))
        if hook is not None:
            body = hook(body)
        return EntityRecord(
            entity_kind=kind,
            entity_id=path.stem,
            body=body,
            version=raw["version"],
            course_id=raw.get("course_id"),
            created_at=raw["created_at"],
            updated_at=raw["updated_at"],
        )

    def get_entity(self, kind: str, entity_id: str) -> EntityRecord:
        path = self._path(kind, entity_id)
        if not path.exists():
            raise NotFound(f"{kind}/{entity_id} not found")
        with self._lock:
            return self._load(kind, path)

    def fetch_entities(self, kind: str, course_id: str | None = None,
                       ids: list[str] | None = None,
                       time_range: tuple[float, float] | None = None) -> list[EntityRecord]:
        d = self.root / kind
        if not d.exists():
            return []
        with self._lock:
            records = [self._load(kind, p) for p in sorted(d.glob("*.json"))]
        if course_id is not None:
            records = [r for r in records if r.course_id == course_id]
        if ids is not None:
            wanted = set(ids)
            records = [r for r in records if r.entity_id in wanted]
        if time_range is not None:
            lo, hi = time_range
            records = [r for r in records if lo <= r.created_at <= hi]
        return records

    def delete_entity(self, kind: str, entity_id: str) -> bool:
        with self._lock:
            path = self._path(kind, entity_id)
            if path.exists():
                path.unlink()
                return True
            return False


class BlobStore:
    def __init__(self, root: str | Path, max_bytes: int = MAX_BLOB_BYTES):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.max_bytes = max_bytes
        self._lock = threading.RLock()

    def _path(self, course_id: str, blob_id: str) -> Path:
        d = self.root / course_id
        d.mkdir(parents=True, exist_ok=True)
        return d / blob_id

    def put_blob(self, course_id: str, data: bytes, content_type: str) -> BlobRef:
        if len(data) > self.max_bytes:
            raise TooLarge(f"blob of {len(data)} bytes exceeds limit {self.max_bytes}")
        checksum = hashlib.sha256(data).hexdigest()
        blob_id = f"b{uuid.uuid4().hex}"
        with self._lock:
            _atomic_write(self._path(course_id, blob_id), data)
            meta = {"content_type": content_type, "checksum": checksum,
                    "size_bytes": len(data)}
            _atomic_write(self._path(course_id, blob_id + ".meta"),
                          json.dumps(meta).encode("utf-8"))
        return BlobRef(blob_id, course_id, content_type, len(data), checksum)

    def get_blob(self, ref: BlobRef) -> bytes:
        path = self._path(ref.course_id, ref.blob_id)
        if not path.exists():
            raise NotFound(f"blob {ref.blob_id} not found")
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != ref.checksum:
            raise IntegrityError(f"blob {ref.blob_id} failed checksum verification")
        return data
