"""Per-course vector collections with exact top-K cosine retrieval.

Exact linear scan over normalized vectors (dot product = cosine). Course
isolation is structural: each course owns its own collection and queries
never see entries from any other course. Ties break by (document_id,
ordinal) so retrieval is reproducible across runs and sweeps.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingVector
from .errors import CourseMismatch, UnknownCourse

SNAPSHOT_VERSION = 1
_NORM_TOL = 1e-6


@dataclass(frozen=True)
class IndexEntry:
    chunk_id: str
    course_id: str
    vector: EmbeddingVector
    payload: dict  # document_id, page_number, ordinal


@dataclass(frozen=True)
class RetrievalHit:
    chunk_id: str
    score: float
    payload: dict


class _Collection:
    def __init__(self, dimension: int):
        self.dimension = dimension
        self.entries: dict[str, tuple[np.ndarray, dict]] = {}
        self._matrix: np.ndarray | None = None
        self._order: list[str] = []

    def invalidate(self):
        self._matrix = None

    def matrix(self) -> tuple[np.ndarray, list[str]]:
        if self._matrix is None:
            self._order = sorted(
                self.entries,
                key=lambda cid: (self.entries[cid][1].get("document_id", ""),
                                 self.entries[cid][1].get("ordinal", 0), cid),
            )
            if self._order:
                self._matrix = np.stack([self.entries[c][0] for c in self._order])
            else:
                self._matrix = np.zeros((0, self.dimension))
        return self._matrix, self._order


class VectorIndex:
    """Registry of per-course collections. Many readers, one writer per course."""

    def __init__(self, dimension: int = 256):
        self.dimension = dimension
        self._collections: dict[str, _Collection] = {}
        self._lock = threading.RLock()
        self._course_locks: dict[str, threading.RLock] = {}

    def _course_lock(self, course_id: str) -> threading.RLock:
        with self._lock:
            return self._course_locks.setdefault(course_id, threading.RLock())

    def course_size(self, course_id: str) -> int:
        with self._lock:
            coll = self._collections.get(course_id)
            return len(coll.entries) if coll else 0

    def has_course(self, course_id: str) -> bool:
        with self._lock:
            return course_id in self._collections

    def upsert_chunks(self, course_id: str, entries: list[IndexEntry]) -> dict:
        for e in entries:
            if e.course_id != course_id:
                raise CourseMismatch(
                    f"entry {e.chunk_id} belongs to course {e.course_id!r}, not {course_id!r}")
        inserted = replaced = 0
        with self._course_lock(course_id):
            with self._lock:
                coll = self._collections.setdefault(course_id, _Collection(self.dimension))
            for e in entries:
                vec = e.vector.to_numpy()
                if abs(np.linalg.norm(vec) - 1.0) > _NORM_TOL:
                    raise ValueError(f"entry {e.chunk_id} is not unit-norm")
                if e.chunk_id in coll.entries:
                    replaced += 1
                else:
                    inserted += 1
                coll.entries[e.chunk_id] = (vec, dict(e.payload))
            coll.invalidate()
        return {"inserted": inserted, "replaced": replaced}

    def query_top_k(self, course_id: str, query_vector: EmbeddingVector, k: int,
                    document_ids: list[str] | None = None) -> list[RetrievalHit]:
        if k < 1:
            raise ValueError("k must be >= 1")
        with self._lock:
            coll = self._collections.get(course_id)
        if coll is None:
            raise UnknownCourse(f"no collection for course {course_id!r}")
        with self._course_lock(course_id):
            matrix, order = coll.matrix()
            payloads = [coll.entries[c][1] for c in order]
        if matrix.shape[0] == 0:
            return []
        scores = matrix @ query_vector.to_numpy()
        idx = range(len(order))
        if document_ids is not None:
            allowed = set(document_ids)
            idx = [i for i in idx if payloads[i].get("document_id") in allowed]
        # rows are pre-sorted by (document_id, ordinal); a stable sort on
        # -score therefore applies the documented tie-break for free
        ranked = sorted(idx, key=lambda i: -scores[i])
        return [RetrievalHit(order[i], float(scores[i]), dict(payloads[i]))
                for i in ranked[:k]]

    def delete_course_collection(self, course_id: str) -> int:
        with self._course_lock(course_id):
            with self._lock:
                coll = self._collections.pop(course_id, None)
            if coll is None:
                raise UnknownCourse(f"no collection for course {course_id!r}")
            return len(coll.entries)

    # --- snapshot persistence (one file per course) -----------------------

    def save_snapshot(self, course_id: str, path: str | Path) -> None:
        with self._lock:
            coll = self._collections.get(course_id)
        if coll is None:
            raise UnknownCourse(f"no collection for course {course_id!r}")
        with self._course_lock(course_id):
            lines = [json.dumps({"version": SNAPSHOT_VERSION,
                                 "dimension": coll.dimension,
                                 "count": len(coll.entries),
                                 "course_id": course_id})]
            for chunk_id in sorted(coll.entries):
                vec, payload = coll.entries[chunk_id]
                lines.append(json.dumps({"chunk_id": chunk_id,
                                         "payload": payload,
                                         "vector": vec.tolist()}))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def load_snapshot(self, path: str | Path) -> str:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        header = json.loads(lines[0])
        if header["version"] != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {header['version']}")
        if header["dimension"] != self.dimension:
            raise ValueError("snapshot dimension does not match index dimension")
        course_id = header["course_id"]
        entries = []
        for line in lines[1:]:
            rec = json.loads(line)
            vec = EmbeddingVector(tuple(rec["vector"]), "snapshot")
            if abs(np.linalg.norm(vec.to_numpy()) - 1.0) > 1e-4:
                raise ValueError(f"snapshot entry {rec['chunk_id']} is not unit-norm")
            entries.append(IndexEntry(rec["chunk_id"], course_id, vec, rec["payload"]))
        if len(entries) != header["count"]:
            raise ValueError("snapshot count mismatch")
        self.upsert_chunks(course_id, entries)
        return course_id
