"""Background job queue: per-course FIFO over a shared worker pool.

Jobs are persisted through the entity store on every state change so a
restarted process can re-queue anything that had not finished. Within one
course, jobs run strictly one at a time in submission order; different
courses run in parallel up to the worker count.
"""

from __future__ import annotations

import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field

from .errors import QueueFull, UnknownJob
from .store import EntityStore

JOB_KINDS = ("ingest", "quiz_generation", "eval_sweep")
_NO_COURSE = "__global__"


@dataclass
class Job:
    job_id: str
    kind: str
    state: str = "queued"  # queued -> running -> succeeded | failed
    progress: float = 0.0
    course_id: str | None = None
    payload: dict = field(default_factory=dict)
    result: dict | None = None
    failure_reason: str | None = None
    created_at: float = field(default_factory=time.time)

    def as_dict(self) -> dict:
        return {
            "job_id": self.job_id, "kind": self.kind, "state": self.state,
            "progress": self.progress, "course_id": self.course_id,
            "result": self.result, "failure_reason": self.failure_reason,
            "created_at": self.created_at,
        }


class JobQueue:
    def __init__(self, store: EntityStore | None = None, workers: int = 4,
                 capacity: int = 256):
        self._store = store
        self._handlers: dict[str, callable] = {}
        self._jobs: dict[str, Job] = {}
        self._versions: dict[str, int] = {}
        self._pending: dict[str, deque[str]] = {}   # course key -> job ids
        self._busy: set[str] = set()                 # course keys running now
        self._cond = threading.Condition()
        self._capacity = capacity
        self._closed = False
        self._threads = [threading.Thread(target=self._worker, daemon=True)
                         for _ in range(workers)]
        if store is not None:
            self._recover()
        for t in self._threads:
            t.start()

    def register_handler(self, kind: str, fn) -> None:
        """fn(payload: dict) -> result dict; exceptions fail the job."""
        self._handlers[kind] = fn

    # --- persistence ------------------------------------------------------

    def _persist(self, job: Job) -> None:
        if self._store is None:
            return
        body = {"kind": job.kind, "state": job.state, "progress": job.progress,
                "payload": job.payload, "result": job.result,
                "failure_reason": job.failure_reason, "created_at": job.created_at}
        version = self._versions.get(job.job_id, 0)
        self._versions[job.job_id] = self._store.persist_entity(
            "job", job.job_id, body, expected_version=version,
            course_id=job.course_id)

    def _recover(self) -> None:
        records = sorted(self._store.fetch_entities("job"),
                         key=lambda r: r.body.get("created_at", 0.0))
        for rec in records:
            body = rec.body
            if body["state"] not in ("queued", "running"):
                continue
            job = Job(job_id=rec.entity_id, kind=body["kind"], state="queued",
                      course_id=rec.course_id, payload=body.get("payload", {}),
                      created_at=body.get("created_at", 0.0))
            self._jobs[job.job_id] = job
            self._versions[job.job_id] = rec.version
            self._pending.setdefault(job.course_id or _NO_COURSE,
                                     deque()).append(job.job_id)
            self._persist(job)

    # --- public API -------------------------------------------------------

    def enqueue(self, kind: str, payload: dict, course_id: str | None = None) -> str:
        if kind not in self._handlers:
            raise ValueError(f"no handler registered for job kind {kind!r}")
        with self._cond:
            pending = sum(len(q) for q in self._pending.values())
            if pending >= self._capacity:
                raise QueueFull(f"job queue is at capacity ({self._capacity})")
            job = Job(job_id=f"j{uuid.uuid4().hex[:12]}", kind=kind,
                      course_id=course_id, payload=payload)
            self._jobs[job.job_id] = job
            self._persist(job)
            self._pending.setdefault(course_id or _NO_COURSE, deque()).append(job.job_id)
            self._cond.notify()
            return job.job_id

    def poll(self, job_id: str) -> Job:
        with self._cond:
            job = self._jobs.get(job_id)
        if job is None:
            if self._store is not None:
                recs = self._store.fetch_entities("job", ids=[job_id])
                if recs:
                    body = recs[0].body
                    return Job(job_id=job_id, kind=body["kind"], state=body["state"],
                               progress=body.get("progress", 0.0),
                               course_id=recs[0].course_id,
                               result=body.get("result"),
                               failure_reason=body.get("failure_reason"),
                               created_at=body.get("created_at", 0.0))
            raise UnknownJob(f"no job {job_id!r}")
        return job

    def wait(self, job_id: str, timeout: float = 30.0) -> Job:
        deadline = time.time() + timeout
        while time.time() < deadline:
            job = self.poll(job_id)
            if job.state in ("succeeded", "failed"):
                return job
            time.sleep(0.01)
        raise TimeoutError(f"job {job_id} did not finish within {timeout}s")

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()
        for t in self._threads:
            t.join(timeout=5)

    # --- worker loop ------------------------------------------------------

    def _next_job(self) -> Job | None:
        # first queued job whose course is not already running
        for course_key, queue in self._pending.items():
            if queue and course_key not in self._busy:
                job_id = queue.popleft()
                self._busy.add(course_key)
                return self._jobs[job_id]
        return None

    def _worker(self) -> None:
        while True:
            with self._cond:
                job = self._next_job()
                while job is None and not self._closed:
                    self._cond.wait(timeout=0.2)
                    job = self._next_job()
                if job is None:
                    return
                job.state = "running"
                self._persist(job)
            course_key = job.course_id or _NO_COURSE
            try:
                result = self._handlers[job.kind](job.payload)
                with self._cond:
                    job.state = "succeeded"
                    job.progress = 1.0
                    job.result = result if isinstance(result, dict) else {"value": result}
                    self._persist(job)
            except Exception as exc:  # any handler failure fails the job
                with self._cond:
                    job.state = "failed"
                    job.failure_reason = f"{exc.__class__.__name__}: {exc}"
                    self._persist(job)
            finally:
                with self._cond:
                    self._busy.discard(course_key)
                    self._cond.notify_all()
