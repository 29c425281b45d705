"""Orchestration layer tying ingest, retrieval, generation and review together.

One ``TutorEngine`` owns the stores, the per-course vector index, the
progress tracker and the provider clients. The gateway and the CLI are thin
wrappers over this object; tests drive it directly.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path

from . import serde
from .embeddings import HashingEmbeddingProvider
from .errors import (EmptyPrompt, GenerationParseError, NotFound, UnknownCourse,
                     UnknownQuiz)
from .genproviders import EchoStubGenerator
from .index import IndexEntry, VectorIndex
from .ingest import (Chunk, ChunkProfile, PROFILES, chunk_text, parse_document)
from .intent import classify_intent, fit_centroids, load_seed_exemplars
from .moodle_xml import export_moodle_xml
from .progress import InteractionEvent, ProgressTracker
from .quiz import (BloomLevel, Quiz, QuizScope, ReviewState, bloom_schedule,
                   grade_attempt, parse_generated_questions,
                   transition_review_state)
from .tutor import (ChatTurn, REFUSAL_TEXT, RetrievedContext,
                    compose_prompt, default_mode_profile, extract_citations)
from .store import BlobStore, EntityStore

QUIZ_RETRIES = 2
WHOLE_COURSE_SAMPLE_FACTOR = 3

_GRAMMAR_INSTRUCTIONS = """\
mode: quiz_generation
You write quiz questions grounded strictly in the provided context.
Emit each question in exactly this line format, nothing else:
Q: <question stem>
A: <the correct answer>
X: <a wrong option>            (repeat X for more wrong options; omit for short answer)
EXPLAIN: <why the answer is correct, citing the context>
CITE: [S<n>]                   (the context marker(s) the question is based on)
"""


class TutorEngine:
    def __init__(self, data_dir: str | Path, embedder=None, generator=None,
                 refusal_text: str = REFUSAL_TEXT, template_dir=None,
                 clock=time.time, quiz_generation_by_students: bool = False):
        self.data_dir = Path(data_dir)
        self.embedder = embedder or HashingEmbeddingProvider()
        self.generator = generator or EchoStubGenerator()
        self.refusal_text = refusal_text
        self.template_dir = template_dir
        self.clock = clock
        self.quiz_generation_by_students = quiz_generation_by_students

        self.store = EntityStore(self.data_dir / "entities")
        self.blobs = BlobStore(self.data_dir / "blobs")
        self.index = VectorIndex(dimension=self.embedder.dimension)
        self.progress = ProgressTracker()

        self._chunks: dict[str, dict[str, Chunk]] = {}   # course -> chunk_id -> Chunk
        self._doc_titles: dict[str, dict[str, str]] = {}  # course -> doc_id -> title
        self._quiz_versions: dict[str, int] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._lock = threading.RLock()

        self._intent_model = None
        self._reload_documents()

    # --- intent -----------------------------------------------------------

    @property
    def intent_model(self):
        with self._lock:
            if self._intent_model is None:
                self._intent_model = fit_centroids(load_seed_exemplars(), self.embedder)
            return self._intent_model

    def reload_intent_exemplars(self, exemplars=None) -> None:
        with self._lock:
            if exemplars is None:
                self._intent_model = None
            else:
                self._intent_model = fit_centroids(exemplars, self.embedder)

    def classify(self, prompt: str):
        return classify_intent(prompt, self.intent_model, self.embedder)

    # --- courses ----------------------------------------------------------

    def create_course(self, name: str, discipline: str = "stem",
                      course_id: str | None = None) -> str:
        course_id = course_id or f"course-{uuid.uuid4().hex[:8]}"
        self.store.persist_entity("course", course_id,
                                  {"name": name, "discipline": discipline},
                                  course_id=course_id)
        self.progress.register_course(course_id)
        with self._lock:
            self._chunks.setdefault(course_id, {})
            self._doc_titles.setdefault(course_id, {})
        return course_id

    def course_exists(self, course_id: str) -> bool:
        try:
            self.store.get_entity("course", course_id)
            return True
        except NotFound:
            return False

    def get_course(self, course_id: str) -> dict:
        try:
            rec = self.store.get_entity("course", course_id)
        except NotFound:
            raise UnknownCourse(f"no course {course_id!r}")
        return {"course_id": course_id, **rec.body}

    def course_profile(self, course_id: str) -> ChunkProfile:
        return PROFILES[self.get_course(course_id)["discipline"]]

    def delete_course_data(self, course_id: str) -> int:
        removed = self.index.delete_course_collection(course_id)
        with self._lock:
            self._chunks.pop(course_id, None)
            self._doc_titles.pop(course_id, None)
        return removed

    # --- ingest -----------------------------------------------------------

    def _reload_documents(self) -> None:
        """Rebuild in-memory chunk maps and the index from persisted documents."""
        for rec in self.store.fetch_entities("course"):
            self.progress.register_course(rec.entity_id)
            self._chunks.setdefault(rec.entity_id, {})
            self._doc_titles.setdefault(rec.entity_id, {})
        for rec in self.store.fetch_entities("document"):
            course_id = rec.course_id
            body = rec.body
            chunks = [Chunk(**c) for c in body.get("chunks", [])]
            self._register_chunks(course_id, rec.entity_id, body["title"], chunks,
                                  reindex=True)

    def _register_chunks(self, course_id: str, document_id: str, title: str,
                         chunks: list[Chunk], reindex: bool) -> None:
        with self._lock:
            cmap = self._chunks.setdefault(course_id, {})
            for c in chunks:
                cmap[c.chunk_id] = c
            self._doc_titles.setdefault(course_id, {})[document_id] = title
        self.progress.register_chunks(course_id, document_id,
                                      [c.chunk_id for c in chunks])
        if reindex and chunks:
            vectors = self.embedder.embed_texts([c.text for c in chunks])
            entries = [IndexEntry(c.chunk_id, course_id, v,
                                  {"document_id": c.document_id,
                                   "page_number": c.page_number,
                                   "ordinal": c.ordinal})
                       for c, v in zip(chunks, vectors)]
            self.index.upsert_chunks(course_id, entries)

    def ingest_material(self, course_id: str, raw: bytes, source_format: str,
                        title: str = "untitled",
                        profile: ChunkProfile | None = None) -> dict:
        """Parse, chunk, embed and index one upload. Duplicate checksums no-op."""
        if not self.course_exists(course_id):
            raise UnknownCourse(f"no course {course_id!r}")
        profile = profile or self.course_profile(course_id)
        doc = parse_document(raw, source_format, course_id, title=title)
        try:
            existing = self.store.get_entity("document", doc.document_id)
        except NotFound:
            existing = None
        if existing is not None and existing.body["checksum"] == doc.checksum:
            return {"document_id": doc.document_id, "duplicate": True,
                    "chunk_count": len(existing.body.get("chunks", [])),
                    "new_index_entries": 0}
        chunks = chunk_text(doc, profile)
        body = {
            "title": doc.title,
            "checksum": doc.checksum,
            "source_format": doc.source_format,
            "pages": [{"page_number": p.page_number, "text": p.text} for p in doc.pages],
            "chunks": [vars(c) for c in chunks],
        }
        self.store.persist_entity("document", doc.document_id, body,
                                  course_id=course_id)
        self._register_chunks(course_id, doc.document_id, doc.title, chunks,
                              reindex=True)
        return {"document_id": doc.document_id, "duplicate": False,
                "chunk_count": len(chunks), "new_index_entries": len(chunks)}

    # --- chat -------------------------------------------------------------

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def _contexts_for_hits(self, course_id: str, hits) -> list[RetrievedContext]:
        with self._lock:
            cmap = self._chunks.get(course_id, {})
            titles = self._doc_titles.get(course_id, {})
        out = []
        for hit in hits:
            chunk = cmap[hit.chunk_id]
            out.append(RetrievedContext(
                chunk_id=chunk.chunk_id,
                document_id=chunk.document_id,
                document_title=titles.get(chunk.document_id, "untitled"),
                page_number=chunk.page_number,
                ordinal=chunk.ordinal,
                text=chunk.text,
                score=hit.score,
            ))
        return out

    def answer_question(self, course_id: str, session_id: str, user_id: str,
                        prompt: str, mode: str = "quick") -> ChatTurn:
        if not prompt.strip():
            raise EmptyPrompt("prompt is empty")
        course = self.get_course(course_id)
        profile = default_mode_profile(mode, course["discipline"], self.template_dir)
        with self._session_lock(session_id):
            history = self.list_turns(course_id, session_id)
            try:
                qvec = self.embedder.embed_texts([prompt])[0]
                hits = (self.index.query_top_k(course_id, qvec, profile.top_k)
                        if self.index.has_course(course_id) else [])
            except UnknownCourse:
                hits = []
            contexts = self._contexts_for_hits(course_id, hits)
            created_at = self.clock()
            if not contexts:
                answer, usage, citations = self.refusal_text, {}, []
            else:
                parts = compose_prompt(prompt, contexts, profile, history)
                result = self.generator.generate(parts["system"], parts["user"],
                                                 profile.temperature)
                answer = result.text
                usage = {"tokens_in": result.tokens_in, "tokens_out": result.tokens_out}
                citations = extract_citations(answer, contexts)
            turn = ChatTurn(
                turn_id=f"t{uuid.uuid4().hex[:12]}",
                session_id=session_id,
                course_id=course_id,
                user_id=user_id,
                prompt=prompt,
                mode=mode,
                retrieved=contexts,
                answer=answer,
                citations=citations,
                created_at=created_at,
                provider_usage=usage,
            )
            self.store.persist_entity("turn", turn.turn_id, serde.turn_to_dict(turn),
                                      course_id=course_id)
            if citations:
                self.progress.record_interaction(InteractionEvent(
                    user_id=user_id, course_id=course_id, kind="chat_citation",
                    chunk_ids=tuple(c.chunk_id for c in citations),
                    timestamp=created_at))
            return turn

    def list_turns(self, course_id: str, session_id: str) -> list[ChatTurn]:
        records = self.store.fetch_entities("turn", course_id=course_id)
        turns = []
        for rec in records:
            body = rec.body
            if body["session_id"] != session_id:
                continue
            turns.append(ChatTurn(
                turn_id=rec.entity_id, session_id=body["session_id"],
                course_id=course_id, user_id=body.get("user_id", ""),
                prompt=body["prompt"], mode=body["mode"],
                retrieved=[RetrievedContext(**c) for c in body.get("retrieved", [])],
                answer=body["answer"],
                citations=[serde.citation_from_dict(c) for c in body.get("citations", [])],
                created_at=body.get("created_at", 0.0),
                provider_usage=body.get("provider_usage", {}),
                status=body.get("status", "succeeded"),
            ))
        turns.sort(key=lambda t: (t.created_at, t.turn_id))
        return turns

    # --- quizzes ----------------------------------------------------------

    def _quiz_contexts(self, course_id: str, scope: QuizScope,
                       top_k: int = 10) -> list[RetrievedContext]:
        with self._lock:
            cmap = dict(self._chunks.get(course_id, {}))
        if scope.kind == "topic":
            qvec = self.embedder.embed_texts([scope.topic])[0]
            hits = self.index.query_top_k(course_id, qvec, top_k)
            return self._contexts_for_hits(course_id, hits)
        chunks = sorted(cmap.values(), key=lambda c: (c.document_id, c.ordinal))
        if scope.kind == "documents":
            allowed = set(scope.document_ids)
            chunks = [c for c in chunks if c.document_id in allowed]
        # stratified round-robin across documents to avoid single-doc bias
        budget = min(top_k * WHOLE_COURSE_SAMPLE_FACTOR, len(chunks))
        by_doc: dict[str, list[Chunk]] = {}
        for c in chunks:
            by_doc.setdefault(c.document_id, []).append(c)
        picked: list[Chunk] = []
        rank = 0
        while len(picked) < budget:
            advanced = False
            for doc in sorted(by_doc):
                doc_chunks = by_doc[doc]
                if rank < len(doc_chunks) and len(picked) < budget:
                    picked.append(doc_chunks[rank])
                    advanced = True
            if not advanced:
                break
            rank += 1
        with self._lock:
            titles = self._doc_titles.get(course_id, {})
        return [RetrievedContext(c.chunk_id, c.document_id,
                                 titles.get(c.document_id, "untitled"),
                                 c.page_number, c.ordinal, c.text, 0.0)
                for c in picked]

    def generate_quiz(self, course_id: str, scope: QuizScope, n_questions: int,
                      kinds: list[str] | None = None, bloom_mix=None,
                      created_by: str = "") -> Quiz:
        if not 1 <= n_questions <= 50:
            raise ValueError("n_questions must be in [1, 50]")
        if not self.course_exists(course_id):
            raise UnknownCourse(f"no course {course_id!r}")
        contexts = self._quiz_contexts(course_id, scope)
        if not contexts:
            raise GenerationParseError("course has no indexed material to quiz on")
        schedule = bloom_schedule(n_questions, bloom_mix)
        kinds = kinds or ["multichoice"]
        marker_block = "\n".join(
            f"[S{i}] ({c.document_title}, p.{c.page_number}) {c.text}"
            for i, c in enumerate(contexts, start=1))
        system = _GRAMMAR_INSTRUCTIONS + "\nContext:\n" + marker_block + "\n"
        questions = []
        for qi in range(n_questions):
            bloom = schedule[qi]
            kind = kinds[qi % len(kinds)]
            user = (f"Write exactly 1 {kind} question at Bloom level "
                    f"{bloom.value} about the context.")
            got = None
            for _attempt in range(1 + QUIZ_RETRIES):
                result = self.generator.generate(system, user, 0.3)
                parsed = parse_generated_questions(result.text, contexts, bloom)
                if parsed:
                    got = parsed[0]
                    break
            if got is not None:
                questions.append(got)
        if len(questions) < (n_questions + 1) // 2:
            raise GenerationParseError(
                f"only {len(questions)} of {n_questions} requested questions "
                "parsed after retries")
        quiz = Quiz(
            quiz_id=f"quiz-{uuid.uuid4().hex[:10]}",
            course_id=course_id,
            scope=scope,
            questions=questions,
            created_by=created_by,
            shortfall=n_questions - len(questions),
        )
        self._persist_quiz(quiz)
        return quiz

    def _persist_quiz(self, quiz: Quiz) -> None:
        with self._lock:
            version = self._quiz_versions.get(quiz.quiz_id, 0)
            self._quiz_versions[quiz.quiz_id] = self.store.persist_entity(
                "quiz", quiz.quiz_id, serde.quiz_to_dict(quiz),
                expected_version=version, course_id=quiz.course_id)

    def get_quiz(self, quiz_id: str) -> Quiz:
        try:
            rec = self.store.get_entity("quiz", quiz_id)
        except NotFound:
            raise UnknownQuiz(f"no quiz {quiz_id!r}")
        with self._lock:
            self._quiz_versions[quiz_id] = rec.version
        return serde.quiz_from_dict(rec.body)

    def review_quiz(self, quiz_id: str, action: str, actor_id: str,
                    actor_role: str, edited_questions=None,
                    expected_revision: int | None = None) -> Quiz:
        with self._lock:
            quiz = self.get_quiz(quiz_id)
            transition_review_state(quiz, action, actor_id, actor_role,
                                    edited_questions, expected_revision)
            self._persist_quiz(quiz)
            return quiz

    def export_quiz(self, quiz_id: str) -> bytes:
        return export_moodle_xml(self.get_quiz(quiz_id))

    def attempt_quiz(self, quiz_id: str, answers: dict, user_id: str):
        quiz = self.get_quiz(quiz_id)
        attempt = grade_attempt(quiz, answers, user_id)
        body = {"quiz_id": quiz_id, "user_id": user_id, "score": attempt.score,
                "answers": {k: v for k, v in attempt.answers.items()},
                "per_question": {
                    qid: {"correct": info["correct"],
                          "explanation": info["explanation"],
                          "citations": [serde.citation_to_dict(c)
                                        for c in info["citations"]]}
                    for qid, info in attempt.per_question.items()}}
        self.store.persist_entity("attempt", attempt.attempt_id, body,
                                  course_id=quiz.course_id)
        chunk_ids = tuple(sorted({c.chunk_id for q in quiz.questions
                                  for c in q.citations}))
        if chunk_ids:
            self.progress.record_interaction(InteractionEvent(
                user_id=user_id, course_id=quiz.course_id, kind="quiz_attempt",
                chunk_ids=chunk_ids, timestamp=self.clock()))
        return attempt

    # --- dashboards and logs ----------------------------------------------

    def course_progress(self, user_id: str, course_id: str) -> dict:
        statuses, aggregate = self.progress.course_coverage(user_id, course_id)
        return {
            "materials": [{"document_id": s.document_id, "status": s.status.value,
                           "coverage": s.coverage,
                           "interaction_count": s.interaction_count}
                          for s in statuses],
            "aggregate": aggregate,
        }

    def course_logs(self, course_id: str) -> dict:
        turns = self.store.fetch_entities("turn", course_id=course_id)
        return {
            "turns": [dict(body=r.body, turn_id=r.entity_id) for r in turns],
            "events": self.progress.export_events(course_id),
        }
