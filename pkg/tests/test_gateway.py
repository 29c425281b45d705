import threading
import time

import pytest
from fastapi.testclient import TestClient

from coursetutor.gateway import GatewayConfig, create_app
from coursetutor.genproviders import ScriptedGenerator
from coursetutor.jobs import JobQueue

from tests.test_quiz import WELL_FORMED

TOKENS = {
    "tok-teacher": {"user_id": "t1", "role": "teacher", "courses": ["course-fix"]},
    "tok-student": {"user_id": "s1", "role": "student", "courses": ["course-fix"]},
    "tok-student2": {"user_id": "s2", "role": "student", "courses": ["course-fix"]},
    "tok-outsider": {"user_id": "o1", "role": "student", "courses": ["other-course"]},
    "tok-admin": {"user_id": "a1", "role": "admin", "courses": []},
}


def auth(token):
    return {"Authorization": f"Bearer {token}"}


@pytest.fixture
def api(seeded_engine):
    engine, course_id = seeded_engine
    config = GatewayConfig(tokens=TOKENS, workers=4)
    queue = JobQueue(engine.store, workers=4)
    app = create_app(engine, config, queue)
    client = TestClient(app, raise_server_exceptions=False)
    yield client, engine, course_id, queue
    queue.close()


def wait_job(client, job_id, token="tok-teacher", timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        job = client.get(f"/jobs/{job_id}", headers=auth(token)).json()
        if job["state"] in ("succeeded", "failed"):
            return job
        time.sleep(0.01)
    raise TimeoutError(job_id)


def generate_quiz(client, course, n=2, token="tok-teacher"):
    r = client.post(f"/courses/{course}/quizzes:generate",
                    headers=auth(token), json={"n_questions": n})
    assert r.status_code == 200
    job = wait_job(client, r.json()["job_id"], token)
    assert job["state"] == "succeeded", job["failure_reason"]
    return job["result"]["quiz_id"]


class TestAuth:
    ROUTES = [
        ("post", "/courses", {"json": {"name": "X"}}),
        ("post", "/courses/course-fix/chat", {"json": {"prompt": "hi"}}),
        ("get", "/courses/course-fix/sessions/s/turns", {}),
        ("post", "/courses/course-fix/quizzes:generate", {"json": {}}),
        ("get", "/quizzes/qz1", {}),
        ("post", "/quizzes/qz1/review", {"json": {"action": "approve"}}),
        ("get", "/quizzes/qz1/export.xml", {}),
        ("post", "/quizzes/qz1/attempts", {"json": {"answers": {}}}),
        ("get", "/courses/course-fix/progress", {}),
        ("get", "/courses/course-fix/logs", {}),
        ("get", "/jobs/j1", {}),
        ("post", "/eval/sweep", {"json": {}}),
        ("post", "/admin/intent/reload", {"json": {}}),
    ]

    @pytest.mark.parametrize("method,path,kwargs", ROUTES)
    def test_every_route_rejects_missing_token(self, api, method, path, kwargs):
        client, *_ = api
        r = getattr(client, method)(path, **kwargs)
        assert r.status_code == 401
        body = r.json()
        assert body["code"] == "unauthenticated"
        assert set(body) == {"code", "message", "detail"}

    @pytest.mark.parametrize("method,path,kwargs", ROUTES)
    def test_every_route_rejects_bad_token(self, api, method, path, kwargs):
        client, *_ = api
        kwargs = dict(kwargs, headers=auth("tok-forged"))
        assert getattr(client, method)(path, **kwargs).status_code == 401

    def test_student_cannot_create_course_or_upload(self, api):
        client, _, course, _ = api
        r = client.post("/courses", headers=auth("tok-student"),
                        json={"name": "X"})
        assert r.status_code == 403
        r = client.post(f"/courses/{course}/materials", headers=auth("tok-student"),
                        files={"file": ("n.txt", b"text")},
                        data={"format": "plain_text", "title": "n"})
        assert r.status_code == 403

    def test_non_member_cannot_chat(self, api):
        client, _, course, _ = api
        r = client.post(f"/courses/{course}/chat", headers=auth("tok-outsider"),
                        json={"prompt": "hi"})
        assert r.status_code == 403

    def test_admin_bypasses_membership(self, api):
        client, _, course, _ = api
        r = client.post(f"/courses/{course}/chat", headers=auth("tok-admin"),
                        json={"prompt": "what is quicksort"})
        assert r.status_code == 200

    def test_student_cannot_review_member_teacher_can(self, api):
        client, engine, course, _ = api
        engine.generator = ScriptedGenerator([WELL_FORMED], cycle=True)
        quiz_id = generate_quiz(client, course)
        r = client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-student"),
                        json={"action": "approve"})
        assert r.status_code == 403
        r = client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                        json={"action": "approve"})
        assert r.status_code == 200
        assert r.json()["review_state"] == "approved"

    def test_sweep_requires_admin(self, api):
        client, *_ = api
        assert client.post("/eval/sweep", headers=auth("tok-teacher"),
                           json={}).status_code == 403


class TestChatAndTurns:
    def test_chat_round_trip(self, api):
        client, _, course, _ = api
        r = client.post(f"/courses/{course}/chat", headers=auth("tok-student"),
                        json={"prompt": "What is the capital of France?",
                              "session_id": "sess1", "mode": "quick"})
        assert r.status_code == 200
        body = r.json()
        assert body["mode"] == "quick"
        assert body["citations"]
        assert body["citations"][0]["page_number"] >= 1
        r = client.get(f"/courses/{course}/sessions/sess1/turns",
                       headers=auth("tok-student"))
        assert r.json()["total"] == 1

    def test_unknown_course_404(self, api):
        client, *_ = api
        r = client.post("/courses/ghost/chat", headers=auth("tok-admin"),
                        json={"prompt": "hi"})
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_course"


class TestIngestJobs:
    def test_upload_runs_ingest_job(self, api):
        client, engine, course, _ = api
        r = client.post(f"/courses/{course}/materials", headers=auth("tok-teacher"),
                        files={"file": ("h.txt", b"Entropy always increases in closed systems.")},
                        data={"format": "plain_text", "title": "Thermo"})
        assert r.status_code == 200
        job = wait_job(client, r.json()["job_id"])
        assert job["state"] == "succeeded"
        assert job["result"]["chunk_count"] >= 1
        assert job["result"]["duplicate"] is False

    def test_bad_format_fails_job_with_reason(self, api):
        client, _, course, _ = api
        r = client.post(f"/courses/{course}/materials", headers=auth("tok-teacher"),
                        files={"file": ("h.bin", b"\x00\x01")},
                        data={"format": "docx", "title": "bad"})
        job = wait_job(client, r.json()["job_id"])
        assert job["state"] == "failed"
        assert "UnsupportedFormat" in job["failure_reason"]

    def test_per_course_fifo_under_load(self, seeded_engine):
        client_engine, course = seeded_engine
        order = []
        lock = threading.Lock()
        real_ingest = client_engine.ingest_material

        def slow_ingest(course_id, raw, fmt, title):
            time.sleep(0.02)
            with lock:
                order.append(title)
            return real_ingest(course_id, raw, fmt, title)

        client_engine.ingest_material = slow_ingest
        config = GatewayConfig(tokens=TOKENS, workers=4)
        queue = JobQueue(client_engine.store, workers=4)
        app = create_app(client_engine, config, queue)
        client = TestClient(app)
        try:
            job_ids = []
            for i in range(5):
                r = client.post(f"/courses/{course}/materials",
                                headers=auth("tok-teacher"),
                                files={"file": (f"f{i}.txt", f"unique body {i} padding".encode())},
                                data={"format": "plain_text", "title": f"doc{i}"})
                job_ids.append(r.json()["job_id"])
            for job_id in job_ids:
                assert wait_job(client, job_id)["state"] == "succeeded"
            assert order == [f"doc{i}" for i in range(5)]
        finally:
            queue.close()


class TestQuizRoutes:
    def test_student_sees_only_published(self, api):
        client, engine, course, _ = api
        engine.generator = ScriptedGenerator([WELL_FORMED], cycle=True)
        quiz_id = generate_quiz(client, course)
        assert client.get(f"/quizzes/{quiz_id}",
                          headers=auth("tok-student")).status_code == 403
        assert client.get(f"/quizzes/{quiz_id}",
                          headers=auth("tok-teacher")).status_code == 200
        client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                    json={"action": "approve"})
        assert client.get(f"/quizzes/{quiz_id}",
                          headers=auth("tok-student")).status_code == 403
        client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                    json={"action": "publish"})
        r = client.get(f"/quizzes/{quiz_id}", headers=auth("tok-student"))
        assert r.status_code == 200
        assert r.json()["review_state"] == "published"

    def test_student_generation_disabled_by_default(self, api):
        client, _, course, _ = api
        r = client.post(f"/courses/{course}/quizzes:generate",
                        headers=auth("tok-student"), json={"n_questions": 1})
        assert r.status_code == 403

    def test_review_conflict_surfaces_409(self, api):
        client, engine, course, _ = api
        engine.generator = ScriptedGenerator([WELL_FORMED], cycle=True)
        quiz_id = generate_quiz(client, course)
        rev = client.get(f"/quizzes/{quiz_id}",
                         headers=auth("tok-teacher")).json()["revision"]
        assert client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                           json={"action": "approve", "revision": rev}).status_code == 200
        r = client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                        json={"action": "publish", "revision": rev})
        assert r.status_code == 409
        assert r.json()["code"] == "version_conflict"

    def test_export_gate_and_content_type(self, api):
        client, engine, course, _ = api
        engine.generator = ScriptedGenerator([WELL_FORMED], cycle=True)
        quiz_id = generate_quiz(client, course)
        r = client.get(f"/quizzes/{quiz_id}/export.xml", headers=auth("tok-teacher"))
        assert r.status_code == 409
        assert r.json()["code"] == "not_approved"
        client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                    json={"action": "approve"})
        r = client.get(f"/quizzes/{quiz_id}/export.xml", headers=auth("tok-teacher"))
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("application/xml")
        assert r.content.startswith(b"<?xml")

    def test_attempt_published_quiz(self, api):
        client, engine, course, _ = api
        engine.generator = ScriptedGenerator([WELL_FORMED], cycle=True)
        quiz_id = generate_quiz(client, course, n=2)
        for action in ("approve", "publish"):
            client.post(f"/quizzes/{quiz_id}/review", headers=auth("tok-teacher"),
                        json={"action": action})
        quiz = client.get(f"/quizzes/{quiz_id}", headers=auth("tok-student")).json()
        answers = {q["question_id"]: 0 for q in quiz["questions"]}
        r = client.post(f"/quizzes/{quiz_id}/attempts", headers=auth("tok-student"),
                        json={"answers": answers})
        assert r.status_code == 200
        assert r.json()["score"] == 1.0
        r = client.post(f"/quizzes/{quiz_id}/attempts", headers=auth("tok-student"),
                        json={"answers": {}})
        assert r.json()["score"] == 0.0

    def test_attempt_unpublished_409(self, api):
        client, engine, course, _ = api
        engine.generator = ScriptedGenerator([WELL_FORMED], cycle=True)
        quiz_id = generate_quiz(client, course)
        r = client.post(f"/quizzes/{quiz_id}/attempts", headers=auth("tok-student"),
                        json={"answers": {}})
        assert r.status_code == 409


class TestProgressAndLogs:
    def test_student_progress_own_only(self, api):
        client, _, course, _ = api
        client.post(f"/courses/{course}/chat", headers=auth("tok-student"),
                    json={"prompt": "what is quicksort"})
        r = client.get(f"/courses/{course}/progress", headers=auth("tok-student"))
        assert r.status_code == 200
        assert r.json()["aggregate"]["touched_chunks"] >= 1
        r = client.get(f"/courses/{course}/progress", headers=auth("tok-student"),
                       params={"user_id": "s2"})
        assert r.status_code == 403
        r = client.get(f"/courses/{course}/progress", headers=auth("tok-teacher"),
                       params={"user_id": "s1"})
        assert r.status_code == 200

    def test_logs_teacher_only(self, api):
        client, _, course, _ = api
        assert client.get(f"/courses/{course}/logs",
                          headers=auth("tok-student")).status_code == 403
        r = client.get(f"/courses/{course}/logs", headers=auth("tok-teacher"))
        assert r.status_code == 200


class TestConcurrency:
    def test_32_parallel_chat_sessions(self, api):
        client, _, course, _ = api
        errors = []

        def worker(i):
            token = "tok-student" if i % 2 == 0 else "tok-student2"
            r = client.post(f"/courses/{course}/chat", headers=auth(token),
                            json={"prompt": f"question {i} about quicksort",
                                  "session_id": f"sess-{i}"})
            if r.status_code != 200 or not r.json()["answer"]:
                errors.append((i, r.status_code))

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(32)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        for i in range(32):
            token = "tok-student" if i % 2 == 0 else "tok-student2"
            r = client.get(f"/courses/{course}/sessions/sess-{i}/turns",
                           headers=auth(token))
            assert r.json()["total"] == 1
