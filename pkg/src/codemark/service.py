"""HTTP facade over the grader: question views and attempt endpoints.

Every grading response is student-redacted at this boundary; hidden
test payloads never leave the process in an HTTP body.  Endpoints are
plain sync functions, so the framework runs them on its worker thread
pool and the sandbox's blocking waits don't stall other requests.

Error bodies are always {"error": <kind>, "detail": <text>}:
  404 unknown_question / unknown_attempt
  409 busy (retry signal for a concurrent submission) / closed
  401 unauthorized (when a bearer token is configured)
  500 internal_error (grading infrastructure failure; never counted
      as an attempt, and the student never sees harness internals)
"""

import dataclasses
import json
import logging
from pathlib import Path

from fastapi import Depends, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .grader import (AUDIENCE_STUDENT, Grader, InternalGradingError,
                     redact_report, report_to_doc)
from .model import Question, QuestionFormatError, parse_question, student_view
from .sandbox import Sandbox, ToolchainConfig
from .sessions import (AttemptBusyError, ClosedAttemptError, SessionStore,
                       UnknownAttemptError)

log = logging.getLogger("codemark.service")


class UnknownQuestionError(KeyError):
    pass


class AuthError(RuntimeError):
    pass


@dataclasses.dataclass(frozen=True)
class ServiceConfig:
    questions_dir: str
    data_dir: str
    port: int = 8080
    token: str | None = None
    pool_size: int = 4


def load_config(path: str | Path) -> ServiceConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return ServiceConfig(
            questions_dir=doc["questions_dir"],
            data_dir=doc["data_dir"],
            port=int(doc.get("port", 8080)),
            token=doc.get("token"),
            pool_size=int(doc.get("pool_size", 4)),
        )
    except KeyError as exc:
        raise ValueError(f"config missing required key {exc.args[0]!r}") from exc


def load_questions(questions_dir: str | Path) -> dict[str, Question]:
    out: dict[str, Question] = {}
    for path in sorted(Path(questions_dir).glob("*.json")):
        q = parse_question(path.read_text(encoding="utf-8"))
        if q.id in out:
            raise QuestionFormatError(f"duplicate question id {q.id!r}")
        out[q.id] = q
    return out


class AttemptRequest(BaseModel):
    question_id: str
    student_id: str


class CodeRequest(BaseModel):
    code: str


def _error(status: int, kind: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": kind, "detail": detail})


def create_app(questions: dict[str, Question], store: SessionStore,
               grader: Grader | None = None,
               token: str | None = None) -> FastAPI:
    grader = grader or Grader()

    def guard(request: Request) -> None:
        if token is None:
            return
        if request.headers.get("authorization") != f"Bearer {token}":
            raise AuthError("missing or invalid bearer token")

    app = FastAPI(title="codemark", dependencies=[Depends(guard)])

    def _question(question_id: str) -> Question:
        q = questions.get(question_id)
        if q is None:
            raise UnknownQuestionError(question_id)
        return q

    # -- error mapping ------------------------------------------------------

    @app.exception_handler(AuthError)
    def _auth(_req, exc):
        return _error(401, "unauthorized", str(exc))

    @app.exception_handler(UnknownQuestionError)
    def _no_question(_req, exc):
        return _error(404, "unknown_question",
                      f"no question {exc.args[0]!r}")

    @app.exception_handler(UnknownAttemptError)
    def _no_attempt(_req, exc):
        return _error(404, "unknown_attempt", f"no attempt {exc.args[0]!r}")

    @app.exception_handler(ClosedAttemptError)
    def _closed(_req, exc):
        return _error(409, "closed",
                      "attempt is closed; no further submissions")

    @app.exception_handler(AttemptBusyError)
    def _busy(_req, exc):
        return _error(409, "busy", "another submission is in flight for "
                                   "this attempt; retry shortly")

    @app.exception_handler(InternalGradingError)
    def _internal(_req, exc):
        # diagnostics stay in the server log: harness internals can
        # quote hidden payloads, and students must never see them
        log.error("internal grading error: %s\n%s", exc, exc.diagnostics)
        return _error(500, "internal_error",
                      "grading infrastructure failure; this submission "
                      "was not counted as an attempt")

    @app.exception_handler(RequestValidationError)
    def _invalid(_req, exc):
        return _error(422, "invalid_request", str(exc))

    # -- endpoints -----------------------------------------------------------

    @app.get("/questions/{question_id}")
    def get_question(question_id: str) -> dict:
        return student_view(_question(question_id))

    @app.post("/attempts", status_code=201)
    def create_attempt(body: AttemptRequest) -> dict:
        q = _question(body.question_id)
        sess = store.create(q.id, body.student_id, q.preload_code)
        log.info("attempt %s created for question %s by %s",
                 sess.attempt_id, q.id, body.student_id)
        return {"attempt_id": sess.attempt_id, "preload": sess.current_code}

    @app.post("/attempts/{attempt_id}/precheck")
    def precheck(attempt_id: str, body: CodeRequest) -> dict:
        with store.exclusive(attempt_id):
            sess = store.record_code(attempt_id, body.code)
            q = _question(sess.question_id)
            report = grader.run_precheck(q, body.code)
            store.record_report(attempt_id, report)
            log.info("attempt %s precheck: raw %s/%s", attempt_id,
                     report.raw_marks, report.total_marks)
            return report_to_doc(redact_report(report, AUDIENCE_STUDENT))

    @app.post("/attempts/{attempt_id}/check")
    def check(attempt_id: str, body: CodeRequest) -> dict:
        with store.exclusive(attempt_id):
            sess = store.record_code(attempt_id, body.code)
            q = _question(sess.question_id)
            report = grader.run_check(q, body.code, sess.check_count + 1)
            sess = store.record_report(attempt_id, report)
            log.info("attempt %s check #%d: raw %s/%s final %s", attempt_id,
                     sess.check_count, report.raw_marks, report.total_marks,
                     report.final_fraction)
            doc = report_to_doc(redact_report(report, AUDIENCE_STUDENT))
            doc["check_count"] = sess.check_count
            doc["next_penalty_pct"] = q.penalty_regime.percent_for(
                sess.check_count + 1)
            return doc

    @app.post("/attempts/{attempt_id}/reset")
    def reset(attempt_id: str) -> dict:
        with store.exclusive(attempt_id):
            sess = store.get(attempt_id)
            q = _question(sess.question_id)
            return {"code": store.reset_code(attempt_id, q.preload_code)}

    @app.post("/attempts/{attempt_id}/close")
    def close(attempt_id: str) -> dict:
        with store.exclusive(attempt_id):
            mark = store.close(attempt_id)
            log.info("attempt %s closed with final mark %s", attempt_id, mark)
            return {"final_mark": float(mark)}

    @app.get("/attempts/{attempt_id}")
    def attempt_summary(attempt_id: str) -> dict:
        sess = store.get(attempt_id)
        q = questions.get(sess.question_id)
        next_pct = (q.penalty_regime.percent_for(sess.check_count + 1)
                    if q is not None else 0)
        return {
            "attempt_id": sess.attempt_id,
            "question_id": sess.question_id,
            "student_id": sess.student_id,
            "state": sess.state,
            "check_count": sess.check_count,
            "current_code": sess.current_code,
            "next_penalty_pct": next_pct,
            "history": [
                {"mode": r.mode, "attempt_number": r.attempt_number,
                 "final_fraction": float(r.final_fraction)}
                for r in sess.history
            ],
        }

    return app


def build_app(config: ServiceConfig) -> FastAPI:
    """Wire a full app from config: question bank, store, sandbox pool."""
    questions = load_questions(config.questions_dir)
    store = SessionStore(config.data_dir)
    box = Sandbox(ToolchainConfig(pool_size=config.pool_size))
    return create_app(questions, store, Grader(box), token=config.token)
