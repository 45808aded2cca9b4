"""Attempt lifecycle with durable event-log persistence.

Each attempt owns an append-only JSON-lines file under the store's data
directory.  Every state change is appended and fsync'ed before the
caller regains control, so a crash between a submission and its
response loses nothing: replaying the log rebuilds the session exactly.

Event kinds: created, code_updated, report, closed.

Concurrency: a per-attempt non-blocking guard serializes submissions.
The losing side of a race gets AttemptBusyError immediately instead of
queueing, which the HTTP layer turns into a retry signal.
"""

import contextlib
import dataclasses
import json
import os
import re
import secrets
import threading
import time
from fractions import Fraction
from pathlib import Path

from .grader import (MODE_CHECK, GradeReport, best_final_mark,
                     report_from_doc, report_to_doc)

STATE_OPEN = "open"
STATE_CLOSED = "closed"

# attempt ids are always our own 128-bit hex tokens; anything else is
# rejected before touching the filesystem
_TOKEN_RE = re.compile(r"^[0-9a-f]{32}$")


class UnknownAttemptError(KeyError):
    """No session with that attempt id, in memory or on disk."""


class ClosedAttemptError(RuntimeError):
    """The session is closed and rejects further submissions."""


class AttemptBusyError(RuntimeError):
    """Another submission for this attempt is already in flight."""


@dataclasses.dataclass
class AttemptSession:
    attempt_id: str
    question_id: str
    student_id: str
    current_code: str
    check_count: int = 0
    history: list[GradeReport] = dataclasses.field(default_factory=list)
    state: str = STATE_OPEN


class SessionStore:
    """In-memory sessions backed by one append-only log per attempt."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, AttemptSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- creation and lookup ------------------------------------------------

    def create(self, question_id: str, student_id: str,
               preload: str) -> AttemptSession:
        attempt_id = secrets.token_hex(16)
        sess = AttemptSession(attempt_id=attempt_id, question_id=question_id,
                              student_id=student_id, current_code=preload)
        self._append(attempt_id, {"event": "created", "attempt_id": attempt_id,
                                  "question_id": question_id,
                                  "student_id": student_id,
                                  "preload": preload})
        with self._registry_lock:
            self._sessions[attempt_id] = sess
            self._locks[attempt_id] = threading.Lock()
        return sess

    def get(self, attempt_id: str) -> AttemptSession:
        """Fetch a session, replaying its log if not in memory."""
        with self._registry_lock:
            sess = self._sessions.get(attempt_id)
        if sess is not None:
            return sess
        loaded = self._replay(attempt_id)
        with self._registry_lock:
            # a concurrent loader may have won; keep the first copy
            sess = self._sessions.setdefault(attempt_id, loaded)
            self._locks.setdefault(attempt_id, threading.Lock())
        return sess

    @contextlib.contextmanager
    def exclusive(self, attempt_id: str):
        """Per-attempt submission guard; never blocks, raises instead."""
        self.get(attempt_id)
        with self._registry_lock:
            lock = self._locks[attempt_id]
        if not lock.acquire(blocking=False):
            raise AttemptBusyError(attempt_id)
        try:
            yield
        finally:
            lock.release()

    # -- state changes (persist first, then mutate memory) ------------------

    def record_code(self, attempt_id: str, code: str) -> AttemptSession:
        sess = self._open_session(attempt_id)
        self._append(attempt_id, {"event": "code_updated", "code": code})
        sess.current_code = code
        return sess

    def record_report(self, attempt_id: str,
                      report: GradeReport) -> AttemptSession:
        """Durable before return: the response is built only after the
        report line hits disk."""
        sess = self._open_session(attempt_id)
        self._append(attempt_id, {"event": "report", "mode": report.mode,
                                  "report": report_to_doc(report)})
        sess.history.append(report)
        if report.mode == MODE_CHECK:
            sess.check_count += 1
        return sess

    def reset_code(self, attempt_id: str, preload: str) -> str:
        self.record_code(attempt_id, preload)
        return preload

    def close(self, attempt_id: str) -> Fraction:
        """Close the session and return the best check mark (0 if none)."""
        sess = self._open_session(attempt_id)
        checks = [r for r in sess.history if r.mode == MODE_CHECK]
        mark = best_final_mark(checks) if checks else Fraction(0)
        self._append(attempt_id, {"event": "closed"})
        sess.state = STATE_CLOSED
        return mark

    # -- internals -----------------------------------------------------------

    def _open_session(self, attempt_id: str) -> AttemptSession:
        sess = self.get(attempt_id)
        if sess.state != STATE_OPEN:
            raise ClosedAttemptError(attempt_id)
        return sess

    def _log_path(self, attempt_id: str) -> Path:
        return self.data_dir / f"{attempt_id}.jsonl"

    def _append(self, attempt_id: str, event: dict) -> None:
        line = json.dumps({"ts": time.time(), **event}, ensure_ascii=False)
        with open(self._log_path(attempt_id), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _replay(self, attempt_id: str) -> AttemptSession:
        if not _TOKEN_RE.match(attempt_id):
            raise UnknownAttemptError(attempt_id)
        path = self._log_path(attempt_id)
        if not path.exists():
            raise UnknownAttemptError(attempt_id)
        sess: AttemptSession | None = None
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                raw = raw.strip()
                if not raw:
                    continue
                ev = json.loads(raw)
                kind = ev["event"]
                if kind == "created":
                    sess = AttemptSession(attempt_id=ev["attempt_id"],
                                          question_id=ev["question_id"],
                                          student_id=ev["student_id"],
                                          current_code=ev["preload"])
                    continue
                if sess is None:
                    raise ValueError(f"corrupt attempt log {path.name}: "
                                     f"{kind!r} before created")
                if kind == "code_updated":
                    sess.current_code = ev["code"]
                elif kind == "report":
                    report = report_from_doc(ev["report"])
                    sess.history.append(report)
                    if report.mode == MODE_CHECK:
                        sess.check_count += 1
                elif kind == "closed":
                    sess.state = STATE_CLOSED
                else:
                    raise ValueError(f"corrupt attempt log {path.name}: "
                                     f"unknown event {kind!r}")
        if sess is None:
            raise UnknownAttemptError(attempt_id)
        return sess
