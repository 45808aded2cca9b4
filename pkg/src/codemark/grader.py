"""Grading orchestration: syntax gate, harness runs, marks and penalties.

Reports use Fractions internally so mark arithmetic is exact; floats
appear only in :func:`report_to_doc` at the serialization boundary.

Error taxonomy, in order of precedence:

* Student syntax/compile failure: report with every test not_run and the
  compiler's own diagnostics; zero marks, no per-test failures.
* Student runtime failure: the first test missing from the harness
  transcript becomes status=error carrying the runtime diagnostics, and
  every test after it in display order is not_run with zero marks.
* Infrastructure failure (harness build break, protocol corruption,
  missing toolchain): raises :class:`InternalGradingError`; callers must
  surface it distinctly and never score it as a student zero.
"""

from __future__ import annotations

import dataclasses
import tempfile
from fractions import Fraction

from . import cppharness, heuristics, pyharness
from .model import (KIND_HEURISTIC, KIND_IO, PYTHON3, PenaltyRegime,
                    Question, TestCase, total_marks)
from .protocol import (ProtocolError, RawOutcome, STATUS_ERROR, STATUS_FAIL,
                       STATUS_NOT_RUN, STATUS_PASS, parse_protocol)
from .sandbox import (DEFAULT_SANDBOX, Sandbox, VERDICT_INTERNAL,
                      VERDICT_MEMORY, VERDICT_NONZERO, VERDICT_OK,
                      VERDICT_TIMEOUT, VERDICT_TRUNCATED)

REDACTED = "«hidden»"

MODE_PRECHECK = "precheck"
MODE_CHECK = "check"
MODE_VALIDATE = "author_validate"

AUDIENCE_STUDENT = "student"
AUDIENCE_TEACHER = "teacher"

_STDERR_TAIL = 2000


class InternalGradingError(RuntimeError):
    """Teacher/harness/toolchain bug; must not consume a student attempt."""

    def __init__(self, message: str, diagnostics: str = ""):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclasses.dataclass(frozen=True)
class TestResult:
    test_id: str
    status: str
    marks_awarded: Fraction
    marks_available: Fraction
    shown_input: str
    shown_expected: str
    shown_got: str | None
    message: str
    hidden: bool = False


@dataclasses.dataclass(frozen=True)
class GradeReport:
    attempt_number: int
    mode: str
    results: tuple[TestResult, ...]
    raw_marks: Fraction
    total_marks: Fraction
    penalty_pct: int
    final_fraction: Fraction
    toolchain_diagnostics: str


def apply_penalty(raw_fraction: Fraction, attempt_number: int,
                  regime: PenaltyRegime) -> Fraction:
    """max(0, raw × (1 − p/100)) with the regime's repeat-last lookup."""
    p = regime.percent_for(attempt_number)
    value = raw_fraction * (Fraction(100 - p, 100))
    return max(Fraction(0), value)


def best_final_mark(history: list[GradeReport]) -> Fraction:
    if not history:
        raise ValueError("empty attempt history")
    return max(r.final_fraction * r.total_marks for r in history)


class Grader:
    def __init__(self, box: Sandbox | None = None):
        self.box = box or DEFAULT_SANDBOX

    # -- public flows -------------------------------------------------------

    def run_check(self, q: Question, code: str, attempt_number: int) -> GradeReport:
        if attempt_number < 1:
            raise ValueError("attempt_number must be >= 1 for a check")
        penalty = q.penalty_regime.percent_for(attempt_number)
        return self._run(q, code, list(q.tests), attempt_number, MODE_CHECK, penalty)

    def run_precheck(self, q: Question, code: str) -> GradeReport:
        selected = [tc for tc in q.tests if tc.is_precheck]
        return self._run(q, code, selected, 0, MODE_PRECHECK, 0)

    def validate_model_answer(self, q: Question) -> GradeReport:
        if q.model_answer is None:
            raise ValueError(f"question {q.id} has no model answer")
        return self._run(q, q.model_answer, list(q.tests), 1, MODE_VALIDATE, 0)

    # -- pipeline -----------------------------------------------------------

    def _run(self, q: Question, code: str, selected: list[TestCase],
             attempt_number: int, mode: str, penalty_pct: int) -> GradeReport:
        gate = self.box.syntax_check(q.language, code, q.limits)
        if gate.verdict == VERDICT_INTERNAL:
            raise InternalGradingError("toolchain unavailable", gate.stderr)
        if not gate.ok:
            results = tuple(_not_run(tc) for tc in selected)
            return self._finish(q, results, attempt_number, mode, penalty_pct,
                                diagnostics=gate.stderr)

        static = {tc.id: heuristics.evaluate(tc.payload, code)
                  for tc in selected if tc.kind == KIND_HEURISTIC}
        outcomes = self._run_harness(q, code, selected)
        results = merge_results(selected, static, outcomes)
        return self._finish(q, results, attempt_number, mode,
                            penalty_pct, diagnostics=gate.stderr)

    def _run_harness(self, q: Question, code: str,
                     selected: list[TestCase]) -> dict[str, RawOutcome]:
        """Execute the non-heuristic tests; returns outcomes by id."""
        harness_tests = [tc for tc in selected if tc.kind != KIND_HEURISTIC]
        if not harness_tests:
            return {}
        if q.language == PYTHON3:
            plan = pyharness.generate_python_harness(q, code, harness_tests)
            run_res = self.box.execute(plan.requests[0])
        else:
            plan = cppharness.generate_cpp_harness(q, code, harness_tests)
            _gate, build, run = plan.requests
            with tempfile.TemporaryDirectory(prefix="cm-cpp-") as ws:
                # the student-alone gate already ran; phase two is the
                # teacher's harness, so its failure is an internal error
                build_res = self.box.execute(build, workspace=ws)
                if build_res.verdict == VERDICT_INTERNAL:
                    raise InternalGradingError("toolchain unavailable",
                                               build_res.stderr)
                if not build_res.ok:
                    raise InternalGradingError("probe harness failed to build",
                                               build_res.stderr)
                run_res = self.box.execute(run, workspace=ws)
        if run_res.verdict == VERDICT_INTERNAL:
            raise InternalGradingError("sandbox failure", run_res.stderr)
        try:
            raw = parse_protocol(run_res.stdout, plan.protocol_tests)
        except ProtocolError as exc:
            raise InternalGradingError(str(exc), run_res.stdout[-500:]) from exc
        outcomes = {o.test_id: o for o in raw}
        if run_res.verdict != VERDICT_OK:
            diag = _runtime_diagnostics(run_res.verdict, run_res.stderr)
            # the test the harness died on is the first one without a line
            for tid in plan.protocol_tests:
                if outcomes[tid].status == STATUS_NOT_RUN:
                    outcomes[tid] = RawOutcome(tid, STATUS_ERROR, detail=diag)
                    break
        return outcomes

    def _finish(self, q: Question, results: tuple[TestResult, ...],
                attempt_number: int, mode: str, penalty_pct: int,
                diagnostics: str) -> GradeReport:
        raw = sum((r.marks_awarded for r in results), start=Fraction(0))
        total = total_marks(q)
        final = apply_penalty(raw / total, attempt_number, q.penalty_regime) \
            if mode == MODE_CHECK else max(Fraction(0), raw / total)
        if mode != MODE_CHECK:
            penalty_pct = 0
        return GradeReport(
            attempt_number=attempt_number,
            mode=mode,
            results=results,
            raw_marks=raw,
            total_marks=total,
            penalty_pct=penalty_pct,
            final_fraction=final,
            toolchain_diagnostics=diagnostics,
        )


def merge_results(selected: list[TestCase],
                  static: dict[str, tuple[bool, str]],
                  outcomes: dict[str, RawOutcome]) -> tuple[TestResult, ...]:
    """Walk tests in display order, applying stop-on-error: once a test
    errors, everything after it is not_run with zero marks."""
    results: list[TestResult] = []
    stopped = False
    for tc in selected:
        if stopped:
            results.append(_not_run(tc))
            continue
        if tc.kind == KIND_HEURISTIC:
            ok, msg = static[tc.id]
            results.append(_from_heuristic(tc, ok, msg))
        else:
            results.append(_from_outcome(tc, outcomes[tc.id]))
        if results[-1].status == STATUS_ERROR:
            stopped = True
    return tuple(results)


def _runtime_diagnostics(verdict: str, stderr: str) -> str:
    label = {
        VERDICT_NONZERO: "runtime error",
        VERDICT_TIMEOUT: "time limit exceeded",
        VERDICT_MEMORY: "memory limit exceeded",
        VERDICT_TRUNCATED: "output limit exceeded",
    }.get(verdict, verdict)
    tail = stderr[-_STDERR_TAIL:].strip()
    return f"{label}\n{tail}" if tail else label


def _shown_input(tc: TestCase) -> str:
    if tc.kind == KIND_IO:
        io = tc.payload
        return io.call.render() if io.call is not None else (io.stdin or "")
    return tc.payload.describe()


def _shown_expected(tc: TestCase) -> str:
    return tc.payload.expected if tc.kind == KIND_IO else ""


def _not_run(tc: TestCase) -> TestResult:
    return TestResult(tc.id, STATUS_NOT_RUN, Fraction(0), tc.marks,
                      _shown_input(tc), _shown_expected(tc), None, "",
                      hidden=tc.is_hidden)


def _from_heuristic(tc: TestCase, ok: bool, msg: str) -> TestResult:
    status = STATUS_PASS if ok else STATUS_FAIL
    marks = tc.marks if ok else Fraction(0)
    return TestResult(tc.id, status, marks, tc.marks,
                      _shown_input(tc), "", None, msg, hidden=tc.is_hidden)


def _from_outcome(tc: TestCase, outcome: RawOutcome) -> TestResult:
    marks = tc.marks if outcome.status == STATUS_PASS else Fraction(0)
    got = outcome.got if outcome.status == STATUS_FAIL else None
    message = outcome.detail if outcome.status == STATUS_ERROR else ""
    return TestResult(tc.id, outcome.status, marks, tc.marks,
                      _shown_input(tc), _shown_expected(tc), got, message,
                      hidden=tc.is_hidden)


# ---------------------------------------------------------------------------
# redaction and serialization

def redact_report(report: GradeReport, audience: str) -> GradeReport:
    """Teacher sees everything; students see hidden rows as status and
    marks only.  The message is blanked too: runtime diagnostics can
    quote hidden inputs."""
    if audience == AUDIENCE_TEACHER:
        return report
    if audience != AUDIENCE_STUDENT:
        raise ValueError(f"unknown audience {audience!r}")
    rows = []
    for r in report.results:
        if not r.hidden:
            rows.append(r)
            continue
        rows.append(dataclasses.replace(
            r, shown_input=REDACTED, shown_expected=REDACTED,
            shown_got=REDACTED if r.shown_got is not None else None,
            message=REDACTED if r.message else ""))
    return dataclasses.replace(report, results=tuple(rows))


def report_from_doc(doc: dict) -> GradeReport:
    """Inverse of report_to_doc, used when replaying stored reports.

    Marks parse back through their shortest decimal repr, so a stored
    doc always round-trips to an identical doc even when the original
    in-memory Fraction had a non-decimal denominator.
    """
    results = tuple(
        TestResult(
            test_id=row["test_id"],
            status=row["status"],
            marks_awarded=Fraction(str(row["marks_awarded"])),
            marks_available=Fraction(str(row["marks_available"])),
            shown_input=row["shown_input"],
            shown_expected=row["shown_expected"],
            shown_got=row.get("shown_got"),
            message=row["message"],
            hidden=row["hidden"],
        )
        for row in doc["results"]
    )
    return GradeReport(
        attempt_number=doc["attempt_number"],
        mode=doc["mode"],
        results=results,
        raw_marks=Fraction(str(doc["raw_marks"])),
        total_marks=Fraction(str(doc["total_marks"])),
        penalty_pct=doc["penalty_pct"],
        final_fraction=Fraction(str(doc["final_fraction"])),
        toolchain_diagnostics=doc["toolchain_diagnostics"],
    )


def report_to_doc(report: GradeReport) -> dict:
    """JSON-ready form; the only place marks become floats."""
    return {
        "attempt_number": report.attempt_number,
        "mode": report.mode,
        "results": [
            {
                "test_id": r.test_id,
                "status": r.status,
                "marks_awarded": float(r.marks_awarded),
                "marks_available": float(r.marks_available),
                "shown_input": r.shown_input,
                "shown_expected": r.shown_expected,
                **({"shown_got": r.shown_got} if r.shown_got is not None else {}),
                "message": r.message,
                "hidden": r.hidden,
            }
            for r in report.results
        ],
        "raw_marks": float(report.raw_marks),
        "total_marks": float(report.total_marks),
        "penalty_pct": report.penalty_pct,
        "final_fraction": float(report.final_fraction),
        "toolchain_diagnostics": report.toolchain_diagnostics,
    }
