"""Python harness generation.

The generated harness is itself a Python program.  It loads student.py
from its working directory, executes it into the harness's own global
namespace (so a name check is literally ``"f" in globals()``), then walks
the non-heuristic tests in order, emitting one protocol line each.

Two rules shape the generated code:

* Test invocations are not wrapped in error suppression.  An uncaught
  exception aborts the harness, the interpreter's own traceback reaches
  stderr, and every later test is simply absent from the transcript
  (the grader turns absence into not_run).
* Hidden literals stay out of traceback text.  Arguments live in a
  one-line table keyed by test id; the code lines that can raise mention
  only the id, so a traceback's source excerpt never shows a hidden
  value.

Helper names carry a _cr_ prefix and capture the builtins they need
before student code runs, so a submission that rebinds print or repr
cannot corrupt the transcript.
"""

from __future__ import annotations

import dataclasses

from .model import (KIND_HEURISTIC, KIND_INTROSPECTION, KIND_IO, PYTHON3,
                    IntrospectionCheck, IoTest, Question, TestCase, _thaw)
from .sandbox import PHASE_RUN, SandboxRequest

STUDENT_FILE = "student.py"
HARNESS_FILE = "harness.py"


@dataclasses.dataclass(frozen=True)
class HarnessPlan:
    requests: list[SandboxRequest]
    protocol_tests: list[str]


_PRELUDE = '''\
import inspect as _cr_inspect
import io as _cr_io
import sys as _cr_sys
from contextlib import redirect_stdout as _cr_redirect

_cr_out = _cr_sys.stdout
_cr_type = type
_cr_float = float
_cr_abs = abs
_cr_len = len
_cr_isinstance = isinstance
_cr_repr = repr
_cr_str = str
_cr_globals = globals
_cr_compile = compile
_cr_open = open


def _cr_emit(line):
    # leading newline detaches the protocol line from any partial student
    # output on the same line
    _cr_out.write("\\n" + line + "\\n")
    _cr_out.flush()


def _cr_render(value):
    return value if _cr_isinstance(value, _cr_str) else _cr_repr(value)


def _cr_report(tid, ok, got):
    if ok:
        _cr_emit("CR|" + tid + "|PASS")
    else:
        _cr_emit("CR|" + tid + "|FAIL|got=" + _cr_str(got).replace("\\n", "\\\\n"))


def _cr_check_value(tid, value):
    expected, mode, tol = _CR_EXPECTED[tid]
    if mode == "numeric_tolerance":
        try:
            ok = _cr_abs(_cr_float(value) - _cr_float(expected)) <= tol
        except (TypeError, ValueError):
            ok = False
    else:
        ok = _cr_render(value) == expected
    _cr_report(tid, ok, _cr_render(value))


def _cr_check_text(tid, text):
    expected, mode, tol = _CR_EXPECTED[tid]
    if mode == "numeric_tolerance":
        try:
            ok = _cr_abs(_cr_float(text.strip()) - _cr_float(expected.strip())) <= tol
        except (TypeError, ValueError):
            ok = False
    else:
        ok = text.rstrip("\\n") == expected.rstrip("\\n")
    _cr_report(tid, ok, text)


def _cr_arity(fn):
    return _cr_len(_cr_inspect.signature(fn).parameters)


with _cr_open("student.py") as _cr_fh:
    _CR_SRC = _cr_fh.read()
'''

_STUDENT_EXEC = '''\
exec(_cr_compile(_CR_SRC, "student.py", "exec"))
'''


def _chunk_introspection(tc: TestCase) -> str:
    check: IntrospectionCheck = tc.payload
    tid = tc.id
    name = check.name
    if check.probe == "symbol_defined":
        return (f'_cr_report({tid!r}, {name!r} in _cr_globals(), "not defined")\n')
    if check.probe == "arity":
        return (f'_cr_n = _cr_arity({name})\n'
                f'_cr_report({tid!r}, _cr_n == {check.arity!r}, '
                f'_cr_str(_cr_n) + " parameter(s)")\n')
    if check.probe == "return_type":
        return (f'_cr_v = {name}(*_CR_ARGS[{tid!r}])\n'
                f'_cr_report({tid!r}, _cr_type(_cr_v).__name__ == '
                f'{check.expected_type!r}, _cr_type(_cr_v).__name__)\n')
    raise ValueError(f"probe {check.probe!r} not supported for python3")


def _chunk_io(tc: TestCase) -> str:
    io: IoTest = tc.payload
    tid = tc.id
    if io.call is not None:
        return (f'_cr_v = {io.call.target}(*_CR_ARGS[{tid!r}])\n'
                f'_cr_check_value({tid!r}, _cr_v)\n')
    # program mode: rerun the submission in a fresh namespace with the
    # test's stdin, capturing what it prints
    return (f'_cr_sys.stdin = _cr_io.StringIO(_CR_ARGS[{tid!r}])\n'
            f'_cr_buf = _cr_io.StringIO()\n'
            f'with _cr_redirect(_cr_buf):\n'
            f'    exec(_cr_compile(_CR_SRC, "student.py", "exec"),\n'
            f'         {{"__name__": "__main__"}})\n'
            f'_cr_check_text({tid!r}, _cr_buf.getvalue())\n')


def generate_python_harness(q: Question, code: str,
                            tests: list[TestCase]) -> HarnessPlan:
    """Build the single-run plan for a python3 submission."""
    if q.language != PYTHON3:
        raise ValueError("generate_python_harness needs a python3 question")
    protocol_tests: list[str] = []
    args: dict[str, object] = {}
    expected: dict[str, tuple] = {}
    chunks: list[str] = []

    for tc in tests:
        if tc.kind == KIND_HEURISTIC:
            continue
        protocol_tests.append(tc.id)
        if tc.kind == KIND_INTROSPECTION:
            check: IntrospectionCheck = tc.payload
            if check.probe == "return_type":
                args[tc.id] = tuple(_thaw(a) for a in check.sample_args)
            chunks.append(_chunk_introspection(tc))
        elif tc.kind == KIND_IO:
            io: IoTest = tc.payload
            if io.call is not None:
                # arguments arrive exactly as authored: JSON arrays become
                # Python lists, matching what a student compares against
                args[tc.id] = tuple(_thaw(a) for a in io.call.args)
            else:
                args[tc.id] = io.stdin
            expected[tc.id] = (io.expected, io.compare, io.tolerance)
            chunks.append(_chunk_io(tc))

    # single-line tables keep hidden literals off any line a traceback
    # could quote
    tables = (f"_CR_ARGS = {args!r}\n"
              f"_CR_EXPECTED = {expected!r}\n")
    # a pure program-mode question must not run the student program at
    # load time: it would block on stdin; definitions are only needed
    # in the harness namespace for probes and call-mode tests
    needs_defs = any(
        tc.kind == KIND_INTROSPECTION
        or (tc.kind == KIND_IO and tc.payload.call is not None)
        for tc in tests if tc.kind != KIND_HEURISTIC)
    student_exec = _STUDENT_EXEC if needs_defs else ""
    harness = (_PRELUDE + tables + student_exec + "\n" + "\n".join(chunks))
    req = SandboxRequest(
        language=PYTHON3,
        files={STUDENT_FILE: code, HARNESS_FILE: harness},
        phase=PHASE_RUN,
        entry=HARNESS_FILE,
        limits=q.limits,
    )
    return HarnessPlan(requests=[req], protocol_tests=protocol_tests)
