"""Harness output protocol.

A harness reports one line per executed test on stdout:

    CR|<test_id>|PASS
    CR|<test_id>|FAIL|got=<rendering of the observed value>
    CR|<test_id>|ERROR|<diagnostic text>

Anything else on stdout is student noise and is skipped.  A well-formed
line for an unknown test id, a malformed CR-prefixed line, or a second
line for the same id means the harness (or a student forging lines) broke
the protocol; that is a ProtocolError and graders surface it as an
internal error rather than a student result.  A trailing fragment with no
newline is ignored: output truncation can cut a line in half.
"""

from __future__ import annotations

import dataclasses

PREFIX = "CR|"

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_ERROR = "error"
STATUS_NOT_RUN = "not_run"


class ProtocolError(RuntimeError):
    """The harness transcript violates the protocol grammar."""


@dataclasses.dataclass(frozen=True)
class RawOutcome:
    test_id: str
    status: str
    got: str | None = None
    detail: str = ""


def format_pass(test_id: str) -> str:
    return f"{PREFIX}{test_id}|PASS"


def format_fail(test_id: str, got: str) -> str:
    return f"{PREFIX}{test_id}|FAIL|got={got}"


def format_error(test_id: str, msg: str) -> str:
    # protocol lines are line-oriented; embedded newlines would split them
    return f"{PREFIX}{test_id}|ERROR|{msg}".replace("\n", " ")


def parse_protocol(stdout: str, expected_ids: list[str]) -> list[RawOutcome]:
    """Map a harness transcript onto expected_ids, in order.

    Every expected id yields exactly one outcome; ids with no line are
    not_run.  Raises ProtocolError on duplicate or malformed lines.
    """
    lines = stdout.split("\n")
    if not stdout.endswith("\n"):
        lines = lines[:-1]      # truncated fragment, never trust it
    else:
        lines = lines[:-1]      # drop the empty element after final newline

    expected = set(expected_ids)
    seen: dict[str, RawOutcome] = {}
    for line in lines:
        if not line.startswith(PREFIX):
            continue
        outcome = _parse_line(line)
        if outcome.test_id not in expected:
            raise ProtocolError(f"protocol line for unknown test {outcome.test_id!r}")
        if outcome.test_id in seen:
            raise ProtocolError(f"duplicate protocol line for {outcome.test_id!r}")
        seen[outcome.test_id] = outcome
    return [seen.get(tid, RawOutcome(tid, STATUS_NOT_RUN)) for tid in expected_ids]


def _parse_line(line: str) -> RawOutcome:
    parts = line.split("|", 3)
    # parts[0] is the CR prefix tag
    if len(parts) < 3 or not parts[1]:
        raise ProtocolError(f"malformed protocol line {line!r}")
    test_id, verdict = parts[1], parts[2]
    rest = parts[3] if len(parts) == 4 else None
    if verdict == "PASS":
        if rest is not None:
            raise ProtocolError(f"PASS line carries a payload: {line!r}")
        return RawOutcome(test_id, STATUS_PASS)
    if verdict == "FAIL":
        if rest is None or not rest.startswith("got="):
            raise ProtocolError(f"FAIL line missing got=: {line!r}")
        return RawOutcome(test_id, STATUS_FAIL, got=rest[len("got="):])
    if verdict == "ERROR":
        return RawOutcome(test_id, STATUS_ERROR, detail=rest or "")
    raise ProtocolError(f"unknown verdict in {line!r}")
