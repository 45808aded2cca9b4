"""Static source checks: substring presence and a crude recursion detector.

These are deliberately naive text scans, not parse-tree analyses.  A
substring like " for " (spaces included) approximates "uses a for loop";
recursion in a function f is inferred when the text f occurs at least
twice, once for the definition and once more for a presumed self-call.
The false positives this admits (e.g. the word in a comment) are part of
the check's contract and are documented to question authors.
"""

from __future__ import annotations

from .model import (RECURSION_FORBIDDEN, RECURSION_IGNORE, RECURSION_REQUIRED,
                    SourceHeuristic)


def occurrence_count(code: str, name: str) -> int:
    """Number of (possibly overlapping) occurrences of name in code."""
    if not name:
        return 0
    count = 0
    start = 0
    while True:
        idx = code.find(name, start)
        if idx < 0:
            return count
        count += 1
        start = idx + 1


def looks_recursive(code: str, target: str) -> bool:
    """The definition accounts for one occurrence; any second occurrence
    of the bare name is read as a recursive call."""
    return occurrence_count(code, target) >= 2


def evaluate(h: SourceHeuristic, code: str) -> tuple[bool, str]:
    """Apply one heuristic to submitted source.

    Returns (passed, message); the message names the first violated
    condition, or is empty on a pass.
    """
    for needle in h.required_substrings:
        if needle not in code:
            return False, f"required text {needle!r} not found"
    for needle in h.forbidden_substrings:
        if needle in code:
            return False, f"forbidden text {needle!r} found"
    if h.recursion == RECURSION_FORBIDDEN and looks_recursive(code, h.recursion_target):
        return False, f"{h.recursion_target} appears to recurse"
    if h.recursion == RECURSION_REQUIRED and not looks_recursive(code, h.recursion_target):
        return False, f"{h.recursion_target} does not appear to recurse"
    return True, ""


def evaluate_all(heuristics: list[tuple[str, SourceHeuristic]],
                 code: str) -> dict[str, tuple[bool, str]]:
    """Evaluate (test_id, heuristic) pairs against one source text."""
    return {test_id: evaluate(h, code) for test_id, h in heuristics}


__all__ = ["occurrence_count", "looks_recursive", "evaluate", "evaluate_all",
           "RECURSION_IGNORE", "RECURSION_FORBIDDEN", "RECURSION_REQUIRED"]
