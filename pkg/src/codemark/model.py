"""Question and test-case data model.

A question is authored as a single JSON document (one object per question)
so that question banks can live in version control and be validated from
the command line.  ``parse_question`` turns a document into an immutable
``Question``; questions are safe to share between concurrent graders.

Marks are held as :class:`fractions.Fraction` so that sums and penalty
arithmetic stay exact (0.5 + 0.5 is 1, not 0.9999...); they are converted
to floats only at serialization boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

PYTHON3 = "python3"
CPP14 = "cpp14"
LANGUAGES = (PYTHON3, CPP14)

KIND_IO = "io"
KIND_INTROSPECTION = "introspection"
KIND_HEURISTIC = "heuristic"
TEST_KINDS = (KIND_IO, KIND_INTROSPECTION, KIND_HEURISTIC)

FLAG_EXAMPLE = "example"
FLAG_PRECHECK = "precheck"
FLAG_HIDDEN = "hidden"
TEST_FLAGS = (FLAG_EXAMPLE, FLAG_PRECHECK, FLAG_HIDDEN)

# probes legal per language
PY_PROBES = ("symbol_defined", "arity", "return_type")
CPP_PROBES = ("symbol_defined", "callable_with", "returns_type_cpp",
              "derives_from", "has_attribute", "has_method")

COMPARE_EXACT = "exact_text"
COMPARE_NUMERIC = "numeric_tolerance"


class QuestionFormatError(ValueError):
    """The question document is malformed or violates a model invariant."""


def _marks_fraction(value) -> Fraction:
    # str() round-trips JSON numbers through their decimal spelling, so
    # 0.1 becomes 1/10 rather than the nearest binary fraction.
    try:
        f = Fraction(str(value))
    except (ValueError, TypeError) as exc:
        raise QuestionFormatError(f"bad marks value {value!r}") from exc
    if f < 0:
        raise QuestionFormatError(f"marks must be non-negative, got {value!r}")
    return f


@dataclass(frozen=True)
class ResourceLimits:
    compile_timeout: float = 30.0   # seconds
    run_timeout: float = 5.0        # seconds
    memory_cap: int = 512 * 1024 * 1024   # bytes
    output_cap: int = 64 * 1024           # bytes

    def __post_init__(self):
        for name in ("compile_timeout", "run_timeout", "memory_cap", "output_cap"):
            if getattr(self, name) <= 0:
                raise QuestionFormatError(f"limit {name} must be positive")


@dataclass(frozen=True)
class PenaltyRegime:
    """Per-attempt penalty percentages; attempts beyond the list reuse the
    final entry."""

    percentages: tuple[int, ...]

    def __post_init__(self):
        if not self.percentages:
            raise QuestionFormatError("penalty regime must not be empty")
        for p in self.percentages:
            if not isinstance(p, int) or not 0 <= p <= 100:
                raise QuestionFormatError(f"penalty percentage {p!r} not in [0,100]")

    def percent_for(self, attempt_number: int) -> int:
        """Penalty percentage for a 1-indexed check attempt."""
        if attempt_number < 1:
            raise ValueError(f"attempt_number must be >= 1, got {attempt_number}")
        idx = min(attempt_number, len(self.percentages)) - 1
        return self.percentages[idx]


#: First two checks free, then an escalating surcharge.
DEFAULT_PENALTY_REGIME = PenaltyRegime((0, 0, 10, 20, 30, 40, 50))


@dataclass(frozen=True)
class CallSpec:
    """Invocation of a named symbol with literal arguments."""

    target: str
    args: tuple

    def render(self) -> str:
        # args were frozen to tuples for hashability; show them as the
        # lists the author wrote, since JSON has no tuple literal
        return f"{self.target}({', '.join(repr(_thaw(a)) for a in self.args)})"


@dataclass(frozen=True)
class IoTest:
    expected: str
    compare: str = COMPARE_EXACT
    tolerance: float = 1e-6
    call: CallSpec | None = None
    stdin: str | None = None

    def __post_init__(self):
        if (self.call is None) == (self.stdin is None):
            raise QuestionFormatError("io test needs exactly one of call or stdin")
        if self.compare == COMPARE_EXACT and not self.expected:
            raise QuestionFormatError("exact_text io test needs a non-empty expected")
        if self.compare == COMPARE_NUMERIC and self.tolerance <= 0:
            raise QuestionFormatError("numeric_tolerance needs tol > 0")
        if self.compare not in (COMPARE_EXACT, COMPARE_NUMERIC):
            raise QuestionFormatError(f"unknown compare mode {self.compare!r}")


@dataclass(frozen=True)
class IntrospectionCheck:
    probe: str
    name: str = ""              # function symbol, or class for class probes
    arity: int | None = None
    sample_args: tuple = ()
    expected_type: str = ""     # python type name or C++ return type
    param_types: tuple[str, ...] = ()
    base: str = ""              # derives_from
    attribute: str = ""         # has_attribute
    method: str = ""            # has_method

    def describe(self) -> str:
        p = self.probe
        if p == "symbol_defined":
            return f"{self.name} is defined"
        if p == "arity":
            return f"{self.name} takes {self.arity} parameter(s)"
        if p == "return_type":
            return f"{self.name} returns a {self.expected_type}"
        if p == "callable_with":
            return f"{self.name} accepts ({', '.join(self.param_types)})"
        if p == "returns_type_cpp":
            return f"{self.name}({', '.join(self.param_types)}) returns {self.expected_type}"
        if p == "derives_from":
            return f"{self.name} derives from {self.base}"
        if p == "has_attribute":
            return f"{self.name} has attribute {self.attribute}: {self.expected_type}"
        if p == "has_method":
            args = ", ".join(self.param_types)
            return f"{self.name} has method {self.method}({args}) -> {self.expected_type}"
        return p


RECURSION_IGNORE = "ignore"
RECURSION_FORBIDDEN = "forbidden"
RECURSION_REQUIRED = "required"


@dataclass(frozen=True)
class SourceHeuristic:
    required_substrings: tuple[str, ...] = ()
    forbidden_substrings: tuple[str, ...] = ()
    recursion: str = RECURSION_IGNORE
    recursion_target: str = ""

    def __post_init__(self):
        if self.recursion not in (RECURSION_IGNORE, RECURSION_FORBIDDEN, RECURSION_REQUIRED):
            raise QuestionFormatError(f"unknown recursion mode {self.recursion!r}")
        if self.recursion != RECURSION_IGNORE and not self.recursion_target:
            raise QuestionFormatError("recursion check needs a target name")
        if (not self.required_substrings and not self.forbidden_substrings
                and self.recursion == RECURSION_IGNORE):
            raise QuestionFormatError("heuristic has no conditions")

    def describe(self) -> str:
        parts = []
        if self.required_substrings:
            parts.append("uses " + ", ".join(repr(s) for s in self.required_substrings))
        if self.forbidden_substrings:
            parts.append("avoids " + ", ".join(repr(s) for s in self.forbidden_substrings))
        if self.recursion == RECURSION_FORBIDDEN:
            parts.append(f"no recursion in {self.recursion_target}")
        elif self.recursion == RECURSION_REQUIRED:
            parts.append(f"{self.recursion_target} recurses")
        return "; ".join(parts)


@dataclass(frozen=True)
class TestCase:
    id: str
    marks: Fraction
    kind: str
    payload: IoTest | IntrospectionCheck | SourceHeuristic
    flags: frozenset[str] = frozenset()
    display_order: int = 0

    def __post_init__(self):
        if self.kind not in TEST_KINDS:
            raise QuestionFormatError(f"unknown test kind {self.kind!r}")
        expected = {KIND_IO: IoTest, KIND_INTROSPECTION: IntrospectionCheck,
                    KIND_HEURISTIC: SourceHeuristic}[self.kind]
        if not isinstance(self.payload, expected):
            raise QuestionFormatError(
                f"test {self.id}: payload does not match kind {self.kind}")
        bad = self.flags - set(TEST_FLAGS)
        if bad:
            raise QuestionFormatError(f"test {self.id}: unknown flags {sorted(bad)}")
        if FLAG_EXAMPLE in self.flags and FLAG_HIDDEN in self.flags:
            raise QuestionFormatError(
                f"test {self.id}: example and hidden are mutually exclusive")

    @property
    def is_example(self) -> bool:
        return FLAG_EXAMPLE in self.flags

    @property
    def is_precheck(self) -> bool:
        return FLAG_PRECHECK in self.flags

    @property
    def is_hidden(self) -> bool:
        return FLAG_HIDDEN in self.flags


@dataclass(frozen=True)
class Question:
    id: str
    title: str
    statement: str
    language: str
    tests: tuple[TestCase, ...]
    preload_code: str = ""
    model_answer: str | None = None
    penalty_regime: PenaltyRegime = DEFAULT_PENALTY_REGIME
    limits: ResourceLimits = field(default_factory=ResourceLimits)
    doc_links: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise QuestionFormatError(f"unknown language {self.language!r}")
        if not self.tests:
            raise QuestionFormatError("no tests")
        seen = set()
        for tc in self.tests:
            if tc.id in seen:
                raise QuestionFormatError(f"duplicate test id {tc.id!r}")
            seen.add(tc.id)
        if total_marks(self) <= 0:
            raise QuestionFormatError("total marks must be positive")
        allowed = PY_PROBES if self.language == PYTHON3 else CPP_PROBES
        for tc in self.tests:
            if tc.kind == KIND_INTROSPECTION and tc.payload.probe not in allowed:
                raise QuestionFormatError(
                    f"test {tc.id}: probe {tc.payload.probe!r} not available "
                    f"for {self.language}")

    def test_by_id(self, test_id: str) -> TestCase:
        for tc in self.tests:
            if tc.id == test_id:
                return tc
        raise KeyError(test_id)


def total_marks(q: Question) -> Fraction:
    """Sum of marks over all tests; the single source of truth for
    grading denominators."""
    return sum((tc.marks for tc in q.tests), start=Fraction(0))


# ---------------------------------------------------------------------------
# document parsing

def _parse_compare(doc: dict) -> tuple[str, float]:
    raw = doc.get("compare", {"mode": COMPARE_EXACT})
    if isinstance(raw, str):
        raw = {"mode": raw}
    mode = raw.get("mode", COMPARE_EXACT)
    tol = float(raw.get("tol", 1e-6))
    return mode, tol


def _parse_io(doc: dict) -> IoTest:
    mode, tol = _parse_compare(doc)
    call = None
    stdin = None
    if "call" in doc:
        c = doc["call"]
        args = c.get("args", [])
        if not isinstance(args, list):
            raise QuestionFormatError("call args must be a list")
        call = CallSpec(target=c["target"], args=_freeze_literals(args))
    if "stdin" in doc:
        stdin = doc["stdin"]
    return IoTest(expected=doc.get("expected", ""), compare=mode, tolerance=tol,
                  call=call, stdin=stdin)


def _freeze_literals(value):
    """Literals from JSON, with lists frozen to tuples so payloads stay
    hashable; the tuple/list distinction is erased on purpose."""
    if isinstance(value, list):
        return tuple(_freeze_literals(v) for v in value)
    return value


def _parse_introspection(doc: dict) -> IntrospectionCheck:
    probe = doc.get("probe")
    if probe in ("derives_from", "has_attribute", "has_method"):
        name = doc.get("class", "")
    else:
        name = doc.get("name", "")
    if not probe:
        raise QuestionFormatError("introspection payload needs a probe")
    if not name:
        raise QuestionFormatError(f"probe {probe!r} needs a symbol or class name")
    return IntrospectionCheck(
        probe=probe,
        name=name,
        arity=doc.get("count"),
        sample_args=_freeze_literals(doc.get("sample_args", [])),
        expected_type=doc.get("expected_type", doc.get("return_type", doc.get("type", ""))),
        param_types=tuple(doc.get("param_types", [])),
        base=doc.get("base", ""),
        attribute=doc.get("attribute", ""),
        method=doc.get("method", ""),
    )


def _parse_heuristic(doc: dict) -> SourceHeuristic:
    return SourceHeuristic(
        required_substrings=tuple(doc.get("required_substrings", [])),
        forbidden_substrings=tuple(doc.get("forbidden_substrings", [])),
        recursion=doc.get("recursion", RECURSION_IGNORE),
        recursion_target=doc.get("recursion_target", ""),
    )


_PAYLOAD_PARSERS = {
    KIND_IO: _parse_io,
    KIND_INTROSPECTION: _parse_introspection,
    KIND_HEURISTIC: _parse_heuristic,
}


def _parse_test(doc: dict, order: int) -> TestCase:
    try:
        kind = doc["kind"]
        test_id = doc["id"]
    except KeyError as exc:
        raise QuestionFormatError(f"test missing field {exc}") from exc
    if kind not in _PAYLOAD_PARSERS:
        raise QuestionFormatError(f"unknown test kind {kind!r}")
    payload = _PAYLOAD_PARSERS[kind](doc.get("payload", {}))
    return TestCase(
        id=test_id,
        marks=_marks_fraction(doc.get("marks", 0)),
        kind=kind,
        payload=payload,
        flags=frozenset(doc.get("flags", [])),
        display_order=order,
    )


def _parse_limits(doc: dict) -> ResourceLimits:
    defaults = ResourceLimits()
    return ResourceLimits(
        compile_timeout=float(doc.get("compile_timeout_s", defaults.compile_timeout)),
        run_timeout=float(doc.get("run_timeout_s", defaults.run_timeout)),
        memory_cap=int(doc.get("memory_mb", defaults.memory_cap // (1024 * 1024))) * 1024 * 1024,
        output_cap=int(doc.get("output_kb", defaults.output_cap // 1024)) * 1024,
    )


def parse_question(doc: str | dict) -> Question:
    """Parse a question document (JSON text or an already-decoded object).

    Test order in the document is both execution order and display order.
    Raises :class:`QuestionFormatError` on any structural violation.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise QuestionFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise QuestionFormatError("question document must be a JSON object")
    try:
        qid = doc["id"]
        language = doc["language"]
    except KeyError as exc:
        raise QuestionFormatError(f"question missing field {exc}") from exc

    tests = tuple(_parse_test(t, i) for i, t in enumerate(doc.get("tests", [])))
    regime = DEFAULT_PENALTY_REGIME
    if "penalty_regime" in doc:
        regime = PenaltyRegime(tuple(doc["penalty_regime"]))
    links = tuple((d["label"], d["url"]) for d in doc.get("doc_links", []))
    return Question(
        id=qid,
        title=doc.get("title", qid),
        statement=doc.get("statement", ""),
        language=language,
        tests=tests,
        preload_code=doc.get("preload", ""),
        model_answer=doc.get("model_answer"),
        penalty_regime=regime,
        limits=_parse_limits(doc.get("limits", {})),
        doc_links=links,
    )


# ---------------------------------------------------------------------------
# serialization

def _io_to_doc(t: IoTest) -> dict:
    doc: dict = {"expected": t.expected,
                 "compare": {"mode": t.compare, "tol": t.tolerance}}
    if t.call is not None:
        doc["call"] = {"target": t.call.target, "args": _thaw(t.call.args)}
    if t.stdin is not None:
        doc["stdin"] = t.stdin
    return doc


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


def _introspection_to_doc(t: IntrospectionCheck) -> dict:
    doc: dict = {"probe": t.probe}
    if t.probe in ("derives_from", "has_attribute", "has_method"):
        doc["class"] = t.name
    else:
        doc["name"] = t.name
    if t.arity is not None:
        doc["count"] = t.arity
    if t.sample_args:
        doc["sample_args"] = _thaw(t.sample_args)
    if t.expected_type:
        doc["expected_type"] = t.expected_type
    if t.param_types:
        doc["param_types"] = list(t.param_types)
    if t.base:
        doc["base"] = t.base
    if t.attribute:
        doc["attribute"] = t.attribute
    if t.method:
        doc["method"] = t.method
    return doc


def _heuristic_to_doc(t: SourceHeuristic) -> dict:
    doc: dict = {}
    if t.required_substrings:
        doc["required_substrings"] = list(t.required_substrings)
    if t.forbidden_substrings:
        doc["forbidden_substrings"] = list(t.forbidden_substrings)
    if t.recursion != RECURSION_IGNORE:
        doc["recursion"] = t.recursion
        doc["recursion_target"] = t.recursion_target
    return doc


def question_to_doc(q: Question) -> dict:
    """Inverse of parse_question; parse(serialize(q)) is structurally equal
    to q."""
    tests = []
    for tc in q.tests:
        payload = {
            KIND_IO: _io_to_doc,
            KIND_INTROSPECTION: _introspection_to_doc,
            KIND_HEURISTIC: _heuristic_to_doc,
        }[tc.kind](tc.payload)
        tests.append({
            "id": tc.id,
            "marks": float(tc.marks),
            "kind": tc.kind,
            "flags": sorted(tc.flags),
            "payload": payload,
        })
    doc = {
        "id": q.id,
        "title": q.title,
        "statement": q.statement,
        "language": q.language,
        "preload": q.preload_code,
        "penalty_regime": list(q.penalty_regime.percentages),
        "limits": {
            "compile_timeout_s": q.limits.compile_timeout,
            "run_timeout_s": q.limits.run_timeout,
            "memory_mb": q.limits.memory_cap // (1024 * 1024),
            "output_kb": q.limits.output_cap // 1024,
        },
        "doc_links": [{"label": l, "url": u} for l, u in q.doc_links],
        "tests": tests,
    }
    if q.model_answer is not None:
        doc["model_answer"] = q.model_answer
    return doc


# ---------------------------------------------------------------------------
# student view

def student_view(q: Question) -> dict:
    """What a student may see before attempting: statement, preload, doc
    links, and the input/expected pairs of example-flagged tests only.
    Hidden payloads are omitted entirely, not blanked.
    """
    examples = []
    for tc in q.tests:
        if not tc.is_example or tc.kind != KIND_IO:
            continue
        io: IoTest = tc.payload
        shown_input = io.call.render() if io.call is not None else (io.stdin or "")
        examples.append({
            "test_id": tc.id,
            "input": shown_input,
            "expected": io.expected,
        })
    return {
        "id": q.id,
        "title": q.title,
        "statement": q.statement,
        "language": q.language,
        "preload": q.preload_code,
        "doc_links": [{"label": l, "url": u} for l, u in q.doc_links],
        "total_marks": float(total_marks(q)),
        "examples": examples,
    }
