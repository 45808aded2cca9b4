"""SFINAE probe ladder against the C++ submission corpus.

Every test here compiles generated harnesses with the real toolchain, so
the module skips wholesale when g++ is unavailable.
"""

import tempfile

import pytest

from codemark import cppharness, model, protocol, sandbox
from conftest import load_cpp, load_question, require_gxx

pytestmark = pytest.mark.usefixtures("_need_gxx")


@pytest.fixture(scope="session", autouse=True)
def _need_gxx():
    require_gxx()


BOX = sandbox.DEFAULT_SANDBOX


def run_cpp(question, source):
    """Walk the three-phase plan in one workspace; returns (phase results,
    outcomes or None)."""
    plan = cppharness.generate_cpp_harness(question, source, list(question.tests))
    gate, build, run = plan.requests
    with tempfile.TemporaryDirectory(prefix="cmtest-") as ws:
        gate_res = BOX.execute(gate, workspace=ws)
        if not gate_res.ok:
            return [gate_res], None
        build_res = BOX.execute(build, workspace=ws)
        if not build_res.ok:
            return [gate_res, build_res], None
        run_res = BOX.execute(run, workspace=ws)
    outcomes = protocol.parse_protocol(run_res.stdout, plan.protocol_tests)
    return [gate_res, build_res, run_res], outcomes


def statuses(question, source):
    results, outcomes = run_cpp(question, source)
    assert outcomes is not None, (
        f"harness did not run; last verdict {results[-1].verdict}: "
        f"{results[-1].stderr[:800]}")
    return "".join({"pass": "P", "fail": "F", "error": "E",
                    "not_run": "-"}[o.status] for o in outcomes)


@pytest.fixture(scope="module")
def doubler_q():
    return load_question("doubler")


@pytest.fixture(scope="module")
def dog_q():
    return load_question("animal_dog")


@pytest.fixture(scope="module")
def echo_q():
    return load_question("echo_double")


# -- doubler ladder ---------------------------------------------------------

def test_model_all_pass(doubler_q):
    assert statuses(doubler_q, load_cpp("doubler_model")) == "PPPPP"


def test_returns10_exactly_symbol_probe_passes(doubler_q):
    # zero-parameter doubler: exists, not callable with an int, and the
    # harness must still compile
    results, outcomes = run_cpp(doubler_q, load_cpp("doubler_returns10"))
    assert len(results) == 3, "all three phases must succeed"
    by_id = {o.test_id: o for o in outcomes}
    assert by_id["c-name"].status == protocol.STATUS_PASS
    assert by_id["c-call"].status == protocol.STATUS_FAIL
    assert by_id["c-ret"].status == protocol.STATUS_FAIL
    assert by_id["c-ex"].status == protocol.STATUS_FAIL
    assert by_id["c-ex"].got == cppharness.NOT_CALLABLE
    assert by_id["c-hid"].status == protocol.STATUS_FAIL


def test_wrong_arity(doubler_q):
    assert statuses(doubler_q, load_cpp("doubler_wrong_arity")) == "PFFFF"


def test_wrong_return_type(doubler_q):
    # the double result still prints as "6", so io passes; only the
    # return-type rung catches the difference
    assert statuses(doubler_q, load_cpp("doubler_wrong_return")) == "PPFPP"


def test_missing_function(doubler_q):
    assert statuses(doubler_q, load_cpp("doubler_missing")) == "FFFFF"


def test_void_return_does_not_break_harness(doubler_q):
    # callable but nothing printable comes back; io degrades to FAIL
    assert statuses(doubler_q, load_cpp("doubler_void")) == "PPFFF"


def test_string_signature_found_by_wildcard_scan(doubler_q):
    assert statuses(doubler_q, load_cpp("doubler_string")) == "PFFFF"


def test_overloaded_function_detected(doubler_q):
    # the wildcard probe alone is ambiguous for overload sets; the typed
    # sibling probes keep the existence check monotone
    assert statuses(doubler_q, load_cpp("doubler_overloaded")) == "PPPPP"


def test_template_function(doubler_q):
    assert statuses(doubler_q, load_cpp("doubler_template")) == "PPPPP"


def test_student_main_is_renamed_away(doubler_q):
    results, outcomes = run_cpp(doubler_q, load_cpp("doubler_with_main"))
    assert len(results) == 3
    assert all(o.status == protocol.STATUS_PASS for o in outcomes)
    # their main must not have run ahead of the harness
    assert "14" not in results[2].stdout


def test_syntax_error_stops_at_gate(doubler_q):
    results, outcomes = run_cpp(doubler_q, load_cpp("syntax_error"))
    assert outcomes is None
    assert len(results) == 1
    assert results[0].verdict == sandbox.VERDICT_COMPILE_ERROR
    assert "error" in results[0].stderr
    # diagnostics point into the student's own file
    assert "student.cpp" in results[0].stderr


# -- class probes -----------------------------------------------------------

def test_dog_model(dog_q):
    assert statuses(dog_q, load_cpp("dog_model")) == "PPPP"


def test_dog_without_inheritance(dog_q):
    assert statuses(dog_q, load_cpp("dog_no_inherit")) == "PFPP"


def test_dog_wrong_method_keeps_inheritance_credit(dog_q):
    # the broken method must not cost the inheritance marks
    assert statuses(dog_q, load_cpp("dog_wrong_speak")) == "PPPF"


def test_dog_private_attribute_not_visible(dog_q):
    assert statuses(dog_q, load_cpp("dog_private_name")) == "PPFP"


def test_dog_missing_class(dog_q):
    assert statuses(dog_q, load_cpp("dog_missing")) == "FFFF"


# -- whole-program capture --------------------------------------------------

def test_echo_model(echo_q):
    assert statuses(echo_q, load_cpp("echo_model")) == "PP"


def test_echo_argv_main(echo_q):
    assert statuses(echo_q, load_cpp("echo_argv_main")) == "PP"


def test_echo_without_main(echo_q):
    results, outcomes = run_cpp(echo_q, load_cpp("echo_no_main"))
    assert len(results) == 3, "missing main must not break the build"
    assert all(o.status == protocol.STATUS_FAIL for o in outcomes)


def test_echo_preload_runs_but_fails(echo_q):
    assert statuses(echo_q, echo_q.preload_code) == "FF"


# -- corpus-wide invariants -------------------------------------------------

CORPUS = [
    ("doubler", "doubler_model"), ("doubler", "doubler_returns10"),
    ("doubler", "doubler_wrong_arity"), ("doubler", "doubler_wrong_return"),
    ("doubler", "doubler_missing"), ("doubler", "doubler_void"),
    ("doubler", "doubler_string"), ("doubler", "doubler_overloaded"),
    ("doubler", "doubler_template"), ("doubler", "doubler_with_main"),
    ("animal_dog", "dog_model"), ("animal_dog", "dog_no_inherit"),
    ("animal_dog", "dog_wrong_speak"), ("animal_dog", "dog_private_name"),
    ("animal_dog", "dog_missing"),
    ("echo_double", "echo_model"), ("echo_double", "echo_argv_main"),
    ("echo_double", "echo_no_main"),
]


@pytest.fixture(scope="module")
def corpus_runs():
    runs = {}
    for qname, sub in CORPUS:
        q = load_question(qname)
        runs[(qname, sub)] = run_cpp(q, load_cpp(sub))
    return runs


def test_harness_compiles_for_every_gated_source(corpus_runs):
    """Any student unit that passes the syntax gate must never break the
    harness build."""
    for key, (results, outcomes) in corpus_runs.items():
        assert len(results) == 3, f"{key}: harness build failed: " \
            f"{results[-1].stderr[:500]}"
        assert outcomes is not None, key


def test_probe_ladder_monotone_over_corpus(corpus_runs):
    """callable_with failing implies returns_type failing for the same
    signature."""
    for (qname, sub), (results, outcomes) in corpus_runs.items():
        if qname != "doubler":
            continue
        by_id = {o.test_id: o for o in outcomes}
        if by_id["c-call"].status != protocol.STATUS_PASS:
            assert by_id["c-ret"].status != protocol.STATUS_PASS, (qname, sub)
        # and existence failing implies everything below fails
        if by_id["c-name"].status != protocol.STATUS_PASS:
            for tid in ("c-call", "c-ret", "c-ex", "c-hid"):
                assert by_id[tid].status != protocol.STATUS_PASS, (qname, sub)


def test_probe_source_generates_standalone():
    checks = [
        model.IntrospectionCheck(probe="symbol_defined", name="doubler"),
        model.IntrospectionCheck(probe="callable_with", name="doubler",
                                 param_types=("int",)),
        model.IntrospectionCheck(probe="returns_type_cpp", name="doubler",
                                 param_types=("int",), expected_type="int"),
    ]
    src = cppharness.generate_cpp_probe_source(checks)
    assert "cr_fb_zero" in src and "cr_fb_var" in src
    assert 'decltype(doubler(std::declval<B>()...))' in src
