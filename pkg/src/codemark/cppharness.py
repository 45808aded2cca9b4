"""C++14 harness generation: compile-time introspection probes.

The generated harness #includes the student's translation unit and builds
a ladder of increasingly specific compile-time checks around each probed
symbol: does it exist at all, is it callable with given parameter types,
does that call return exactly the required type.  Every rung is decided
by substitution failure, never by a failing call expression, so the
harness compiles for any student unit that compiles on its own and a
wrong signature degrades to FAIL protocol lines instead of a translation
failure.

The mechanics that make this work:

* Two fallback namespaces per probed function.  ``cr_fb_var`` holds an
  ellipsis overload ``cr_absent f(...)`` that loses to any real overload
  when arguments are present.  With zero arguments there is nothing to
  rank, so existence of a zero-parameter function is detected through a
  second namespace holding an exact ``f()`` decoy: a student ``f()``
  makes the call ambiguous, and that ambiguity (surfacing as a
  substitution failure thanks to a dependent empty parameter pack) is
  itself the existence signal.
* A ``cr_wild`` probe argument convertible to anything scans arities for
  the existence check; explicitly typed probes from the question are
  OR-ed in so overloaded student functions stay detectable.
* Evaluated calls live in ``cr_run`` where no using-directive imports
  the fallbacks; each is a pair of function templates selected by
  ``enable_if`` on the probe result, with argument types routed through
  a dependent alias so the failing branch is never instantiated.
* Class probes gate on completeness (``sizeof`` SFINAE) behind forward
  declarations emitted before the student unit; attribute and method
  detectors are stamped out by preprocessor macros since member names
  cannot be template parameters.
* A renamed ``main`` (object-like macro around the include) lets
  whole-program questions run under the harness with swapped stream
  buffers.
"""

from __future__ import annotations

import string

from .model import (CPP14, KIND_HEURISTIC, KIND_INTROSPECTION, KIND_IO,
                    IntrospectionCheck, IoTest, Question, TestCase)
from .pyharness import HarnessPlan
from .sandbox import PHASE_COMPILE, PHASE_RUN, PHASE_SYNTAX, SandboxRequest

STUDENT_FILE = "student.cpp"
HARNESS_FILE = "harness.cpp"
STUDENT_MAIN = "cr_student_main"

# spelled on FAIL lines when a guarded call could not be compiled in
NOT_CALLABLE = "<not callable>"


def cpp_string(text: str) -> str:
    """Escape text as a C++ string literal (without raw strings, so the
    output stays a single line)."""
    out = ['"']
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif 32 <= ord(ch) < 127:
            out.append(ch)
        else:
            out.append("\\u%04x" % ord(ch))
    out.append('"')
    return "".join(out)


def literal_type(value) -> str:
    """C++ parameter type for a JSON literal argument."""
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "double"
    if isinstance(value, str):
        return "std::string"
    raise ValueError(f"unsupported C++ argument literal {value!r}")


def literal_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return cpp_string(value)
    raise ValueError(f"unsupported C++ argument literal {value!r}")


_T = string.Template

_HEADER = """\
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
"""

_STUDENT_INCLUDE = """\
#define main cr_student_main
#line 1 "student.cpp"
#include "student.cpp"
#undef main
#line 1000 "harness.cpp"
"""

_FUNC_PROBE_ZERO = _T("""\
template <class... A> struct probe_$sym {
    template <class... B> static auto test(int) -> decltype($sym(std::declval<B>()...));
    template <class... B> static cr_fb_var::cr_absent test(...);
    using result = decltype(test<A...>(0));
};
// ambiguity against the exact decoy collapses to the absent marker; that
// is the existence signal for a zero-parameter $sym
constexpr bool exists0_$sym = std::is_same<probe_$sym<>::result, cr_fb_var::cr_absent>::value;
""")

_FUNC_CALL_PROBE = _T("""\
template <class... A> struct call_$sym {
    template <class... B> static auto probe(int) -> decltype($sym(std::declval<B>()...));
    template <class... B> static cr_absent probe(...);
    using result = decltype(probe<A...>(0));
    static constexpr bool callable = !std::is_same<result, cr_absent>::value;
};
constexpr bool exists_$sym = cr_probe_zero::exists0_$sym
    || call_$sym<cr_wild>::callable
    || call_$sym<cr_wild, cr_wild>::callable
    || call_$sym<cr_wild, cr_wild, cr_wild>::callable
    || call_$sym<cr_wild, cr_wild, cr_wild, cr_wild>::callable$siblings;
""")

_CLASS_BLOCK_HEAD = """\
namespace cr_cls {
struct cr_nothing {};
template <class T, class = void> struct cr_complete : std::false_type {};
template <class T> struct cr_complete<T, decltype(void(sizeof(T)))> : std::true_type {};
template <class D, class B, bool = cr_complete<D>::value && cr_complete<B>::value>
struct cr_derives : std::false_type {};
template <class D, class B> struct cr_derives<D, B, true>
    : std::integral_constant<bool,
          std::is_base_of<B, D>::value && !std::is_same<B, D>::value> {};
#define CR_ATTR_PROBE(PID, ATTR) \\
template <class U, bool = cr_complete<U>::value> struct attr_##PID { \\
    static constexpr bool value = false; using type = cr_nothing; }; \\
template <class U> struct attr_##PID<U, true> { \\
    template <class V> static auto test(int) -> decltype(std::declval<V&>().ATTR); \\
    template <class V> static cr_nothing test(...); \\
    using type = decltype(test<U>(0)); \\
    static constexpr bool value = !std::is_same<type, cr_nothing>::value; };
#define CR_METHOD_PROBE(PID, METHOD) \\
template <class U, bool = cr_complete<U>::value> struct method_##PID { \\
    template <class... B> using result = cr_nothing; }; \\
template <class U> struct method_##PID<U, true> { \\
    template <class V, class... B> static auto test(int) \\
        -> decltype(std::declval<V&>().METHOD(std::declval<B>()...)); \\
    template <class V, class... B> static cr_nothing test(...); \\
    template <class... B> using result = decltype(test<U, B...>(0)); };
"""

_HELPERS = """\
static std::ostream* cr_proto = nullptr;

static std::string cr_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\n') out += "\\\\n"; else out += c;
    }
    return out;
}

static void cr_emit(const std::string& line) {
    // leading newline detaches the protocol line from partial student output
    (*cr_proto) << "\\n" << line << "\\n";
    cr_proto->flush();
}

static void cr_report(const std::string& tid, bool ok, const std::string& got) {
    if (ok) cr_emit("CR|" + tid + "|PASS");
    else cr_emit("CR|" + tid + "|FAIL|got=" + cr_escape(got));
}

static std::string cr_strip(std::string s) {
    while (!s.empty() && s.back() == '\\n') s.pop_back();
    return s;
}

static bool cr_num_eq(const std::string& got, const std::string& expected, double tol) {
    std::istringstream a(got), b(expected);
    double x = 0, y = 0;
    if (!(a >> x) || !(b >> y)) return false;
    return std::fabs(x - y) <= tol;
}

static void cr_check_text(const std::string& tid, const std::string& got,
                          const std::string& expected, int numeric, double tol) {
    bool ok = numeric ? cr_num_eq(got, expected, tol)
                      : cr_strip(got) == cr_strip(expected);
    cr_report(tid, ok, got);
}
"""

_IO_RUNNER = _T("""\
template <bool Ok, class D = void>
typename std::enable_if<!Ok, std::string>::type io_$idx() {
    return $not_callable;
}
template <bool Ok, class D = void, class... Pad>
typename std::enable_if<Ok, std::string>::type io_$idx() {
$arg_lines    std::ostringstream os;
    os << $call;
    return os.str();
}
""")

_CALL_MAIN = _T("""\
template <bool Plain, bool Argv, class D = void, class... Pad>
typename std::enable_if<Plain, int>::type call_main() {
    return $student_main(Pad{}...);
}
template <bool Plain, bool Argv, class D = void>
typename std::enable_if<!Plain && Argv, int>::type call_main() {
    typename cr_probe::cr_dep<D, int>::type argc = 1;
    static char prog[] = "student";
    char* argv[] = {prog, nullptr};
    return $student_main(argc, argv);
}
template <bool Plain, bool Argv, class D = void>
typename std::enable_if<!Plain && !Argv, int>::type call_main() { return -1; }
""")

_IO_CALL_EMIT = _T("""\
    {
        std::string got = cr_run::io_$idx<cr_probe::ok_$idx>();
        if (!cr_probe::ok_$idx) cr_report($tid, false, got);
        else cr_check_text($tid, got, $expected, $numeric, $tol);
    }
""")

_IO_STDIN_EMIT = _T("""\
    {
        std::istringstream in($stdin);
        std::ostringstream out;
        std::streambuf* ci = std::cin.rdbuf(in.rdbuf());
        std::streambuf* co = std::cout.rdbuf(out.rdbuf());
        int rc = cr_run::call_main<cr_probe_zero::exists0_$student_main,
                                   cr_probe::argv_main>();
        std::cin.rdbuf(ci);
        std::cout.rdbuf(co);
        (void)rc;
        if (!(cr_probe_zero::exists0_$student_main || cr_probe::argv_main))
            cr_report($tid, false, "no main function");
        else cr_check_text($tid, out.str(), $expected, $numeric, $tol);
    }
""")


def _class_names(tests: list[TestCase]) -> set[str]:
    names: set[str] = set()
    for tc in tests:
        if tc.kind != KIND_INTROSPECTION:
            continue
        check: IntrospectionCheck = tc.payload
        if check.probe in ("derives_from", "has_attribute", "has_method"):
            names.add(check.name)
            if check.base:
                names.add(check.base)
    return names


class _Generator:
    """Assembles one harness unit from the non-heuristic tests."""

    def __init__(self, tests: list[TestCase]):
        self.tests = [tc for tc in tests if tc.kind != KIND_HEURISTIC]
        self.class_names = _class_names(self.tests)
        # symbol_defined names follow the class path when any class probe
        # mentions them, otherwise they are treated as functions
        self.func_symbols: list[str] = []
        self.func_siblings: dict[str, list[tuple[str, ...]]] = {}
        self.attr_stamps: list[tuple[str, str]] = []
        self.method_stamps: list[tuple[str, str]] = []
        self.has_stdin = any(
            tc.kind == KIND_IO and tc.payload.stdin is not None for tc in self.tests)
        self._scan()

    def _want_function(self, name: str, signature: tuple[str, ...] | None):
        if name not in self.func_symbols:
            self.func_symbols.append(name)
            self.func_siblings[name] = []
        if signature is not None and signature not in self.func_siblings[name]:
            self.func_siblings[name].append(signature)

    def _scan(self):
        for i, tc in enumerate(self.tests):
            if tc.kind == KIND_INTROSPECTION:
                check: IntrospectionCheck = tc.payload
                if check.probe == "symbol_defined":
                    if check.name not in self.class_names:
                        self._want_function(check.name, None)
                elif check.probe in ("callable_with", "returns_type_cpp"):
                    self._want_function(check.name, tuple(check.param_types))
                elif check.probe == "has_attribute":
                    self.attr_stamps.append((self._pid(i), check.attribute))
                elif check.probe == "has_method":
                    self.method_stamps.append((self._pid(i), check.method))
            elif tc.kind == KIND_IO and tc.payload.call is not None:
                io: IoTest = tc.payload
                sig = tuple(f"{literal_type(a)}&" for a in io.call.args)
                self._want_function(io.call.target, sig if sig else None)
        if self.has_stdin:
            self._want_function(STUDENT_MAIN, ("int", "char**"))

    @staticmethod
    def _pid(index: int) -> str:
        return f"p{index}"

    # -- flag expressions ---------------------------------------------------

    def _flag_expr(self, index: int, tc: TestCase) -> str | None:
        if tc.kind != KIND_INTROSPECTION:
            return None
        check: IntrospectionCheck = tc.payload
        pid = self._pid(index)
        if check.probe == "symbol_defined":
            if check.name in self.class_names:
                return f"cr_cls::cr_complete<{check.name}>::value"
            return f"cr_probe::exists_{check.name}"
        if check.probe == "callable_with":
            params = ", ".join(check.param_types)
            return f"cr_probe::call_{check.name}<{params}>::callable"
        if check.probe == "returns_type_cpp":
            params = ", ".join(check.param_types)
            return (f"std::is_same<cr_probe::call_{check.name}<{params}>::result, "
                    f"{check.expected_type}>::value")
        if check.probe == "derives_from":
            return f"cr_cls::cr_derives<{check.name}, {check.base}>::value"
        if check.probe == "has_attribute":
            return (f"cr_cls::attr_{pid}<{check.name}>::value && "
                    f"std::is_same<cr_cls::attr_{pid}<{check.name}>::type, "
                    f"{check.expected_type}>::value")
        if check.probe == "has_method":
            params = ", ".join(check.param_types)
            return (f"std::is_same<cr_cls::method_{pid}<{check.name}>"
                    f"::result<{params}>, {check.expected_type}>::value")
        raise ValueError(f"probe {check.probe!r} not supported for cpp14")

    def _fail_text(self, tc: TestCase) -> str:
        check: IntrospectionCheck = tc.payload
        return {
            "symbol_defined": "not defined",
            "callable_with": "no matching call",
            "returns_type_cpp": "different return type",
            "derives_from": "inheritance not found",
            "has_attribute": "attribute missing or of a different type",
            "has_method": "method missing or with a different signature",
        }[check.probe]

    # -- section builders ---------------------------------------------------

    def _forward_decls(self) -> str:
        return "".join(f"struct {name};\n" for name in sorted(self.class_names))

    def _function_machinery(self) -> str:
        if not self.func_symbols:
            return ""
        zero_decls = "".join(f"cr_no_zero_arity {sym}();\n" for sym in self.func_symbols)
        var_decls = "".join(f"cr_absent {sym}(...);\n" for sym in self.func_symbols)
        zero_probes = "".join(_FUNC_PROBE_ZERO.substitute(sym=sym)
                              for sym in self.func_symbols)
        call_probes = []
        for sym in self.func_symbols:
            siblings = "".join(
                f"\n    || call_{sym}<{', '.join(sig)}>::callable"
                for sig in self.func_siblings[sym] if sig)
            call_probes.append(_FUNC_CALL_PROBE.substitute(sym=sym, siblings=siblings))
        flags = []
        for i, tc in enumerate(self.tests):
            expr = self._flag_expr(i, tc)
            if (tc.kind == KIND_INTROSPECTION and expr is not None
                    and not expr.startswith("cr_cls::")
                    and "cr_cls::" not in expr):
                flags.append(f"constexpr bool flag_{i} = {expr};\n")
        if self.has_stdin:
            flags.append(f"constexpr bool argv_main = "
                         f"call_{STUDENT_MAIN}<int, char**>::callable;\n")
        io_guards = []
        for i, tc in enumerate(self.tests):
            if tc.kind == KIND_IO and tc.payload.call is not None:
                io: IoTest = tc.payload
                target = io.call.target
                if io.call.args:
                    sig = ", ".join(f"{literal_type(a)}&" for a in io.call.args)
                    callable_expr = f"call_{target}<{sig}>::callable"
                    result_expr = f"call_{target}<{sig}>::result"
                else:
                    callable_expr = f"cr_probe_zero::exists0_{target}"
                    result_expr = None
                if result_expr is None:
                    io_guards.append(f"constexpr bool ok_{i} = {callable_expr};\n")
                else:
                    io_guards.append(
                        f"constexpr bool ok_{i} = {callable_expr}\n"
                        f"    && cr_streamable<{result_expr}>::value;\n")
        return (
            "namespace cr_fb_zero {\nstruct cr_no_zero_arity {};\n" + zero_decls + "}\n"
            "namespace cr_fb_var {\nstruct cr_absent {};\n" + var_decls + "}\n"
            "namespace cr_probe_zero {\nusing namespace cr_fb_zero;\n"
            + zero_probes + "}\n"
            "namespace cr_probe {\nusing namespace cr_fb_var;\n"
            "struct cr_wild { template <class T> operator T&&() const; };\n"
            "template <class D, class T> struct cr_dep { using type = T; };\n"
            "template <class D, class T> using cr_dep_t = typename cr_dep<D, T>::type;\n"
            "template <class T, class = void> struct cr_streamable : std::false_type {};\n"
            "template <class T> struct cr_streamable<T,\n"
            "    decltype(void(std::declval<std::ostream&>() << std::declval<T>()))>\n"
            "    : std::true_type {};\n"
            + "".join(call_probes) + "".join(flags) + "".join(io_guards) + "}\n")

    def _class_machinery(self) -> str:
        if not self.class_names:
            return ""
        stamps = "".join(f"CR_ATTR_PROBE({pid}, {attr})\n"
                         for pid, attr in self.attr_stamps)
        stamps += "".join(f"CR_METHOD_PROBE({pid}, {method})\n"
                          for pid, method in self.method_stamps)
        flags = []
        for i, tc in enumerate(self.tests):
            expr = self._flag_expr(i, tc)
            if expr is not None and "cr_cls::" in expr:
                # inside the namespace the qualifier is redundant but harmless
                flags.append(f"constexpr bool flag_{i} = {expr};\n")
        return _CLASS_BLOCK_HEAD + stamps + "".join(flags) + "}\n"

    def _run_machinery(self) -> str:
        parts = ["namespace cr_run {\n"]
        for i, tc in enumerate(self.tests):
            if tc.kind != KIND_IO or tc.payload.call is None:
                continue
            io: IoTest = tc.payload
            arg_lines = []
            arg_names = []
            for n, arg in enumerate(io.call.args):
                ctype = literal_type(arg)
                arg_lines.append(f"    cr_probe::cr_dep_t<D, {ctype}> a{n} = "
                                 f"{literal_value(arg)};\n")
                arg_names.append(f"a{n}")
            if arg_names:
                call = f"{io.call.target}({', '.join(arg_names)})"
            else:
                # the empty Pad pack keeps a zero-argument call dependent
                call = f"{io.call.target}(Pad{{}}...)"
            parts.append(_IO_RUNNER.substitute(
                idx=i, not_callable=cpp_string(NOT_CALLABLE),
                arg_lines="".join(arg_lines), call=call))
        if self.has_stdin:
            parts.append(_CALL_MAIN.substitute(student_main=STUDENT_MAIN))
        parts.append("}\n")
        return "".join(parts) if len(parts) > 2 else ""

    def _main(self) -> str:
        lines = ["int main() {\n",
                 "    std::ostream real_out(std::cout.rdbuf());\n",
                 "    cr_proto = &real_out;\n"]
        for i, tc in enumerate(self.tests):
            if tc.kind == KIND_INTROSPECTION:
                expr = self._flag_expr(i, tc)
                ns = "cr_cls" if "cr_cls::" in (expr or "") else "cr_probe"
                lines.append(f"    cr_report({cpp_string(tc.id)}, "
                             f"{ns}::flag_{i}, {cpp_string(self._fail_text(tc))});\n")
            elif tc.kind == KIND_IO:
                io: IoTest = tc.payload
                numeric = 1 if io.compare == "numeric_tolerance" else 0
                if io.call is not None:
                    lines.append(_IO_CALL_EMIT.substitute(
                        idx=i, tid=cpp_string(tc.id),
                        expected=cpp_string(io.expected),
                        numeric=numeric, tol=repr(io.tolerance)))
                else:
                    lines.append(_IO_STDIN_EMIT.substitute(
                        tid=cpp_string(tc.id), stdin=cpp_string(io.stdin or ""),
                        expected=cpp_string(io.expected),
                        numeric=numeric, tol=repr(io.tolerance),
                        student_main=STUDENT_MAIN))
        lines.append("    return 0;\n}\n")
        return "".join(lines)

    def source(self) -> str:
        sections = [
            _HEADER,
            self._forward_decls(),
            _STUDENT_INCLUDE,
            self._function_machinery(),
            self._class_machinery(),
            self._run_machinery(),
            _HELPERS,
            self._main(),
        ]
        return "\n".join(s for s in sections if s)


def generate_cpp_probe_source(checks: list[IntrospectionCheck]) -> str:
    """Probe unit for a list of introspection checks alone; used by the
    question validator and by tests that exercise probes directly."""
    tests = [TestCase(id=f"probe{i}", marks=1, kind=KIND_INTROSPECTION, payload=c,
                      display_order=i)
             for i, c in enumerate(checks)]
    return _Generator(tests).source()


def generate_cpp_harness(q: Question, code: str,
                         tests: list[TestCase]) -> HarnessPlan:
    """Three-phase plan: student-alone syntax gate, harness compile, run."""
    if q.language != CPP14:
        raise ValueError("generate_cpp_harness needs a cpp14 question")
    gen = _Generator(tests)
    harness = gen.source()
    files = {STUDENT_FILE: code, HARNESS_FILE: harness}
    gate = SandboxRequest(language=CPP14, files={STUDENT_FILE: code},
                          phase=PHASE_SYNTAX, entry=STUDENT_FILE, limits=q.limits)
    build = SandboxRequest(language=CPP14, files=files, phase=PHASE_COMPILE,
                           entry=HARNESS_FILE, limits=q.limits)
    run = SandboxRequest(language=CPP14, files=files, phase=PHASE_RUN,
                         entry=HARNESS_FILE, limits=q.limits)
    return HarnessPlan(requests=[gate, build, run],
                       protocol_tests=[tc.id for tc in gen.tests])
