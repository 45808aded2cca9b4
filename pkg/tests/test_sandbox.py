"""Child-process isolation: limits, verdicts, workspace hygiene."""

import os
import pathlib
import threading
import time

import pytest

from codemark import model, sandbox
from conftest import load_py, require_gxx

BOX = sandbox.DEFAULT_SANDBOX


def run_py(source: str, limits=None) -> sandbox.SandboxResult:
    req = sandbox.SandboxRequest(
        language=model.PYTHON3, files={"student.py": source},
        phase=sandbox.PHASE_RUN, entry="student.py",
        limits=limits or model.ResourceLimits())
    return BOX.execute(req)


def test_hello_world():
    res = run_py('print("hello")\n')
    assert res.verdict == sandbox.VERDICT_OK
    assert res.stdout == "hello\n"
    assert res.exit_code == 0


def test_nonzero_exit():
    res = run_py("import sys\nsys.exit(3)\n")
    assert res.verdict == sandbox.VERDICT_NONZERO
    assert res.exit_code == 3


def test_stderr_captured():
    res = run_py("1 / 0\n")
    assert res.verdict == sandbox.VERDICT_NONZERO
    assert "ZeroDivisionError" in res.stderr


def test_timeout_enforced():
    limits = model.ResourceLimits(run_timeout=1.0)
    started = time.monotonic()
    res = run_py("import time\ntime.sleep(10)\n", limits)
    assert res.verdict == sandbox.VERDICT_TIMEOUT
    # 10x the limit must not elapse; limit + grace + overhead is the bound
    assert time.monotonic() - started < 5.0


def test_busy_loop_times_out():
    limits = model.ResourceLimits(run_timeout=1.0)
    res = run_py("while True:\n    pass\n", limits)
    assert res.verdict == sandbox.VERDICT_TIMEOUT


def test_memory_cap():
    limits = model.ResourceLimits(memory_cap=128 * 1024 * 1024)
    res = run_py("x = ' ' * (512 * 1024 * 1024)\nprint(len(x))\n", limits)
    assert res.verdict == sandbox.VERDICT_MEMORY
    assert "MemoryError" in res.stderr


def test_output_cap():
    cap = 8 * 1024
    limits = model.ResourceLimits(output_cap=cap)
    res = run_py("print('y' * 100000)\n", limits)
    assert res.verdict == sandbox.VERDICT_TRUNCATED
    assert len(res.stdout) <= cap
    assert res.stdout.endswith(sandbox.TRUNCATION_MARKER)


def test_python_syntax_check_rejects_missing_colon():
    res = BOX.syntax_check(model.PYTHON3, load_py("missing_colon"))
    assert res.verdict == sandbox.VERDICT_COMPILE_ERROR
    assert "line 2" in res.stderr
    assert "SyntaxError" in res.stderr


def test_python_syntax_check_allows_unbound_names():
    # unbound names are runtime errors, not syntax errors
    res = BOX.syntax_check(model.PYTHON3, load_py("uninitialized_counter"))
    assert res.verdict == sandbox.VERDICT_OK


def test_python_syntax_check_empty_source():
    assert BOX.syntax_check(model.PYTHON3, "").verdict == sandbox.VERDICT_OK


def test_syntax_check_never_executes(tmp_path):
    sentinel = tmp_path / "sentinel.txt"
    source = f"open({str(sentinel)!r}, 'w').write('ran')\n"
    res = BOX.syntax_check(model.PYTHON3, source)
    assert res.verdict == sandbox.VERDICT_OK
    assert not sentinel.exists()


def test_cpp_syntax_check():
    require_gxx()
    res = BOX.syntax_check(model.CPP14, "int main() { return 0; }\n")
    assert res.verdict == sandbox.VERDICT_OK
    bad = BOX.syntax_check(model.CPP14, "int main() { return 0 }\n")
    assert bad.verdict == sandbox.VERDICT_COMPILE_ERROR
    assert "error" in bad.stderr


def test_cpp_compile_then_run_shares_workspace(tmp_path):
    require_gxx()
    ws = str(tmp_path / "ws")
    os.makedirs(ws)
    src = '#include <cstdio>\nint main() { std::puts("from cpp"); return 0; }\n'
    compile_req = sandbox.SandboxRequest(
        language=model.CPP14, files={"prog.cpp": src},
        phase=sandbox.PHASE_COMPILE, entry="prog.cpp")
    assert BOX.execute(compile_req, workspace=ws).verdict == sandbox.VERDICT_OK
    run_req = sandbox.SandboxRequest(
        language=model.CPP14, files={"prog.cpp": src},
        phase=sandbox.PHASE_RUN, entry="prog.cpp")
    res = BOX.execute(run_req, workspace=ws)
    assert res.verdict == sandbox.VERDICT_OK
    assert res.stdout == "from cpp\n"


def test_concurrent_workspaces_are_distinct():
    # each run reports its own cwd; no two may collide
    src = "import os\nprint(os.getcwd())\n"
    results: list[sandbox.SandboxResult] = []
    lock = threading.Lock()

    def work():
        res = run_py(src)
        with lock:
            results.append(res)

    threads = [threading.Thread(target=work) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    paths = [r.stdout.strip() for r in results]
    assert all(r.verdict == sandbox.VERDICT_OK for r in results)
    assert len(set(paths)) == len(paths)


def test_workspace_cleaned_up():
    res = run_py("import os\nprint(os.getcwd())\n")
    workspace = pathlib.Path(res.stdout.strip())
    assert not workspace.exists()


def test_missing_toolchain_is_internal_error():
    box = sandbox.Sandbox(sandbox.ToolchainConfig(python_cmd="definitely-absent-python"))
    res = box.execute(sandbox.SandboxRequest(
        language=model.PYTHON3, files={"student.py": "print(1)\n"},
        phase=sandbox.PHASE_RUN, entry="student.py"))
    assert res.verdict == sandbox.VERDICT_INTERNAL
    with pytest.raises(sandbox.ToolchainError):
        box.validate_toolchain(model.PYTHON3)


def test_request_validation():
    with pytest.raises(ValueError):
        sandbox.SandboxRequest(language=model.PYTHON3, files={},
                               phase=sandbox.PHASE_RUN, entry="ghost.py")
    with pytest.raises(ValueError):
        sandbox.SandboxRequest(language=model.PYTHON3, files={"a.py": ""},
                               phase=sandbox.PHASE_COMPILE, entry="a.py")
