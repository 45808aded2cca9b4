"""Isolated execution of untrusted submissions.

Each execution runs in a child process inside a fresh temporary workspace
with rlimit-based caps: CPU seconds, address space, and per-file output
size (stdout and stderr are redirected to files so RLIMIT_FSIZE bounds
them).  A wall-clock timeout backs up the CPU limit; on expiry the whole
process group is killed.  This is desk-scale isolation, not a jail: a
container or VM can be layered outside without changing the contract.

Compilation phases are trusted-toolchain work, so the student memory cap
is not applied to them (a generous fixed cap is, to protect the host).
"""

from __future__ import annotations

import dataclasses
import os
import resource
import shutil
import signal
import subprocess
import tempfile
import threading
import time

from .model import CPP14, LANGUAGES, PYTHON3, ResourceLimits

PHASE_SYNTAX = "syntax_check"
PHASE_COMPILE = "compile"
PHASE_RUN = "run"
PHASES = (PHASE_SYNTAX, PHASE_COMPILE, PHASE_RUN)

VERDICT_OK = "ok"
VERDICT_NONZERO = "nonzero_exit"
VERDICT_TIMEOUT = "timeout"
VERDICT_MEMORY = "memory_exceeded"
VERDICT_TRUNCATED = "output_truncated"
VERDICT_COMPILE_ERROR = "compile_error"
VERDICT_INTERNAL = "internal_error"

TRUNCATION_MARKER = "\n...[output truncated]\n"

#: name of the binary produced by a cpp14 compile phase
CPP_BINARY = "cr_prog"

# stderr fragments that identify an out-of-memory death
_MEMORY_SIGNS = ("MemoryError", "bad_alloc", "Cannot allocate memory",
                 "out of memory")

# address-space cap for compiler invocations; protects the host, not the
# student budget
_COMPILE_AS_CAP = 4 * 1024 * 1024 * 1024


@dataclasses.dataclass(frozen=True)
class SandboxRequest:
    language: str
    files: dict[str, str]
    phase: str
    entry: str
    limits: ResourceLimits = dataclasses.field(default_factory=ResourceLimits)

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise ValueError(f"unknown language {self.language!r}")
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        if self.entry not in self.files:
            raise ValueError(f"entry {self.entry!r} not among files")
        if self.language == PYTHON3 and self.phase == PHASE_COMPILE:
            raise ValueError("python3 has no separate compile phase")


@dataclasses.dataclass(frozen=True)
class SandboxResult:
    verdict: str
    stdout: str
    stderr: str
    exit_code: int | None
    wall_time: float

    @property
    def ok(self) -> bool:
        return self.verdict == VERDICT_OK


@dataclasses.dataclass(frozen=True)
class ToolchainConfig:
    python_cmd: str = "python3"
    cxx_cmd: str = "g++"
    cxx_flags: tuple[str, ...] = ("-std=c++14", "-Wall")
    pool_size: int = 4
    temp_root: str | None = None


class ToolchainError(RuntimeError):
    """A required interpreter or compiler is not available."""


class Sandbox:
    """Reentrant executor; a bounded semaphore caps concurrent children."""

    def __init__(self, config: ToolchainConfig | None = None):
        self.config = config or ToolchainConfig()
        if self.config.pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        self._pool = threading.BoundedSemaphore(self.config.pool_size)

    # -- public API ---------------------------------------------------------

    def validate_toolchain(self, language: str) -> None:
        """Fail fast when the needed tool is missing from PATH."""
        cmd = self.config.python_cmd if language == PYTHON3 else self.config.cxx_cmd
        if shutil.which(cmd) is None:
            raise ToolchainError(f"{cmd} not found for {language}")

    def execute(self, req: SandboxRequest, workspace: str | None = None) -> SandboxResult:
        """Run one phase.  With an explicit workspace, artifacts persist
        there between phases (cpp compile then run); otherwise a fresh
        temp directory is created and removed."""
        with self._pool:
            if workspace is None:
                tmp = tempfile.mkdtemp(prefix="cm-", dir=self.config.temp_root)
                try:
                    return self._execute_in(req, tmp)
                finally:
                    shutil.rmtree(tmp, ignore_errors=True)
            return self._execute_in(req, workspace)

    def syntax_check(self, language: str, source: str,
                     limits: ResourceLimits | None = None) -> SandboxResult:
        entry = "student.py" if language == PYTHON3 else "student.cpp"
        req = SandboxRequest(language=language, files={entry: source},
                             phase=PHASE_SYNTAX, entry=entry,
                             limits=limits or ResourceLimits())
        return self.execute(req)

    # -- internals ----------------------------------------------------------

    def _argv(self, req: SandboxRequest) -> list[str]:
        cfg = self.config
        if req.language == PYTHON3:
            if req.phase == PHASE_SYNTAX:
                # parses and byte-compiles without executing a statement
                return [cfg.python_cmd, "-m", "py_compile", req.entry]
            return [cfg.python_cmd, req.entry]
        if req.phase == PHASE_SYNTAX:
            obj = req.entry + ".o"
            return [cfg.cxx_cmd, *cfg.cxx_flags, "-c", req.entry, "-o", obj]
        if req.phase == PHASE_COMPILE:
            return [cfg.cxx_cmd, *cfg.cxx_flags, req.entry, "-o", CPP_BINARY]
        return [os.path.join(".", CPP_BINARY)]

    def _execute_in(self, req: SandboxRequest, workspace: str) -> SandboxResult:
        limits = req.limits
        compiling = req.phase in (PHASE_SYNTAX, PHASE_COMPILE)
        timeout = limits.compile_timeout if compiling else limits.run_timeout
        memory_cap = _COMPILE_AS_CAP if compiling else limits.memory_cap
        output_cap = limits.output_cap

        for name, text in req.files.items():
            path = os.path.join(workspace, name)
            with open(path, "w") as fh:
                fh.write(text)

        out_path = os.path.join(workspace, "_cr_stdout")
        err_path = os.path.join(workspace, "_cr_stderr")

        # compilers legitimately write object files and bytecode bigger
        # than the student output budget; cap files hard only when running
        fsize_cap = output_cap if req.phase == PHASE_RUN else max(
            output_cap, 64 * 1024 * 1024)

        def set_limits():
            cpu = max(1, int(timeout) + 1)
            resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu + 1))
            resource.setrlimit(resource.RLIMIT_AS, (memory_cap, memory_cap))
            resource.setrlimit(resource.RLIMIT_FSIZE, (fsize_cap, fsize_cap))
            resource.setrlimit(resource.RLIMIT_CORE, (0, 0))

        argv = self._argv(req)
        started = time.monotonic()
        try:
            with open(out_path, "wb") as out_fh, open(err_path, "wb") as err_fh:
                proc = subprocess.Popen(
                    argv, cwd=workspace,
                    stdin=subprocess.DEVNULL, stdout=out_fh, stderr=err_fh,
                    preexec_fn=set_limits, start_new_session=True)
                try:
                    proc.wait(timeout=timeout + 1.0)
                    timed_out = False
                except subprocess.TimeoutExpired:
                    timed_out = True
                    self._kill_group(proc)
        except FileNotFoundError as exc:
            return SandboxResult(VERDICT_INTERNAL, "", f"toolchain missing: {exc}",
                                 None, time.monotonic() - started)
        except OSError as exc:
            return SandboxResult(VERDICT_INTERNAL, "", f"sandbox failure: {exc}",
                                 None, time.monotonic() - started)
        wall = time.monotonic() - started

        stdout, out_trunc = _read_capped(out_path, output_cap)
        stderr, err_trunc = _read_capped(err_path, output_cap)
        rc = proc.returncode
        verdict = self._verdict(req.phase, rc, timed_out, stderr,
                                out_trunc or err_trunc)
        return SandboxResult(verdict, stdout, stderr, rc, wall)

    @staticmethod
    def _kill_group(proc: subprocess.Popen) -> None:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        proc.wait()

    @staticmethod
    def _verdict(phase: str, rc: int, timed_out: bool, stderr: str,
                 truncated: bool) -> str:
        if timed_out or rc == -signal.SIGXCPU:
            return VERDICT_TIMEOUT
        if rc != 0 and any(sign in stderr for sign in _MEMORY_SIGNS):
            return VERDICT_MEMORY
        if phase == PHASE_RUN and (rc == -signal.SIGXFSZ or (truncated and rc != 0)):
            return VERDICT_TRUNCATED
        if rc == 0:
            return VERDICT_OK
        if phase in (PHASE_SYNTAX, PHASE_COMPILE):
            return VERDICT_COMPILE_ERROR
        return VERDICT_NONZERO


def _read_capped(path: str, cap: int) -> tuple[str, bool]:
    """Read at most cap bytes; when the file filled the cap, stamp the
    truncation marker over the tail so the returned length stays <= cap."""
    try:
        size = os.path.getsize(path)
        with open(path, "rb") as fh:
            data = fh.read(cap)
    except OSError:
        return "", False
    text = data.decode("utf-8", errors="replace")
    if size >= cap:
        keep = max(0, cap - len(TRUNCATION_MARKER))
        return text[:keep] + TRUNCATION_MARKER, True
    return text, False


#: process-wide default; most callers share one pool
DEFAULT_SANDBOX = Sandbox()
