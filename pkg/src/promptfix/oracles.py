"""Syntax and semantic oracles backed by a real Python interpreter."""

from __future__ import annotations

import functools
import os
import re
import shutil
import subprocess
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .assignment import TestCase

PASS = "pass"
WRONG_OUTPUT = "wrong-output"
RUNTIME_EXCEPTION = "runtime-exception"
TIMEOUT = "timeout"

DEFAULT_TIMEOUT = 10.0

# Environment variable naming the student-language interpreter.
INTERPRETER_ENV = "PROMPTFIX_PYTHON"

# Compiles stdin without executing it; an uncaught SyntaxError produces the
# interpreter's standard traceback on stderr.
_COMPILE_SCRIPT = (
    "import sys\n"
    "src = sys.stdin.buffer.read().decode('utf-8', 'replace')\n"
    "compile(src, '<unknown>', 'exec', dont_inherit=True)\n"
)

_HEADER_RE = re.compile(r'^\s*File "<unknown>", line (\d+)')
_MESSAGE_RE = re.compile(r"^(\w*(?:Error|Warning))(?::\s?(.*))?$")


class InterpreterNotFound(EnvironmentError):
    """The configured interpreter executable does not exist."""


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: Optional[int]
    kind: str
    message: str
    raw: str


@dataclass(frozen=True)
class TestVector:
    """Per-test failure flags; ``True`` means the test failed."""

    __test__ = False
    failures: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.failures)

    @property
    def all_pass(self) -> bool:
        return not any(self.failures)

    @classmethod
    def of(cls, flags: Sequence[bool]) -> "TestVector":
        return cls(tuple(bool(f) for f in flags))


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False
    status: str
    actual_output: str
    stderr: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass(frozen=True)
class TestReport:
    __test__ = False
    vector: TestVector
    per_test: tuple[TestOutcome, ...]

    @property
    def all_pass(self) -> bool:
        return self.vector.all_pass

    def first_failure(self) -> Optional[int]:
        for i, failed in enumerate(self.vector.failures):
            if failed:
                return i
        return None


def resolve_interpreter(interpreter: Optional[str] = None) -> str:
    exe = interpreter or os.environ.get(INTERPRETER_ENV) or sys.executable
    if os.path.sep in exe:
        if not (os.path.isfile(exe) and os.access(exe, os.X_OK)):
            raise InterpreterNotFound(f"interpreter not found: {exe}")
        return exe
    found = shutil.which(exe)
    if found is None:
        raise InterpreterNotFound(f"interpreter not found: {exe}")
    return found


def normalize(output: str) -> str:
    """Strip trailing whitespace per line and trailing blank lines."""
    lines = [line.rstrip() for line in output.split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def _kind_of(exc_name: str) -> str:
    base = exc_name[:-5] if exc_name.endswith("Error") else exc_name
    words = re.findall(r"[A-Z][a-z0-9]*|[a-z0-9]+", base)
    return "-".join(w.lower() for w in words) + "-error"


def parse_diagnostic(stderr: str, source: str) -> Optional[Diagnostic]:
    """Parse the last ``File "<unknown>", line N`` block of a traceback."""
    lines = stderr.rstrip("\n").split("\n")
    header = None
    for i, text in enumerate(lines):
        if _HEADER_RE.match(text):
            header = i
    if header is None:
        return None
    lineno = int(_HEADER_RE.match(lines[header]).group(1))
    block = lines[header:]
    message_idx = None
    for j in range(len(block) - 1, 0, -1):
        if _MESSAGE_RE.match(block[j]):
            message_idx = j
            break
    if message_idx is None:
        return None
    m = _MESSAGE_RE.match(block[message_idx])
    exc_name, message = m.group(1), (m.group(2) or "")
    body = block[1:message_idx]

    src_lines = source.split("\n")
    column = None
    if len(body) >= 2 and body[1].strip() and set(body[1].strip()) <= {"^", "~"}:
        # the echoed line is stripped of its own indentation; add it back
        echoed = body[0]
        offset = body[1].index("^") - (len(echoed) - len(echoed.lstrip()))
        if 1 <= lineno <= len(src_lines):
            original = src_lines[lineno - 1]
            offset += len(original) - len(original.lstrip())
        column = offset + 1

    raw = "\n".join([lines[header].strip()] + [_shift(t) for t in body] + [block[message_idx]])
    return Diagnostic(
        line=max(1, min(lineno, len(src_lines) + 1)),
        column=column,
        kind=_kind_of(exc_name),
        message=message,
        raw=raw,
    )


def _shift(text: str) -> str:
    return text[2:] if text.startswith("  ") else text


@functools.lru_cache(maxsize=4096)
def _check_syntax_cached(source: str, exe: str) -> tuple[Diagnostic, ...]:
    proc = subprocess.run(
        [exe, "-I", "-c", _COMPILE_SCRIPT],
        input=source.encode("utf-8"),
        capture_output=True,
    )
    if proc.returncode == 0:
        return ()
    stderr = proc.stderr.decode("utf-8", "replace")
    diag = parse_diagnostic(stderr, source)
    if diag is None:
        # e.g. ValueError for NUL bytes; still a rejection
        last = stderr.strip().split("\n")[-1] if stderr.strip() else "compile failed"
        diag = Diagnostic(line=1, column=None, kind="syntax-error", message=last, raw=last)
    return (diag,)


def check_syntax(source: str, interpreter: Optional[str] = None) -> list[Diagnostic]:
    """Return ``[]`` when the interpreter accepts ``source``, else the first diagnostic."""
    return list(_check_syntax_cached(source, resolve_interpreter(interpreter)))


def is_valid_syntax(source: str, interpreter: Optional[str] = None) -> bool:
    return not check_syntax(source, interpreter)


def _run_one(exe: str, program: Path, case: TestCase, timeout: float) -> TestOutcome:
    with tempfile.TemporaryDirectory(prefix="promptfix-run-") as workdir:
        try:
            proc = subprocess.run(
                [exe, "-I", str(program)],
                input=case.input.encode("utf-8"),
                capture_output=True,
                cwd=workdir,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired as exc:
            out = (exc.stdout or b"").decode("utf-8", "replace")
            return TestOutcome(TIMEOUT, out, "timed out")
    stdout = proc.stdout.decode("utf-8", "replace")
    stderr = proc.stderr.decode("utf-8", "replace")
    if proc.returncode != 0:
        return TestOutcome(RUNTIME_EXCEPTION, stdout, stderr)
    if normalize(stdout) == normalize(case.expected_output):
        return TestOutcome(PASS, stdout, stderr)
    return TestOutcome(WRONG_OUTPUT, stdout, stderr)


def run_tests(
    source: str,
    tests: Sequence[TestCase],
    timeout: float = DEFAULT_TIMEOUT,
    interpreter: Optional[str] = None,
    workers: int = 1,
) -> TestReport:
    """Run ``source`` once per test case, feeding the input on stdin."""
    exe = resolve_interpreter(interpreter)
    with tempfile.TemporaryDirectory(prefix="promptfix-src-") as srcdir:
        program = Path(srcdir) / "program.py"
        program.write_text(source, encoding="utf-8")
        if workers > 1 and len(tests) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(lambda c: _run_one(exe, program, c, timeout), tests))
        else:
            outcomes = [_run_one(exe, program, c, timeout) for c in tests]
    vector = TestVector.of([not o.passed for o in outcomes])
    return TestReport(vector=vector, per_test=tuple(outcomes))


def failure_summary(report: TestReport, tests: Sequence[TestCase]) -> Optional[str]:
    """Compact description of the first failing test, or None if all pass."""
    idx = report.first_failure()
    if idx is None:
        return None
    case, outcome = tests[idx], report.per_test[idx]
    parts = ["#input:", case.input.rstrip("\n"), "#expected output:", normalize(case.expected_output)]
    if outcome.status == TIMEOUT:
        parts += ["#error:", "program timed out"]
    elif outcome.status == RUNTIME_EXCEPTION:
        err = [l for l in outcome.stderr.strip().split("\n") if l.strip()]
        parts += ["#error:", err[-1] if err else "nonzero exit status"]
    else:
        parts += ["#actual output:", normalize(outcome.actual_output)]
    return "\n".join(parts)
