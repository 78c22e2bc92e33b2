"""On-disk assignment layout: description, tests, reference and peer histories.

Layout::

    <assignment>/
        description.txt
        reference.py            (optional)
        tests/<stem>.in
        tests/<stem>.out
        history/<student>/v00.py, v01.py, ...
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

PathLike = Union[str, Path]

_ORDINAL_RE = re.compile(r"(\d+)\.py$")


class AssignmentError(ValueError):
    """The directory does not match the assignment layout."""


@dataclass(frozen=True)
class TestCase:
    input: str
    expected_output: str

    # not a pytest test class despite the name
    __test__ = False


@dataclass(frozen=True)
class ProgramVersion:
    source: str
    ordinal: int


@dataclass(frozen=True)
class Assignment:
    id: str
    description: str
    tests: tuple[TestCase, ...]
    reference_solution: Optional[str] = None
    histories: dict[str, tuple[ProgramVersion, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tests:
            raise AssignmentError(f"{self.id}: empty test suite")
        for student, versions in self.histories.items():
            ordinals = [v.ordinal for v in versions]
            if any(a >= b for a, b in zip(ordinals, ordinals[1:])):
                raise AssignmentError(f"{self.id}: history of {student} is not in ascending order")


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def load_tests(tests_dir: Path) -> tuple[TestCase, ...]:
    from .oracles import normalize

    if not tests_dir.is_dir():
        return ()
    inputs = {p.stem: p for p in tests_dir.glob("*.in")}
    outputs = {p.stem: p for p in tests_dir.glob("*.out")}
    unpaired = sorted(set(inputs) ^ set(outputs))
    if unpaired:
        raise AssignmentError(f"unpaired test file: {unpaired[0]}")
    return tuple(
        TestCase(input=_read(inputs[stem]), expected_output=normalize(_read(outputs[stem])))
        for stem in sorted(inputs)
    )


def load_history(student_dir: Path) -> tuple[ProgramVersion, ...]:
    versions = []
    for path in student_dir.glob("*.py"):
        m = _ORDINAL_RE.search(path.name)
        if m is None:
            raise AssignmentError(f"history file without numeric suffix: {path}")
        versions.append(ProgramVersion(source=_read(path), ordinal=int(m.group(1))))
    versions.sort(key=lambda v: v.ordinal)
    return tuple(versions)


def load_assignment(path: PathLike) -> Assignment:
    root = Path(path)
    if not root.is_dir():
        raise AssignmentError(f"not an assignment directory: {root}")
    desc_path = root / "description.txt"
    if not desc_path.is_file():
        raise AssignmentError(f"{root.name}: missing description.txt")
    tests = load_tests(root / "tests")
    if not tests:
        raise AssignmentError(f"{root.name}: empty test suite")
    ref_path = root / "reference.py"
    reference = _read(ref_path) if ref_path.is_file() else None
    histories = {}
    hist_root = root / "history"
    if hist_root.is_dir():
        for student_dir in sorted(p for p in hist_root.iterdir() if p.is_dir()):
            versions = load_history(student_dir)
            if versions:
                histories[student_dir.name] = versions
    return Assignment(
        id=root.name,
        description=_read(desc_path),
        tests=tests,
        reference_solution=reference,
        histories=histories,
    )


def write_assignment(assignment: Assignment, path: PathLike) -> Path:
    """Write ``assignment`` in the on-disk layout understood by :func:`load_assignment`."""
    root = Path(path)
    (root / "tests").mkdir(parents=True, exist_ok=True)
    (root / "description.txt").write_text(assignment.description, encoding="utf-8")
    if assignment.reference_solution is not None:
        (root / "reference.py").write_text(assignment.reference_solution, encoding="utf-8")
    width = max(2, len(str(len(assignment.tests))))
    for i, case in enumerate(assignment.tests, start=1):
        stem = f"t{i:0{width}d}"
        (root / "tests" / f"{stem}.in").write_text(case.input, encoding="utf-8")
        (root / "tests" / f"{stem}.out").write_text(case.expected_output, encoding="utf-8")
    for student, versions in assignment.histories.items():
        sdir = root / "history" / student
        sdir.mkdir(parents=True, exist_ok=True)
        for v in versions:
            (sdir / f"v{v.ordinal:02d}.py").write_text(v.source, encoding="utf-8")
    return root


def validate(assignment: Assignment, timeout: float = 10.0, interpreter: Optional[str] = None) -> list[str]:
    """Return human-readable warnings; never raises for content problems."""
    from .oracles import check_syntax, run_tests

    warnings = []
    if not assignment.histories:
        warnings.append("few-shot unavailable: assignment has no student histories")
    seen: dict[str, int] = {}
    for i, case in enumerate(assignment.tests):
        if case.input in seen:
            warnings.append(f"duplicate test: test {i} repeats the input of test {seen[case.input]}")
        else:
            seen[case.input] = i
    ref = assignment.reference_solution
    if ref is not None:
        diags = check_syntax(ref, interpreter)
        if diags:
            warnings.append(f"reference solution does not compile: line {diags[0].line}: {diags[0].message}")
        else:
            report = run_tests(ref, assignment.tests, timeout=timeout, interpreter=interpreter)
            failed = [i for i, f in enumerate(report.vector.failures) if f]
            if failed:
                warnings.append(f"reference solution fails its own tests: {failed}")
    return warnings
