"""Peer-history example bank and test-vector similarity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .assignment import Assignment
from .oracles import DEFAULT_TIMEOUT, TestVector, is_valid_syntax, run_tests
from .prompts import ExamplePair
from .tokens import token_edit_distance


@dataclass(frozen=True)
class BankEntry:
    pair: ExamplePair
    vector: TestVector
    student: str
    ordinal: int

    def __post_init__(self):
        if self.vector.all_pass:
            raise ValueError("bank entries need a failing incorrect program")


def similarity(a: TestVector, b: TestVector) -> float:
    """One minus the normalized Hamming distance between failure vectors."""
    if len(a) != len(b):
        raise ValueError(f"test vectors differ in length: {len(a)} != {len(b)}")
    if not len(a):
        return 1.0
    differing = sum(x != y for x, y in zip(a.failures, b.failures))
    # one division, so the result is the correctly rounded exact ratio
    return (len(a) - differing) / len(a)


def build_bank(
    assignment: Assignment,
    timeout: float = DEFAULT_TIMEOUT,
    interpreter: Optional[str] = None,
) -> list[BankEntry]:
    """Pair each failing, compilable version with the student's first passing one."""
    bank = []
    for student in sorted(assignment.histories):
        versions = assignment.histories[student]
        earlier = []
        for version in versions:
            if not is_valid_syntax(version.source, interpreter):
                continue
            report = run_tests(version.source, assignment.tests, timeout=timeout, interpreter=interpreter)
            if report.all_pass:
                for prior, vector in earlier:
                    if prior.source != version.source:
                        bank.append(
                            BankEntry(ExamplePair(prior.source, version.source), vector, student, prior.ordinal)
                        )
                break
            earlier.append((version, report.vector))
    return bank


def select_shots(
    bank: Sequence[BankEntry],
    target: TestVector,
    k: int = 3,
    exclude_student: Optional[str] = None,
    exclude_program: Optional[str] = None,
) -> list[ExamplePair]:
    """Top-``k`` most similar pairs, at most one per peer student.

    Ties go to the smaller patch, then to the lexicographically smaller student.
    """
    ranked = []
    for e in bank:
        if e.student == exclude_student or e.pair.incorrect == exclude_program:
            continue
        key = (-similarity(e.vector, target), token_edit_distance(e.pair.incorrect, e.pair.correct), e.student, e.ordinal)
        ranked.append((key, e))
    ranked.sort(key=lambda t: t[0])
    chosen, seen = [], set()
    for _, e in ranked:
        if e.student in seen:
            continue
        seen.add(e.student)
        chosen.append(e.pair)
        if len(chosen) == k:
            break
    return chosen
