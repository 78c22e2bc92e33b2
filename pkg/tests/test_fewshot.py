from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from promptfix.assignment import Assignment, ProgramVersion, TestCase
from promptfix.fewshot import BankEntry, build_bank, select_shots, similarity
from promptfix.oracles import TestVector
from promptfix.prompts import ExamplePair
from reference_impls import exact_similarity

V = TestVector.of

ADD = Assignment(
    "add",
    "Read two integers on separate lines and print their sum.",
    (TestCase("1\n2\n", "3"), TestCase("5\n5\n", "10")),
)
GOOD = "print(int(input()) + int(input()))\n"
FAILS_SECOND = "a = int(input())\nb = int(input())\nprint(3 if a == 1 else a * b)\n"


def test_similarity_examples():
    assert similarity(V([False, True]), V([False, True])) == 1.0
    assert similarity(V([True, False, True]), V([False, True, False])) == 0.0
    assert similarity(V([True, True, False, False]), V([True, True, False, True])) == 0.75


def test_similarity_length_mismatch():
    with pytest.raises(ValueError):
        similarity(V([True]), V([True, False]))


vectors = st.integers(0, 10).flatmap(
    lambda n: st.tuples(st.lists(st.booleans(), min_size=n, max_size=n), st.lists(st.booleans(), min_size=n, max_size=n))
)


@given(vectors, st.randoms())
def test_similarity_properties(pair, rnd):
    a, b = pair
    s = similarity(V(a), V(b))
    assert s == float(exact_similarity(a, b))
    assert 0.0 <= s <= 1.0
    assert s == similarity(V(b), V(a))
    assert similarity(V(a), V(a)) == 1.0
    order = list(range(len(a)))
    rnd.shuffle(order)
    assert similarity(V([a[i] for i in order]), V([b[i] for i in order])) == s


def test_bank_minimal_history():
    a = Assignment(ADD.id, ADD.description, ADD.tests, histories={"s1": (ProgramVersion(FAILS_SECOND, 0), ProgramVersion(GOOD, 1))})
    (entry,) = build_bank(a)
    assert entry.pair == ExamplePair(FAILS_SECOND, GOOD)
    assert entry.vector == V([False, True])
    assert (entry.student, entry.ordinal) == ("s1", 0)


def test_bank_skips_histories_without_passing_version():
    a = Assignment(ADD.id, ADD.description, ADD.tests, histories={"s1": (ProgramVersion(FAILS_SECOND, 0),)})
    assert build_bank(a) == []


def test_bank_excludes_syntax_invalid_versions():
    history = (ProgramVersion("print(int(input()) +\n", 0), ProgramVersion(FAILS_SECOND, 1), ProgramVersion(GOOD, 2))
    a = Assignment(ADD.id, ADD.description, ADD.tests, histories={"s1": history})
    (entry,) = build_bank(a)
    assert entry.pair == ExamplePair(FAILS_SECOND, GOOD)


def test_bank_uses_earliest_passing_version():
    good2 = "x = int(input())\ny = int(input())\nprint(x + y)\n"
    history = (ProgramVersion(FAILS_SECOND, 0), ProgramVersion(GOOD, 1), ProgramVersion(good2, 2))
    a = Assignment(ADD.id, ADD.description, ADD.tests, histories={"s1": history})
    assert [e.pair.correct for e in build_bank(a)] == [GOOD]


def test_entry_invariant():
    with pytest.raises(ValueError):
        BankEntry(ExamplePair("a", "b"), V([False]), "s", 0)


def _entry(student, vector, incorrect="x = 1\n", correct="x = 2\n"):
    return BankEntry(ExamplePair(incorrect, correct), V(vector), student, 0)


def test_select_single_entry_regardless_of_similarity():
    e = _entry("s1", [False, True])
    assert select_shots([e], V([True, False]), k=3) == [e.pair]


def test_select_empty_bank():
    assert select_shots([], V([True])) == []


def test_select_top_three_with_tie_break():
    target = V([True, True, False, False])
    best = _entry("s9", [True, True, False, False])
    half_big = _entry("s1", [True, False, False, True], "y = 1\nz = 2\n", "y = 3\nz = 4\n")  # TED 2
    half_small = _entry("s2", [False, True, True, False], "w = 1\n", "w = 2\n")  # TED 1
    none = _entry("s0", [False, False, True, True])
    chosen = select_shots([none, half_big, best, half_small], target, k=3)
    assert chosen == [best.pair, half_small.pair, half_big.pair]


def test_select_student_tie_break_and_one_per_student():
    target = V([True, False])
    a = _entry("s2", [True, False])
    b = _entry("s1", [True, False], "q = 1\n", "q = 2\n")
    c = _entry("s1", [True, False], "r = 1\n", "r = 2\n")
    assert select_shots([a, b, c], target, k=3) == [b.pair, a.pair]


def test_select_exclusions():
    target = V([True])
    own = _entry("me", [True], "p = 1\n", "p = 2\n")
    same_program = _entry("peer", [True], "target = 0\n", "target = 1\n")
    other = _entry("other", [True])
    shots = select_shots([own, same_program, other], target, exclude_student="me", exclude_program="target = 0\n")
    assert shots == [other.pair]
