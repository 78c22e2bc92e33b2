from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from promptfix.chunker import (
    Chunk,
    chunk,
    indentation_level,
    locate_error,
    merge_chunk,
    slice_biway,
    starts_control_flow,
    whole_program,
)
from promptfix.oracles import Diagnostic


def diag(line: int) -> Diagnostic:
    return Diagnostic(line=line, column=None, kind="syntax-error", message="", raw="")


# (source lines, 1-based error line, traced (start, end))
TRACED = [
    # unindented while body: both lines
    (["while (n > 0):", "a = n"], 2, (0, 2)),
    # if/else missing colon on the else: the whole if/else body of f
    (["def f(a):", "  if a > 0:", "    return 1", "  else", "    return 0"], 4, (1, 5)),
    # interior block: only the if and its body
    (["n = int(input())", "s = 0", "for i in range(n):", "  if i % 2 == 0", "    s += i", "print(s)"], 4, (3, 5)),
    # top-level error: the whole file
    (["x = 1", "if x = 1:", "    pass", "y = 2"], 2, (0, 4)),
    # error deep in a loop body; the run stops at the shallower header
    (["while n > 0:", "    d = n % 10", "    n = n / 10", "    if n == 0", "        break", "print(d)"], 4, (1, 5)),
    # error on a header's body line whose run starts at an elif: re-slice at the elif level
    (["if a:", "  x = 1", "elif b:", "  y = (", "else:", "  z = 3"], 4, (3, 4)),
    # deeper header than the error line would drop the error, so the first slice stays
    (["for i in x:", "    if i:", "        pass", "    print(i"], 4, (1, 4)),
    # blank lines inside a range are kept, at its edges they are trimmed
    (["x = 0", "", "def g():", "    a = 1", "", "    b = (", "", "c = 2"], 6, (3, 6)),
]


@pytest.mark.parametrize("lines,line,expected", TRACED)
def test_traced_chunks(lines, line, expected):
    c = chunk("\n".join(lines) + "\n", diag(line))
    assert (c.start, c.end) == expected
    assert c.lines == tuple(lines[expected[0] : expected[1]])


def test_locate_error_clamps():
    assert locate_error("while (n > 0):\na = n\n", diag(2))[1] == 1
    assert locate_error("a\nb\n", diag(3))[1] == 1
    assert locate_error("a", diag(1))[1] == 0


def test_indentation_levels():
    assert indentation_level(["a = n"], 0) == 0
    assert indentation_level(["  s += i"], 0) == 2
    assert indentation_level(["\tx=1"], 0) == 8


def test_slice_biway_examples():
    lines = ["for i in range(n):", "  if i % 2 == 0", "    s += i", "print(s)"]
    assert slice_biway(lines, 1, 2) == (1, 3)
    assert slice_biway(lines, 0, 0) == (0, 4)
    assert slice_biway(["  a", "b"], 1, 0) == (0, 2)
    assert slice_biway(["a", "  b"], 1, 2) == (1, 2)


def test_control_flow_detection_is_word_bounded():
    assert starts_control_flow("  elif x:")
    assert starts_control_flow("else:")
    assert not starts_control_flow("iffy = 1")
    assert not starts_control_flow("format(x)")


def test_merge_swaps_lines():
    src = "a\nb\nc\nd\n"
    assert merge_chunk(src, Chunk(1, 3, ("b", "c")), "c\nb") == "a\nc\nb\nd\n"


def test_merge_identity_and_growth():
    src = "a\nb\nc\nd\n"
    c = Chunk(1, 3, ("b", "c"))
    assert merge_chunk(src, c, c.text) == src
    assert merge_chunk(src, c, "b\nb2\nc").count("\n") == 5


def test_whole_program_covers_everything():
    c = whole_program("a\nb\n")
    assert (c.start, c.end, c.lines) == (0, 2, ("a", "b"))


code_line = st.tuples(st.integers(0, 3), st.sampled_from(["x = 1", "if x:", "else:", "while y", "elif z:", "", "print(x"]))


@st.composite
def programs(draw):
    body = draw(st.lists(code_line, min_size=1, max_size=15))
    lines = [" " * (4 * d) + text if text else "" for d, text in body]
    trailing = draw(st.booleans())
    source = "\n".join(lines) + ("\n" if trailing else "")
    lines = source.split("\n")
    if len(lines) > 1 and lines[-1] == "":
        lines.pop()
    line = draw(st.integers(1, len(lines) + 1))
    return source, lines, line


@settings(max_examples=500, deadline=None)
@given(programs())
def test_chunk_contains_error_and_merges_back(case):
    source, lines, line = case
    c = chunk(source, diag(line))
    err = min(line - 1, len(lines) - 1)
    assert c.start <= err < c.end
    assert list(c.lines) == lines[c.start : c.end]
    assert merge_chunk(source, c, c.text) == source
