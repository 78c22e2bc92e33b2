"""Indentation-based slicing of the code around a syntax error.

The chunk is a cheap stand-in for a basic block: the contiguous run of lines
at or deeper than the error line's indentation, widened once more when it
starts on a control-flow header.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .oracles import Diagnostic

TAB_WIDTH = 8

CONTROL_FLOW_KEYWORDS = ("if", "elif", "else", "for", "while", "try", "except", "finally", "with", "def")
_CF_RE = re.compile(r"(?:%s)\b" % "|".join(CONTROL_FLOW_KEYWORDS))


@dataclass(frozen=True)
class Chunk:
    start: int
    end: int
    lines: tuple[str, ...]

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


def split_lines(source: str) -> tuple[list[str], bool]:
    """Split on newlines; the second item records a trailing newline."""
    lines = source.split("\n")
    trailing = len(lines) > 1 and lines[-1] == ""
    if trailing:
        lines.pop()
    return lines, trailing


def join_lines(lines: list[str], trailing: bool) -> str:
    return "\n".join(lines) + ("\n" if trailing else "")


def _blank(line: str) -> bool:
    return not line.strip()


def locate_error(source: str, diag: Diagnostic) -> tuple[list[str], int]:
    lines, _ = split_lines(source)
    return lines, max(0, min(diag.line - 1, len(lines) - 1))


def indentation_level(lines: list[str], idx: int, tab_width: int = TAB_WIDTH) -> int:
    expanded = lines[idx].expandtabs(tab_width)
    return len(expanded) - len(expanded.lstrip(" \t\f"))


def slice_biway(lines: list[str], idx: int, level: int, tab_width: int = TAB_WIDTH) -> tuple[int, int]:
    """Widest contiguous range around ``idx`` whose code lines are indented >= ``level``."""

    def fits(i: int) -> bool:
        return _blank(lines[i]) or indentation_level(lines, i, tab_width) >= level

    start = idx
    while start > 0 and fits(start - 1):
        start -= 1
    end = idx + 1
    while end < len(lines) and fits(end):
        end += 1
    # blank lines may sit inside the range but never at its edges
    while start < idx and _blank(lines[start]):
        start += 1
    while end - 1 > idx and _blank(lines[end - 1]):
        end -= 1
    return start, end


def starts_control_flow(line: str) -> bool:
    return _CF_RE.match(line.lstrip()) is not None


def chunk(source: str, diag: Diagnostic, tab_width: int = TAB_WIDTH) -> Chunk:
    lines, error_line = locate_error(source, diag)
    level = indentation_level(lines, error_line, tab_width)
    start, end = slice_biway(lines, error_line, level, tab_width)
    if starts_control_flow(lines[start]):
        level = indentation_level(lines, start, tab_width)
        s2, e2 = slice_biway(lines, start, level, tab_width)
        # a header deeper than the error line would slice the error away
        if s2 <= error_line < e2:
            start, end = s2, e2
    return Chunk(start, end, tuple(lines[start:end]))


def whole_program(source: str) -> Chunk:
    """The degenerate chunk covering every line (chunking disabled)."""
    lines, _ = split_lines(source)
    return Chunk(0, len(lines), tuple(lines))


def merge_chunk(source: str, chunk: Chunk, replacement: str) -> str:
    lines, trailing = split_lines(source)
    merged = lines[: chunk.start] + replacement.split("\n") + lines[chunk.end :]
    return join_lines(merged, trailing)
