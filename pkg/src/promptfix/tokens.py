"""Error-tolerant Python lexer and token-level edit distance."""

from __future__ import annotations

import keyword
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

NAME = "name"
NUMBER = "number"
STRING = "text-literal"
OPERATOR = "operator"
PUNCT = "punctuation"
KEYWORD = "keyword"
COMMENT = "comment"
NEWLINE = "newline"
INDENT = "indent"
DEDENT = "dedent"

TAB_WIDTH = 8
_KEYWORDS = frozenset(keyword.kwlist)


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str


_STRING_PREFIX = r"(?:[rRbBuUfF]|[rR][bBfF]|[bBfF][rR])?"
_NUMBER = re.compile(
    r"""
    0[xX](?:_?[0-9a-fA-F])+ |
    0[bB](?:_?[01])+ |
    0[oO](?:_?[0-7])+ |
    (?:
        (?:[0-9](?:_?[0-9])*\.(?:[0-9](?:_?[0-9])*)? | \.[0-9](?:_?[0-9])* | [0-9](?:_?[0-9])*)
        (?:[eE][+-]?[0-9](?:_?[0-9])*)?
    )[jJ]?
    """,
    re.VERBOSE,
)
_NAME = re.compile(r"[^\W\d]\w*")
_OPERATORS = sorted(
    """
    **= //= >>= <<= -> := != == <= >= += -= *= /= %= &= |= ^= @= ** // << >>
    + - * / % @ & | ^ ~ < > = !
    """.split(),
    key=len,
    reverse=True,
)
_OPERATOR = re.compile("|".join(re.escape(op) for op in _OPERATORS))
_STRING_START = re.compile(_STRING_PREFIX + r"['\"]")
_LEADING_WS = re.compile(r"[ \t\f]*")
_OPEN = set("([{")
_CLOSE = set(")]}")


def _columns(ws: str) -> int:
    return len(ws.expandtabs(TAB_WIDTH))


def _scan_string(src: str, quote_at: int) -> tuple[int, bool]:
    """End offset of the literal whose quote starts at ``quote_at``, and whether it closed."""
    q = src[quote_at]
    triple = src.startswith(q * 3, quote_at)
    delim = q * 3 if triple else q
    i = quote_at + len(delim)
    while i < len(src):
        c = src[i]
        if c == "\\":
            i += 2
            continue
        if not triple and c == "\n":
            return i, False  # unterminated single-quoted literal stops at end of line
        if src.startswith(delim, i):
            return i + len(delim), True
        i += 1
    return len(src), False


def _unterminated(lexeme: str) -> bool:
    m = _STRING_START.match(lexeme)
    return not _scan_string(lexeme, m.end() - 1)[1]


def tokenize(source: str) -> list[Token]:
    """Lex ``source`` into tokens; never raises on malformed input."""
    source = source.replace("\r\n", "\n").replace("\r", "\n")
    toks: list[Token] = []
    indents: list[tuple[int, str]] = [(0, "")]
    depth = 0
    at_line_start = True
    pos = 0
    n = len(source)
    while pos < n:
        if at_line_start and depth == 0:
            m = _LEADING_WS.match(source, pos)
            ws = m.group()
            pos = m.end()
            if pos >= n:
                break
            c = source[pos]
            if c == "\n":
                pos += 1
                continue
            if source.startswith("\\\n", pos):
                # a bare continuation carries no code; keep scanning layout
                pos += 2
                continue
            if c == "#":
                end = source.find("\n", pos)
                end = n if end < 0 else end
                toks.append(Token(COMMENT, source[pos:end]))
                if end < n:
                    toks.append(Token(NEWLINE, "\n"))
                pos = end + 1
                continue
            col = _columns(ws)
            if col > indents[-1][0]:
                indents.append((col, ws))
                toks.append(Token(INDENT, ws))
            else:
                while col < indents[-1][0]:
                    indents.pop()
                    toks.append(Token(DEDENT, ""))
                if col > indents[-1][0]:
                    # inconsistent dedent: open a new level instead of failing
                    indents.append((col, ws))
                    toks.append(Token(INDENT, ws))
            at_line_start = False
            continue

        c = source[pos]
        if c in " \t\f":
            pos += 1
            continue
        if source.startswith("\\\n", pos):
            pos += 2
            continue
        if c == "\n":
            pos += 1
            if depth == 0:
                toks.append(Token(NEWLINE, "\n"))
                at_line_start = True
            continue
        if c == "#":
            end = source.find("\n", pos)
            end = n if end < 0 else end
            toks.append(Token(COMMENT, source[pos:end]))
            pos = end
            continue

        m = _STRING_START.match(source, pos)
        if m:
            end, _ = _scan_string(source, m.end() - 1)
            toks.append(Token(STRING, source[pos:end]))
            pos = end
            continue
        m = _NAME.match(source, pos)
        if m:
            word = m.group()
            toks.append(Token(KEYWORD if word in _KEYWORDS else NAME, word))
            pos = m.end()
            continue
        m = _NUMBER.match(source, pos)
        if m:
            toks.append(Token(NUMBER, m.group()))
            pos = m.end()
            continue
        m = _OPERATOR.match(source, pos)
        if m:
            toks.append(Token(OPERATOR, m.group()))
            pos = m.end()
            continue
        if c in _OPEN:
            depth += 1
        elif c in _CLOSE:
            depth = max(0, depth - 1)
        toks.append(Token(PUNCT, c))
        pos += 1

    toks.extend(Token(DEDENT, "") for _ in indents[1:])
    return toks


def untokenize(tokens: Iterable[Token]) -> str:
    """Rebuild source from tokens with single-space separation.

    ``tokenize(untokenize(tokenize(s))) == tokenize(s)`` for any ``s``.
    """
    out: list[str] = []
    indents = [""]
    line: list[str] = []
    line_indent = ""
    # a comment or unterminated string ends its line; anything after it
    # (other than layout tokens) must start a new one
    closed = False

    def flush(newline: bool):
        nonlocal line
        if line:
            text = " ".join(line)
            if newline and not closed and text.endswith("\\"):
                text += " "  # keep a trailing backslash from joining lines
            out.append(line_indent + text)
        if newline:
            out.append("\n")
        line = []

    for tok in tokens:
        if tok.kind == INDENT:
            indents.append(tok.lexeme)
        elif tok.kind == DEDENT:
            if len(indents) > 1:
                indents.pop()
        elif tok.kind == NEWLINE:
            flush(True)
            closed = False
        else:
            if closed:
                flush(True)
                closed = False
            if not line:
                line_indent = indents[-1]
            line.append(tok.lexeme)
            closed = tok.kind == COMMENT or (tok.kind == STRING and _unterminated(tok.lexeme))
    flush(False)
    return "".join(out)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two sequences of hashable items."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, y in enumerate(b, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (x != y),
            )
        previous = current
    return previous[-1]


def token_edit_distance(a: str, b: str) -> int:
    if a == b:
        return 0
    return levenshtein(tokenize(a), tokenize(b))
