"""Prompt rendering for the syntax and semantic phases.

Byte layouts are pinned by the golden files under ``tests/golden``; any change
here that alters rendered text must update those files deliberately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .assignment import Assignment
from .chunker import Chunk
from .oracles import Diagnostic, TestReport, failure_summary

SYNTAX_PLAIN = "syntax-plain"
SYNTAX_WITH_DIAGNOSTIC = "syntax-with-diagnostic"
SEMANTIC = "semantic"

PROGRAM = "program"
DIAGNOSTICS = "diagnostics"
DESCRIPTION = "description"
TESTS = "tests"
_BLOCK_ORDER = (PROGRAM, DIAGNOSTICS, DESCRIPTION, TESTS)

SEMANTIC_STRUCTURES: tuple[tuple[str, ...], ...] = (
    (PROGRAM,),
    (PROGRAM, DIAGNOSTICS),
    (PROGRAM, DESCRIPTION),
    (PROGRAM, DIAGNOSTICS, DESCRIPTION),
    (PROGRAM, DIAGNOSTICS, DESCRIPTION, TESTS),
    (PROGRAM, DIAGNOSTICS, TESTS),
)

SYNTAX_INSTRUCTION = "# Fix the syntax error of the program #"
SYNTAX_PROGRAM_HEADER = "# Buggy Program #"
ERROR_HEADER = "### Error Msg ###"
PROGRAM_HEADER = "### Buggy Program ###"
DIAGNOSTICS_HEADER = "### Diagnostics ###"
SHOT_INCORRECT = "# Incorrect Program #"
SHOT_CORRECT = "# Correct Program #"
TRAILER = "### Correct Program ###\n"

MAX_PROMPT_TESTS = 4


def structure_tag(structure: Iterable[str]) -> str:
    parts = set(structure)
    return "+".join(b for b in _BLOCK_ORDER if b in parts)


def parse_structure(tag: str) -> tuple[str, ...]:
    parts = [p.strip() for p in tag.replace(",", "+").split("+") if p.strip()]
    unknown = set(parts) - set(_BLOCK_ORDER)
    if unknown or PROGRAM not in parts:
        raise ValueError(f"invalid prompt structure: {tag!r}")
    return tuple(b for b in _BLOCK_ORDER if b in parts)


@dataclass(frozen=True)
class Prompt:
    text: str
    kind: str
    structure: tuple[str, ...]
    shots: int = 0
    # requested structure; blocks with no content are dropped from ``structure``
    label: str = ""

    @property
    def tag(self) -> str:
        return self.label or structure_tag(self.structure)


@dataclass(frozen=True)
class ExamplePair:
    incorrect: str
    correct: str

    def __post_init__(self):
        if self.incorrect == self.correct:
            raise ValueError("example pair must differ")


def _block(text: str) -> str:
    return text.rstrip("\n") + "\n"


def syntax_prompts(chunk: Chunk, diag: Diagnostic) -> list[Prompt]:
    body = SYNTAX_PROGRAM_HEADER + "\n" + _block(chunk.text)
    plain = SYNTAX_INSTRUCTION + "\n\n" + body + "\n" + TRAILER
    with_msg = (
        SYNTAX_INSTRUCTION + "\n\n" + ERROR_HEADER + "\n" + _block(diag.raw) + "\n" + body + "\n" + TRAILER
    )
    return [
        Prompt(plain, SYNTAX_PLAIN, (PROGRAM,), label=SYNTAX_PLAIN),
        Prompt(with_msg, SYNTAX_WITH_DIAGNOSTIC, (PROGRAM, DIAGNOSTICS), label=SYNTAX_WITH_DIAGNOSTIC),
    ]


def render_shot(pair: ExamplePair) -> str:
    return SHOT_INCORRECT + "\n" + _block(pair.incorrect) + SHOT_CORRECT + "\n" + _block(pair.correct)


def _description_block(description: str) -> Optional[str]:
    if not description.strip():
        return None
    lines = description.strip("\n").split("\n")
    return "\n".join(l if l.startswith("#") else "#" + l for l in lines) + "\n"


def _tests_block(assignment: Assignment) -> str:
    cases = []
    for case in assignment.tests[:MAX_PROMPT_TESTS]:
        cases.append("#input:\n" + _block(case.input) + "#output:\n" + _block(case.expected_output))
    return "\n".join(cases)


def semantic_prompts(
    program: str,
    assignment: Assignment,
    shots: Sequence[ExamplePair] = (),
    report: Optional[TestReport] = None,
    structures: Optional[Sequence[Sequence[str]]] = None,
) -> list[Prompt]:
    """Render one prompt per structure (all six by default).

    ``report`` supplies the diagnostics block: a summary of the first failing
    test. Without a failing report the block is left out.
    """
    summary = failure_summary(report, assignment.tests) if report is not None else None
    blocks = {
        PROGRAM: PROGRAM_HEADER + "\n" + _block(program),
        DIAGNOSTICS: DIAGNOSTICS_HEADER + "\n" + _block(summary) if summary else None,
        DESCRIPTION: _description_block(assignment.description),
        TESTS: _tests_block(assignment),
    }
    shot_text = [render_shot(p) for p in shots]

    prompts = []
    for requested in structures or SEMANTIC_STRUCTURES:
        requested = parse_structure("+".join(requested))
        used = tuple(b for b in requested if blocks[b] is not None)
        text = "\n".join(shot_text + [blocks[b] for b in used]) + "\n" + TRAILER
        prompts.append(Prompt(text, SEMANTIC, used, shots=len(shot_text), label=structure_tag(requested)))
    return prompts
