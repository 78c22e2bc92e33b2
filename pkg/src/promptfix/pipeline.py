"""Two-phase repair: syntax repair on chunks, then test-guided semantic repair."""

from __future__ import annotations

import functools
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .assignment import Assignment
from .chunker import chunk, merge_chunk, whole_program
from .fewshot import BankEntry, build_bank, select_shots
from .llm import Backend, EmptyGeneration, GenParams, Generation, extract_code, prompt_digest, top_k_by_logprob
from .oracles import DEFAULT_TIMEOUT, RUNTIME_EXCEPTION, TIMEOUT, TestReport, check_syntax, resolve_interpreter, run_tests
from .prompts import SEMANTIC_STRUCTURES, Prompt, semantic_prompts, syntax_prompts
from .tokens import token_edit_distance

SYNTAX = "syntax"
SEMANTIC = "semantic"

REPAIRED = "repaired"
SYNTAX_FIXED_ONLY = "syntax-fixed-only"
FAILED = "failed"

ORIGINAL = "original"


@functools.lru_cache(maxsize=4096)
def _report(source: str, tests: tuple, timeout: float, interpreter: str) -> TestReport:
    # ablations replay the same candidates under several configurations
    return run_tests(source, tests, timeout=timeout, interpreter=interpreter)


def short_id(source: str) -> str:
    return hashlib.sha256(source.encode("utf-8")).hexdigest()[:10]


@dataclass(frozen=True)
class Candidate:
    source: str
    phase: str
    prompt_structure: str
    mean_logprob: Optional[float] = None
    iteration: int = 0


@dataclass
class TraceEvent:
    phase: str
    iteration: int
    subject: str
    prompts: list[str] = field(default_factory=list)
    kept: list[str] = field(default_factory=list)
    discarded: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class RepairResult:
    status: str
    program: Optional[str]
    ted: Optional[int]
    trace: list[TraceEvent] = field(default_factory=list)
    candidate: Optional[Candidate] = None

    @property
    def model_calls(self) -> int:
        return sum(len(e.prompts) for e in self.trace)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "program": self.program,
            "ted": self.ted,
            "model_calls": self.model_calls,
            "trace": [asdict(e) for e in self.trace],
        }


@dataclass
class PipelineConfig:
    use_few_shot: bool = False
    use_chunking: bool = True
    use_iterative: bool = True
    max_syntax_iterations: int = 2
    prompt_structures: Optional[tuple[tuple[str, ...], ...]] = None
    gen_params: GenParams = field(default_factory=GenParams)
    top_k: int = 10
    shots: int = 3
    per_test_timeout: float = DEFAULT_TIMEOUT
    interpreter: Optional[str] = None
    workers: int = 4
    # still-invalid syntax candidates carried into the next iteration
    syntax_frontier: int = 1

    def __post_init__(self):
        if self.max_syntax_iterations < 1:
            raise ValueError("max_syntax_iterations must be >= 1")

    @property
    def syntax_iterations(self) -> int:
        return self.max_syntax_iterations if self.use_iterative else 1

    @property
    def structures(self) -> tuple[tuple[str, ...], ...]:
        return self.prompt_structures or SEMANTIC_STRUCTURES


class _Run:
    """Shared state for one repair: backend, caches and the trace."""

    def __init__(self, config: PipelineConfig, backend: Backend, trace: Optional[list] = None):
        self.config = config
        self.backend = backend
        self.trace = trace if trace is not None else []

    def map(self, fn, items):
        items = list(items)
        if self.config.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(fn, items))
        return [fn(i) for i in items]

    def generate(self, prompts: Sequence[Prompt]) -> list[list[Generation]]:
        params = self.config.gen_params
        return self.map(lambda p: top_k_by_logprob(self.backend.complete(p, params), self.config.top_k), prompts)

    def extract(self, gen: Generation, kind: str) -> str:
        return extract_code(gen, kind, self.config.gen_params.stop_markers)

    def diagnostics(self, source: str):
        return check_syntax(source, self.config.interpreter)

    def reports(self, sources: Sequence[str], assignment: Assignment) -> list[TestReport]:
        cfg = self.config
        tests = tuple(assignment.tests)
        exe = resolve_interpreter(cfg.interpreter)
        unique = list(dict.fromkeys(sources))
        done = dict(zip(unique, self.map(lambda s: _report(s, tests, cfg.per_test_timeout, exe), unique)))
        return [done[s] for s in sources]


def _prompt_ref(prompt: Prompt) -> str:
    return f"{prompt.tag}@{prompt_digest(prompt.text)[:12]}"


def _failure_reason(report: TestReport) -> str:
    statuses = {o.status for o in report.per_test if not o.passed}
    if RUNTIME_EXCEPTION in statuses:
        return "runtime exception"
    if TIMEOUT in statuses:
        return "timeout"
    return "failed tests"


def _syntax_phase(program: str, run: _Run) -> list[Candidate]:
    cfg = run.config
    frontier = [program]
    seen = {program}
    valid: list[Candidate] = []
    for iteration in range(1, cfg.syntax_iterations + 1):
        still_invalid = []
        for source in frontier:
            diag = run.diagnostics(source)[0]
            region = chunk(source, diag) if cfg.use_chunking else whole_program(source)
            event = TraceEvent(SYNTAX, iteration, short_id(source))
            prompts = syntax_prompts(region, diag)
            for prompt, gens in zip(prompts, run.generate(prompts)):
                event.prompts.append(_prompt_ref(prompt))
                for gen in gens:
                    try:
                        code = run.extract(gen, SYNTAX)
                    except EmptyGeneration:
                        event.discarded.append(("-", "empty generation"))
                        continue
                    merged = merge_chunk(source, region, code)
                    sid = short_id(merged)
                    if merged == source:
                        # unchanged: the oracle already rejected exactly this text
                        event.discarded.append((sid, "syntax oracle rejected"))
                        continue
                    if merged in seen:
                        event.discarded.append((sid, "duplicate"))
                        continue
                    seen.add(merged)
                    diags = run.diagnostics(merged)
                    if not diags:
                        valid.append(Candidate(merged, SYNTAX, prompt.tag, gen.mean_logprob, iteration))
                        event.kept.append(sid)
                    else:
                        event.discarded.append((sid, "syntax oracle rejected"))
                        progressed = diags[0].line > diag.line
                        lp = gen.mean_logprob if gen.mean_logprob is not None else float("-inf")
                        still_invalid.append(((not progressed, -lp, len(still_invalid)), merged))
            run.trace.append(event)
        if valid or not still_invalid:
            break
        still_invalid.sort(key=lambda t: t[0])
        frontier = [src for _, src in still_invalid[: cfg.syntax_frontier]]
    return valid


def _semantic_phase(
    candidates: Sequence[Candidate],
    assignment: Assignment,
    run: _Run,
    bank: Optional[Sequence[BankEntry]],
    student: Optional[str],
) -> list[Candidate]:
    cfg = run.config
    valid: list[Candidate] = []
    seen = set()
    for cand, report in zip(candidates, run.reports([c.source for c in candidates], assignment)):
        event = TraceEvent(SEMANTIC, cand.iteration, short_id(cand.source))
        run.trace.append(event)
        if report.all_pass:
            if cand.source not in seen:
                seen.add(cand.source)
                valid.append(cand)
                event.kept.append(short_id(cand.source))
            continue
        shots = []
        if cfg.use_few_shot and bank:
            shots = select_shots(
                bank, report.vector, cfg.shots, exclude_student=student, exclude_program=cand.source
            )
        prompts = semantic_prompts(cand.source, assignment, shots, report, cfg.structures)
        unique = list({p.text: p for p in reversed(prompts)}.values())[::-1]

        fresh: list[Candidate] = []
        for prompt, gens in zip(unique, run.generate(unique)):
            event.prompts.append(_prompt_ref(prompt))
            for gen in gens:
                try:
                    code = run.extract(gen, SEMANTIC) + "\n"
                except EmptyGeneration:
                    event.discarded.append(("-", "empty generation"))
                    continue
                sid = short_id(code)
                if code in seen:
                    event.discarded.append((sid, "duplicate"))
                    continue
                seen.add(code)
                if run.diagnostics(code):
                    event.discarded.append((sid, "syntax oracle rejected"))
                    continue
                fresh.append(Candidate(code, SEMANTIC, prompt.tag, gen.mean_logprob, cand.iteration))
        for new, new_report in zip(fresh, run.reports([c.source for c in fresh], assignment)):
            if new_report.all_pass:
                valid.append(new)
                event.kept.append(short_id(new.source))
            else:
                event.discarded.append((short_id(new.source), _failure_reason(new_report)))
    return valid


def syntax_phase(program: str, config: PipelineConfig, backend: Backend, trace: Optional[list] = None) -> list[Candidate]:
    """Iteratively repair the first syntax error until some candidate compiles."""
    return _syntax_phase(program, _Run(config, backend, trace))


def semantic_phase(
    candidates: Sequence[Candidate],
    assignment: Assignment,
    config: PipelineConfig,
    backend: Backend,
    bank: Optional[Sequence[BankEntry]] = None,
    student: Optional[str] = None,
    trace: Optional[list] = None,
) -> list[Candidate]:
    """Return every candidate (given or generated) that passes all tests."""
    return _semantic_phase(candidates, assignment, _Run(config, backend, trace), bank, student)


def select_final(valid: Sequence[Candidate], original: str) -> Candidate:
    if not valid:
        raise ValueError("select_final needs at least one candidate")

    def key(item):
        i, c = item
        lp = c.mean_logprob
        return (token_edit_distance(c.source, original), lp is None, -(lp or 0.0), i)

    return min(enumerate(valid), key=key)[1]


def repair(
    program: str,
    assignment: Assignment,
    config: PipelineConfig,
    backend: Backend,
    bank: Optional[Sequence[BankEntry]] = None,
    student: Optional[str] = None,
) -> RepairResult:
    """Repair ``program``; ``student`` excludes that student's own history from few-shots.

    Backend and interpreter errors propagate with the partial trace attached
    as ``exc.trace``.
    """
    run = _Run(config, backend)
    try:
        if run.diagnostics(program):
            syntactic = _syntax_phase(program, run)
            if not syntactic:
                return RepairResult(FAILED, None, None, run.trace)
        else:
            syntactic = [Candidate(program, SYNTAX, ORIGINAL)]
        if config.use_few_shot and bank is None:
            bank = build_bank(assignment, config.per_test_timeout, config.interpreter)
        valid = _semantic_phase(syntactic, assignment, run, bank, student)
    except Exception as exc:
        exc.trace = run.trace
        raise
    status = REPAIRED if valid else SYNTAX_FIXED_ONLY
    best = select_final(valid or syntactic, program)
    return RepairResult(status, best.source, token_edit_distance(best.source, program), run.trace, best)
