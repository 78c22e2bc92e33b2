"""Dataset replay, per-assignment aggregation and ablation comparisons.

A dataset is a directory of assignments plus ``manifest.json``::

    {"targets": [{"assignment": "a1", "student": "s1",
                  "buggy": "history/s1/v01.py", "correct": "history/s1/v02.py"}]}

Program paths are relative to the assignment directory.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .assignment import Assignment, load_assignment
from .fewshot import build_bank
from .llm import Backend
from .pipeline import REPAIRED, PipelineConfig, RepairResult, repair
from .prompts import SEMANTIC_STRUCTURES, structure_tag

log = logging.getLogger(__name__)

OVERALL = "Overall"
ERROR = "error"
MODES = ("no-chunking", "no-iterative", "zero-shot", "single-structure")
CSV_FIELDS = ["assignment_id", "submissions", "repaired", "repair_rate", "mean_ted", "sd_ted"]


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Target:
    assignment: str
    student: str
    buggy: str
    correct: Optional[str] = None


@dataclass(frozen=True)
class Outcome:
    assignment: str
    student: str
    status: str
    ted: Optional[int]

    @property
    def repaired(self) -> bool:
        return self.status == REPAIRED


@dataclass(frozen=True)
class BenchRecord:
    assignment_id: str
    submissions: int
    repaired: int
    repair_rate: float
    mean_ted: Optional[float]
    sd_ted: Optional[float]


@dataclass
class Dataset:
    root: Path
    assignments: dict[str, Assignment]
    targets: list[Target]

    def program(self, target: Target) -> str:
        return (self.root / target.assignment / target.buggy).read_text(encoding="utf-8")


def load_dataset(path: Union[str, Path]) -> Dataset:
    root = Path(path)
    manifest = root / "manifest.json"
    if not manifest.is_file():
        raise DatasetError(f"missing manifest: {manifest}")
    raw = json.loads(manifest.read_text(encoding="utf-8"))
    targets = [Target(**t) for t in raw["targets"]]
    assignments = {}
    for t in targets:
        if t.assignment not in assignments:
            assignments[t.assignment] = load_assignment(root / t.assignment)
        if not (root / t.assignment / t.buggy).is_file():
            raise DatasetError(f"missing target program: {t.assignment}/{t.buggy}")
    return Dataset(root, assignments, targets)


def aggregate(outcomes: Iterable[Outcome]) -> list[BenchRecord]:
    """One record per assignment (first-seen order) plus the overall row.

    TED statistics cover repaired programs only; the overall row pools
    programs rather than averaging per-assignment means.
    """
    outcomes = list(outcomes)
    order = list(dict.fromkeys(o.assignment for o in outcomes))
    records = [_record(a, [o for o in outcomes if o.assignment == a]) for a in order]
    records.append(_record(OVERALL, outcomes))
    return records


def _record(name: str, outcomes: Sequence[Outcome]) -> BenchRecord:
    teds = [o.ted for o in outcomes if o.repaired]
    n = len(outcomes)
    mean = statistics.mean(teds) if teds else None
    sd = statistics.stdev(teds) if len(teds) > 1 else (0.0 if teds else None)
    rate = 100.0 * len(teds) / n if n else 0.0
    return BenchRecord(name, n, len(teds), rate, mean, sd)


def format_ted(record: BenchRecord, with_sd: bool = True) -> str:
    if record.mean_ted is None:
        return "N/A"
    if not with_sd:
        return f"{record.mean_ted:.2f}"
    return f"{record.mean_ted:.2f} ({record.sd_ted:.2f})"


def format_table(records: Sequence[BenchRecord]) -> str:
    header = ("Problem ID", "# Submissions", "Repair rate (%)", "Mean TED (SD)")
    rows = [
        (r.assignment_id, str(r.submissions), f"{r.repair_rate:.2f}", format_ted(r, r.assignment_id != OVERALL))
        for r in records
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    line = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths))
    out = [line(header), "-+-".join("-" * w for w in widths)]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def to_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(
            {
                "assignment_id": r.assignment_id,
                "submissions": r.submissions,
                "repaired": r.repaired,
                "repair_rate": f"{r.repair_rate:.2f}",
                "mean_ted": "N/A" if r.mean_ted is None else f"{r.mean_ted:.2f}",
                "sd_ted": "N/A" if r.sd_ted is None else f"{r.sd_ted:.2f}",
            }
        )
    return buf.getvalue()


def replay(
    dataset: Dataset, config: PipelineConfig, backend: Backend, strict: bool = False
) -> list[tuple[Target, RepairResult]]:
    """Repair every target; unless ``strict``, a crashing target counts as unrepaired."""
    banks = {}
    results = []
    for target in dataset.targets:
        assignment = dataset.assignments[target.assignment]
        if config.use_few_shot and target.assignment not in banks:
            banks[target.assignment] = build_bank(assignment, config.per_test_timeout, config.interpreter)
        try:
            result = repair(
                dataset.program(target),
                assignment,
                config,
                backend,
                bank=banks.get(target.assignment),
                student=target.student,
            )
        except Exception as exc:
            if strict:
                raise
            log.error("repair of %s/%s aborted: %s", target.assignment, target.student, exc)
            result = RepairResult(ERROR, None, None, getattr(exc, "trace", []))
        log.info("%s/%s: %s (ted=%s)", target.assignment, target.student, result.status, result.ted)
        results.append((target, result))
    return results


def run_benchmark(
    dataset: Union[Dataset, str, Path], config: PipelineConfig, backend: Backend, strict: bool = False
) -> list[BenchRecord]:
    if not isinstance(dataset, Dataset):
        dataset = load_dataset(dataset)
    results = replay(dataset, config, backend, strict)
    return aggregate(Outcome(t.assignment, t.student, r.status, r.ted) for t, r in results)


def ablation_variants(mode: str, config: PipelineConfig) -> list[tuple[str, PipelineConfig]]:
    if mode == "no-chunking":
        return [("full", config), ("no-chunking", replace(config, use_chunking=False))]
    if mode == "no-iterative":
        return [("full", config), ("no-iterative", replace(config, use_iterative=False))]
    if mode == "zero-shot":
        return [("few-shot", replace(config, use_few_shot=True)), ("zero-shot", replace(config, use_few_shot=False))]
    if mode == "single-structure":
        structures = config.prompt_structures or SEMANTIC_STRUCTURES
        variants = [("ensemble", replace(config, prompt_structures=tuple(structures)))]
        variants += [(structure_tag(s), replace(config, prompt_structures=(tuple(s),))) for s in structures]
        return variants
    raise ValueError(f"unknown ablation mode: {mode!r} (choose from {', '.join(MODES)})")


def run_ablation(
    dataset: Union[Dataset, str, Path], mode: str, config: PipelineConfig, backend: Backend, strict: bool = False
) -> dict[str, list[BenchRecord]]:
    """Benchmark every variant of ``mode``; keys keep variant order."""
    if not isinstance(dataset, Dataset):
        dataset = load_dataset(dataset)
    variants = ablation_variants(mode, config)
    return {name: run_benchmark(dataset, cfg, backend, strict) for name, cfg in variants}


def format_ablation(table: dict[str, list[BenchRecord]]) -> str:
    names = list(table)
    ids = [r.assignment_id for r in next(iter(table.values()))]
    header = ["Problem ID"] + [f"{n} RR (%)" for n in names] + [f"{n} Mean TED (SD)" for n in names]
    rows = []
    for i, aid in enumerate(ids):
        recs = [table[n][i] for n in names]
        rows.append(
            [aid]
            + [f"{r.repair_rate:.2f}" for r in recs]
            + [format_ted(r, aid != OVERALL) for r in recs]
        )
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    line = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths))
    out = [line(header), "-+-".join("-" * w for w in widths)] + [line(r) for r in rows]
    return "\n".join(out) + "\n"


def ablation_csv(table: dict[str, list[BenchRecord]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["variant"] + CSV_FIELDS)
    for name, records in table.items():
        for line in to_csv(records).splitlines()[1:]:
            writer.writerow([name] + next(csv.reader([line])))
    return buf.getvalue()
