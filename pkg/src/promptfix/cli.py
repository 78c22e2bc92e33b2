"""Command line: ``promptfix repair|bench|ablate|validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

from .assignment import AssignmentError, load_assignment, validate
from .bench import MODES, DatasetError, ablation_csv, format_ablation, format_table, run_ablation, run_benchmark, to_csv
from .llm import BackendError, GenParams, make_backend
from .oracles import DEFAULT_TIMEOUT
from .pipeline import FAILED, REPAIRED, SYNTAX_FIXED_ONLY, PipelineConfig, repair
from .prompts import parse_structure

EXIT_CODES = {REPAIRED: 0, SYNTAX_FIXED_ONLY: 2, FAILED: 3}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--few-shot", action="store_true", help="add peer examples to semantic prompts")
    p.add_argument("--no-chunking", action="store_true", help="send the whole program in syntax prompts")
    p.add_argument("--no-iterative", action="store_true", help="a single syntax-repair round")
    p.add_argument("--max-syntax-iterations", type=int, default=2)
    p.add_argument("--structures", help="comma-separated prompt structures, e.g. program+tests,program+description")
    p.add_argument("--backend", default="http", help="mock:<fixtures.json> or http (default: http)")
    p.add_argument("--endpoint", help="completions URL for the http backend (or MODEL_ENDPOINT)")
    p.add_argument("--model", help="model name for the http backend (or MODEL_NAME)")
    p.add_argument("--http-timeout", type=float, default=60.0)
    p.add_argument("--temperature", type=float, default=0.8)
    p.add_argument("--samples", type=int, default=10, help="generations per prompt")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="per-test timeout in seconds")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--verbose", "-v", action="store_true")


def _config(args) -> PipelineConfig:
    structures = None
    if args.structures:
        structures = tuple(parse_structure(s) for s in args.structures.split(","))
    return PipelineConfig(
        use_few_shot=args.few_shot,
        use_chunking=not args.no_chunking,
        use_iterative=not args.no_iterative,
        max_syntax_iterations=args.max_syntax_iterations,
        prompt_structures=structures,
        gen_params=GenParams(temperature=args.temperature, samples_per_prompt=args.samples),
        per_test_timeout=args.timeout,
        workers=args.workers,
    )


def _backend(args):
    return make_backend(args.backend, endpoint=args.endpoint, model=args.model, timeout=args.http_timeout)


def _write_report(out: Path, csv_text: str, plot) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text, encoding="utf-8")
    figure = plot(out.with_suffix(".png"))
    print(f"wrote {out} and {figure}", file=sys.stderr)


def cmd_repair(args) -> int:
    source = Path(args.file).read_text(encoding="utf-8")
    assignment = load_assignment(args.assignment)
    if not source.strip():
        raise ValueError(f"{args.file} is empty")
    result = repair(source, assignment, _config(args), _backend(args), student=args.student)
    if result.program is not None:
        sys.stdout.write(result.program if result.program.endswith("\n") else result.program + "\n")
    print(f"status: {result.status}  ted: {result.ted if result.ted is not None else 'N/A'}", file=sys.stderr)
    if args.verbose:
        print(json.dumps(result.to_dict()["trace"], indent=1), file=sys.stderr)
    return EXIT_CODES[result.status]


def cmd_bench(args) -> int:
    from .plotting import plot_benchmark

    records = run_benchmark(args.dataset, _config(args), _backend(args), strict=args.strict)
    sys.stdout.write(format_table(records))
    csv_text = to_csv(records)
    if args.out:
        _write_report(Path(args.out), csv_text, lambda p: plot_benchmark(records, p))
    else:
        sys.stdout.write("\n" + csv_text)
    return 0


def cmd_ablate(args) -> int:
    from .plotting import plot_ablation

    table = run_ablation(args.dataset, args.mode, _config(args), _backend(args), strict=args.strict)
    sys.stdout.write(format_ablation(table))
    csv_text = ablation_csv(table)
    if args.out:
        _write_report(Path(args.out), csv_text, lambda p: plot_ablation(table, p))
    else:
        sys.stdout.write("\n" + csv_text)
    return 0


def cmd_validate(args) -> int:
    warnings = validate(load_assignment(args.assignment), timeout=args.timeout)
    for w in warnings:
        print(f"warning: {w}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="promptfix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repair", help="repair one program")
    p.add_argument("file")
    p.add_argument("--assignment", required=True, help="assignment directory")
    p.add_argument("--student", help="exclude this student's history from few-shots")
    _add_common(p)
    p.set_defaults(func=cmd_repair)

    for name, func, doc in (("bench", cmd_bench, "replay a dataset"), ("ablate", cmd_ablate, "compare ablations")):
        p = sub.add_parser(name, help=doc)
        p.add_argument("dataset")
        if name == "ablate":
            p.add_argument("--mode", required=True, choices=MODES)
        p.add_argument("--out", help="CSV report path; a PNG figure is written alongside")
        p.add_argument("--strict", action="store_true", help="abort on the first crashing repair")
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("validate", help="check an assignment directory")
    p.add_argument("assignment")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (OSError, ValueError, BackendError, AssignmentError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(args, "verbose", False) and getattr(exc, "trace", None):
            print(json.dumps([asdict(e) for e in exc.trace], indent=1), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
