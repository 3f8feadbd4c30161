"""Command-line entry point.

Subcommands::

    dsut validate MODEL [REQUIREMENTS]
    dsut generate MODEL [REQUIREMENTS] [--mode full|minimal] [--format table|json] ...
    dsut estimate MODEL [REQUIREMENTS] [--mode simple|complex] [--redundancy R] [--worst-case]

Reports go to stdout, diagnostics to stderr. Exit codes:

    0  success (warnings and info allowed)
    1  usage or I/O error
    2  parse error in a fact file
    3  model or requirement validation error
    4  consistency criterion violated (the report is still printed)
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from dsut import __version__
from dsut.bounds import (
    DEFAULT_REDUNDANCY,
    BoundsFragment,
    check_against_generation,
    counts_from_report,
    estimate,
    layer_counts,
)
from dsut.diagnostics import CRITERION_CODES, Diagnostic, Severity, worst
from dsut.errors import ModelBuildError, ParseError
from dsut.factlang import ComponentRef, FactSet, parse_facts
from dsut.generate import (
    FULL,
    MINIMAL,
    Limits,
    StrategyConfig,
    StrategyReport,
    TestTemplate,
    requirements_from_facts,
    run_strategy,
)
from dsut.model import LAYER_NAMES, SystemModel, build_model
from dsut.validate import lint_phantom_risk, validate_model, validate_requirements

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_CRITERIA = 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = FULL
    max_len: int | None = 16
    max_paths: int | None = 64
    physical_edge_coverage: bool = True
    redundancy: int = DEFAULT_REDUNDANCY
    output_format: str = "table"

    def __post_init__(self):
        if self.max_len is not None and self.max_len < 2:
            raise UsageError("--max-path-len must be at least 2")
        if self.max_paths is not None and self.max_paths < 1:
            raise UsageError("--max-paths-per-pair must be at least 1")
        if self.redundancy < 1:
            raise UsageError("--redundancy must be at least 1")

    def strategy(self) -> StrategyConfig:
        return StrategyConfig(self.mode, Limits(self.max_len, self.max_paths), self.physical_edge_coverage)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "max_path_len": self.max_len,
            "max_paths_per_pair": self.max_paths,
            "physical_edge_coverage": self.physical_edge_coverage,
            "redundancy": self.redundancy,
        }


class _Abort(Exception):
    def __init__(self, code: int):
        self.code = code


# --------------------------------------------------------------------------
# Loading
# --------------------------------------------------------------------------


def _load(paths: list[str], err: TextIO) -> FactSet:
    facts = FactSet()
    for p in paths:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            print(f"error: cannot read {p}: {exc}", file=err)
            raise _Abort(EXIT_USAGE) from exc
        try:
            facts.extend(parse_facts(text))
        except ParseError as exc:
            kind = type(exc).__name__
            print(f"{p}:{exc.line}:{exc.column}: {kind}: {exc.message}", file=err)
            raise _Abort(EXIT_PARSE) from exc
    return facts


def _build(facts: FactSet, err: TextIO) -> SystemModel:
    try:
        return build_model(facts)
    except ModelBuildError as exc:
        for e in exc.errors:
            where = f"{e.line}:{e.column}" if e.line is not None else "-"
            print(f"ERROR {e.code} layer=- {where} {e.message}", file=err)
        raise _Abort(EXIT_INVALID) from exc


def _check(model: SystemModel, facts: FactSet, with_requirements: bool) -> list[Diagnostic]:
    diags = validate_model(model)
    if with_requirements:
        diags += validate_requirements(model, facts.requirement_facts)
    return diags + lint_phantom_risk(model)


def _emit(diags, err: TextIO) -> None:
    for d in diags:
        print(d.line(), file=err)


def _prepare(args, err: TextIO):
    files = [args.model] + ([args.requirements] if args.requirements else [])
    facts = _load(files, err)
    model = _build(facts, err)
    with_reqs = bool(args.requirements) or bool(facts.requirement_facts)
    diags = _check(model, facts, with_reqs)
    return facts, model, diags


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def _ref_json(ref: ComponentRef) -> list:
    return [ref.cls, ref.index]


def _group(templates: list[TestTemplate]) -> list[tuple[int, str]]:
    """Collapse templates sharing a class sequence into one symbolic row."""
    groups: "OrderedDict[tuple, list[set]]" = OrderedDict()
    counts: dict[tuple, int] = {}
    for t in templates:
        key = tuple(r.cls for r in t.nodes)
        slots = groups.setdefault(key, [set() for _ in key])
        for slot, r in zip(slots, t.nodes):
            slot.add(r.index)
        counts[key] = counts.get(key, 0) + 1
    rows = []
    for key, slots in groups.items():
        parts = [f"[{cls}, {next(iter(s)) if len(s) == 1 else '_'}]" for cls, s in zip(key, slots)]
        rows.append((counts[key], " <-> ".join(parts)))
    return rows


def render_table(report: StrategyReport) -> str:
    head = ("Model layer", "Individual components", "Distributed aspect", "Symbolic description")
    rows = []
    for lr in report.layers:
        groups = _group(lr.distributed) or [(0, "-")]
        for i, (count, text) in enumerate(groups):
            if i == 0:
                rows.append((LAYER_NAMES[lr.layer], str(len(lr.component_templates)), str(len(lr.distributed)), f"{count} x {text}"))
            else:
                rows.append(("", "", "", f"{count} x {text}"))
    totals = report.totals
    rows.append(("Total", str(totals["t_comp"]), str(totals["t_dist"]), ""))
    widths = [max(len(r[i]) for r in [head, *rows]) for i in range(3)]

    def fmt(r):
        line = f"{r[0]:<{widths[0]}}  {r[1]:>{widths[1]}}  {r[2]:>{widths[2]}}  {r[3]}"
        return line.rstrip()

    lines = [fmt(head), fmt(tuple("-" * len(h) for h in head))]
    lines += [fmt(r) for r in rows]
    return "\n".join(lines) + "\n"


def _template_json(t: TestTemplate) -> dict:
    return {
        "id": t.id,
        "nodes": [_ref_json(r) for r in t.nodes],
        "params": list(t.params),
        "origin": [o.to_dict() for o in t.origins],
    }


def report_json(report: StrategyReport, config: RunConfig, model: SystemModel) -> dict:
    layers = []
    for lr in report.layers:
        layers.append(
            {
                "layer": lr.layer,
                "component_templates": [
                    {
                        "id": t.id,
                        "component": _ref_json(t.nodes[0]),
                        "type": model.component(lr.layer, t.nodes[0]).type_label,
                    }
                    for t in lr.component_templates
                ],
                "distributed_templates": [_template_json(t) for t in lr.distributed],
                "trivially_satisfied": [r.to_dict() for r in lr.trivially_satisfied],
                "diagnostics": [d.to_dict() for d in lr.diagnostics],
            }
        )
    return {"layers": layers, "totals": report.totals, "config": config.to_dict(), "tool_version": __version__}


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def render_bounds(fragment: BoundsFragment) -> str:
    head = ("Model layer", "C_n", "|G'_n|", "T_dist bound", "T bound")
    rows = [
        (LAYER_NAMES[lb.layer], str(lb.components), str(lb.communicating), str(lb.dist_bound), str(lb.total_bound))
        for lb in fragment.layers
    ]
    rows.append(("Total", str(fragment.t_comp), "", str(fragment.t_dist_bound), str(fragment.total_bound)))
    widths = [max(len(r[i]) for r in [head, *rows]) for i in range(5)]
    lines = []
    for r in [head, tuple("-" * w for w in widths), *rows]:
        cells = [f"{r[0]:<{widths[0]}}"] + [f"{c:>{w}}" for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def bounds_json(fragment: BoundsFragment) -> dict:
    return {
        "redundancy": fragment.redundancy,
        "layers": [
            {
                "layer": lb.layer,
                "components": lb.components,
                "communicating": lb.communicating,
                "dist_bound": lb.dist_bound,
                "total_bound": lb.total_bound,
            }
            for lb in fragment.layers
        ],
        "totals": {"t_comp": fragment.t_comp, "t_dist_bound": fragment.t_dist_bound, "total_bound": fragment.total_bound},
        "tool_version": __version__,
    }


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_validate(args, out: TextIO, err: TextIO) -> int:
    _, _, diags = _prepare(args, err)
    _emit(diags, err)
    return EXIT_INVALID if worst(diags) == Severity.ERROR else EXIT_OK


def cmd_generate(args, out: TextIO, err: TextIO) -> int:
    config = _run_config(args)
    facts, model, diags = _prepare(args, err)
    if worst(diags) == Severity.ERROR:
        _emit(diags, err)
        return EXIT_INVALID
    report = run_strategy(model, requirements_from_facts(facts), config.strategy())
    bounds = estimate(counts_from_report(model, report), config.redundancy)
    checks = check_against_generation(report, bounds)

    if config.output_format == "json":
        out.write(dump_json(report_json(report, config, model)))
    else:
        out.write(render_table(report))
    _emit(diags + report.diagnostics + checks, err)

    findings = report.diagnostics
    if any(d.code in CRITERION_CODES for d in findings) or worst(findings) == Severity.ERROR:
        return EXIT_CRITERIA
    return EXIT_OK


def cmd_estimate(args, out: TextIO, err: TextIO) -> int:
    if args.redundancy < 1:
        raise UsageError("--redundancy must be at least 1")
    facts, model, diags = _prepare(args, err)
    if worst(diags) == Severity.ERROR:
        _emit(diags, err)
        return EXIT_INVALID
    if facts.requirement_facts and not args.worst_case:
        report = run_strategy(model, requirements_from_facts(facts))
        counts = counts_from_report(model, report)
    else:
        counts = layer_counts(model, worst_case=True)
    bounds = estimate(counts, args.redundancy)
    fragment = bounds.simple if args.mode == "simple" else bounds.complex
    if args.format == "json":
        out.write(dump_json(bounds_json(fragment)))
    else:
        out.write(render_bounds(fragment))
    return EXIT_OK


def _limit(text: str) -> int | None:
    if text.lower() in ("none", "0", "unlimited"):
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'none', got {text!r}") from None


def _run_config(args) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        max_len=args.max_path_len,
        max_paths=args.max_paths_per_pair,
        physical_edge_coverage=not args.no_physical_edge_coverage,
        redundancy=args.redundancy,
        output_format=args.format,
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _Abort(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsut", description="Layered-model test template generation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def files(p):
        p.add_argument("model", help="fact file with object_/connection_/map_ facts")
        p.add_argument("requirements", nargs="?", help="fact file with requirement_ facts")

    p = sub.add_parser("validate", help="check model and requirement structure")
    files(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="generate test templates")
    files(p)
    p.add_argument("--mode", choices=(FULL, MINIMAL), default=FULL)
    p.add_argument("--max-path-len", type=_limit, default=16, help="max nodes per path ('none' = unbounded)")
    p.add_argument("--max-paths-per-pair", type=_limit, default=64, help="max paths per endpoint pair")
    p.add_argument("--no-physical-edge-coverage", action="store_true", help="report physical paths, not links")
    p.add_argument("--redundancy", type=int, default=DEFAULT_REDUNDANCY)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("estimate", help="compute test-count upper bounds")
    files(p)
    p.add_argument("--mode", choices=("simple", "complex"), default="simple")
    p.add_argument("--redundancy", type=int, default=DEFAULT_REDUNDANCY)
    p.add_argument("--worst-case", action="store_true", help="assume every component communicates")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_estimate)
    return parser


def run(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out, err)
    except _Abort as exc:
        return exc.code
    except UsageError as exc:
        print(f"dsut: error: {exc}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
