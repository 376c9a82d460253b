"""Command line front end: ``mesml validate|export|report FILE``.

Exit codes: 0 clean (lints allowed), 1 warnings only, 2 errors present,
3 parse failure, 4 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .interchange import SpecParseError, load_spec
from .linker import PreconditionError, data_interfaces, deployment_map, equivalence_pairs
from .metamodel import MesmlError, MesSpec, ViewTag
from .reporting import (
    UnknownDiagram,
    deployments_to_list,
    export_dot,
    interfaces_to_list,
    links_to_dict,
    model_stats,
    render_deployments,
    render_equivalences,
    render_interfaces,
    render_ts_tree,
    status_report,
    to_json,
)
from .validator import RULES, Severity, render_structured, render_text, validate_spec, worst_severity

EXIT_CLEAN = 0
EXIT_WARNINGS = 1
EXIT_ERRORS = 2
EXIT_PARSE = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mesml", description="MES-ML specification toolchain")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    validate = sub.add_parser("validate", help="check well-formedness rules")
    validate.add_argument("file")
    validate.add_argument("--format", choices=("text", "structured"), default="text")
    validate.add_argument("--deny-warnings", action="store_true", help="treat warnings as errors")
    validate.add_argument("--rule", action="append", metavar="CODE", help="only report these rule codes")

    export = sub.add_parser("export", help="export a diagram as DOT or the TS tree as text")
    export.add_argument("file")
    export.add_argument("--view", choices=("pp", "mes", "ts"), required=True)
    export.add_argument("--diagram", metavar="PATH", help="subprocess path, e.g. 'Quality Test/Create Sample'")
    export.add_argument("--out", metavar="FILE")

    report = sub.add_parser("report", help="status, statistics and link reports")
    report.add_argument("file")
    report.add_argument("--kind", choices=("status", "stats", "links", "deployment", "interfaces"), required=True)
    report.add_argument("--format", choices=("text", "structured"), default="text")
    return parser


def _load(path: str, err: TextIO) -> MesSpec | int:
    try:
        return load_spec(path)
    except OSError as exc:
        print(f"mesml: cannot read {path}: {exc.strerror or exc}", file=err)
        return EXIT_USAGE
    except UnicodeDecodeError as exc:
        print(f"mesml: cannot read {path}: {exc}", file=err)
        return EXIT_USAGE
    except SpecParseError as exc:
        for error in exc.errors:
            print(str(error), file=err)
        return EXIT_PARSE


def cmd_validate(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    if args.rule:
        unknown = sorted(set(args.rule) - RULES.keys())
        if unknown:
            print(f"mesml: unknown rule code(s): {', '.join(unknown)}", file=err)
            return EXIT_USAGE
    spec = _load(args.file, err)
    if isinstance(spec, int):
        return spec
    diagnostics = validate_spec(spec, rules=args.rule)
    out.write(render_structured(diagnostics) if args.format == "structured" else render_text(diagnostics))
    worst = worst_severity(diagnostics)
    if worst is Severity.ERROR:
        return EXIT_ERRORS
    if worst is Severity.WARNING:
        return EXIT_ERRORS if args.deny_warnings else EXIT_WARNINGS
    return EXIT_CLEAN


def cmd_export(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    if args.view == "ts" and args.diagram:
        print("mesml: --diagram does not apply to the ts view", file=err)
        return EXIT_USAGE
    spec = _load(args.file, err)
    if isinstance(spec, int):
        return spec
    try:
        if args.view == "ts":
            text = render_ts_tree(spec)
        else:
            text = export_dot(spec, ViewTag(args.view), args.diagram)
    except UnknownDiagram as exc:
        print(f"mesml: {exc}", file=err)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_CLEAN


def cmd_report(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    spec = _load(args.file, err)
    if isinstance(spec, int):
        return spec
    structured = args.format == "structured"
    try:
        if args.kind == "status":
            report = status_report(spec)
            text = to_json(report.to_dict()) if structured else report.render_text()
        elif args.kind == "stats":
            stats = model_stats(spec)
            text = to_json(stats.to_dict()) if structured else stats.render_text()
        elif args.kind == "deployment":
            dmap = deployment_map(spec)
            text = to_json(deployments_to_list(dmap)) if structured else render_deployments(dmap)
        elif args.kind == "interfaces":
            entries = data_interfaces(spec)
            text = to_json(interfaces_to_list(entries)) if structured else render_interfaces(entries)
        else:
            pairs, dmap, entries = equivalence_pairs(spec), deployment_map(spec), data_interfaces(spec)
            if structured:
                text = to_json(links_to_dict(pairs, dmap, entries))
            else:
                text = "\n".join((render_equivalences(pairs), render_deployments(dmap), render_interfaces(entries)))
    except PreconditionError as exc:
        print(f"mesml: {exc}", file=err)
        for d in exc.diagnostics:
            print(d.render(), file=err)
        return EXIT_ERRORS
    out.write(text)
    return EXIT_CLEAN


COMMANDS = {"validate": cmd_validate, "export": cmd_export, "report": cmd_report}


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
        err: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=err)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out, err)
    except MesmlError as exc:
        print(f"mesml: {exc}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
