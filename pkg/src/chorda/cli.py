"""Command-line driver: check, skeleton, expand, trace, export, serve.

Exit codes: 0 success, 1 domain validation failure, 2 I/O failure, 64 usage.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from . import jsonio
from .classify import validate_classification
from .layout import layout
from .markup import ParseDiagnostic, Severity, has_errors, parse_document
from .model import BpmnModel, RequirementsDocument, TraceLink
from .orchestrate import BindingError, ExpansionError, bind_by_name, expand, unresolved_root_groups
from .skeleton import generate_skeleton
from .svg import to_svg
from .trace import check_completeness
from .xpdl import to_xpdl

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _write_text(path: Optional[str], content: str) -> None:
    if path is None:
        sys.stdout.write(content)
        return
    try:
        Path(path).write_text(content, encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _print_diagnostics(path: str, diags: list[ParseDiagnostic]) -> None:
    for diag in diags:
        print(diag.render(path), file=sys.stderr)


def _load_document(path: str) -> tuple[RequirementsDocument, bool]:
    doc, diags = parse_document(_read_text(path))
    _print_diagnostics(path, diags)
    return doc, has_errors(diags)


def _require_ready(path: str) -> RequirementsDocument:
    doc, failed = _load_document(path)
    if failed:
        raise SystemExit(EXIT_VALIDATION)
    issues = validate_classification(doc)
    for issue in issues:
        print(f"{path}: statement {issue.statement_id}: {issue.message}", file=sys.stderr)
    if issues:
        raise SystemExit(EXIT_VALIDATION)
    return doc


def _render(model: BpmnModel, links: list[TraceLink], fmt: str) -> str:
    if fmt == "json":
        return jsonio.to_json(model, links)
    diagram = layout(model)
    return to_xpdl(diagram) if fmt == "xpdl" else to_svg(diagram)


def cmd_check(args: argparse.Namespace) -> int:
    failed = False
    for path in args.paths:
        doc, bad_parse = _load_document(path)
        issues = validate_classification(doc)
        for issue in issues:
            print(f"{path}: statement {issue.statement_id}: {issue.message}", file=sys.stderr)
        if bad_parse or issues:
            failed = True
        else:
            stats = (
                f"{len(doc.statements)} statements, {len(doc.participants)} participants, "
                f"{len(doc.data_objects)} data objects"
            )
            print(f"{path}: ok ({stats})")
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_skeleton(args: argparse.Namespace) -> int:
    doc = _require_ready(args.input)
    model, links = generate_skeleton(doc)
    _write_text(args.out, _render(model, links, args.format))
    return EXIT_OK


def _compute_bindings(args: argparse.Namespace, model: BpmnModel, doc: RequirementsDocument):
    if args.bindings is not None:
        try:
            return jsonio.bindings_from_json(_read_text(args.bindings))
        except jsonio.SchemaError as exc:
            print(f"error: {args.bindings}: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_VALIDATION)
    return bind_by_name(model, doc)


def cmd_expand(args: argparse.Namespace) -> int:
    doc = _require_ready(args.input)
    model, links = generate_skeleton(doc)
    bindings = _compute_bindings(args, model, doc)
    unresolved = unresolved_root_groups(model, doc, bindings)
    if unresolved and not args.allow_unbound_groups:
        for pid, group in unresolved:
            print(f"error: unresolved group {group!r} for participant {pid!r}; "
                  "bind it or pass --allow-unbound-groups", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        expanded, local_links = expand(model, doc, bindings)
    except (BindingError, ExpansionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    all_links = links + local_links
    _write_text(args.out, _render(expanded, all_links, args.format))
    report = check_completeness(doc, all_links, expanded)
    if args.coverage_out:
        _write_text(args.coverage_out, jsonio.canonical_json(report.to_dict()))
    print(report.to_text(), file=sys.stderr, end="")
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    doc, failed = _load_document(args.input)
    if failed:
        return EXIT_VALIDATION
    try:
        model, links = jsonio.from_json(_read_text(args.model))
    except jsonio.SchemaError as exc:
        print(f"error: {args.model}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = check_completeness(doc, links, model)
    if args.json:
        sys.stdout.write(jsonio.canonical_json(report.to_dict()))
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK if report.complete else EXIT_VALIDATION


def cmd_export(args: argparse.Namespace) -> int:
    try:
        model, links = jsonio.from_json(_read_text(args.model))
    except jsonio.SchemaError as exc:
        print(f"error: {args.model}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _write_text(args.out, _render(model, links, args.format))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    data_dir = Path(args.data_dir or os.environ.get("CHORDA_DATA_DIR", "."))
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create data dir {data_dir}: {exc}", file=sys.stderr)
        return EXIT_IO
    uvicorn.run(create_app(data_dir), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chorda", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and validate requirement files")
    p_check.add_argument("paths", nargs="+", metavar="FILE")
    p_check.set_defaults(func=cmd_check)

    p_skeleton = sub.add_parser("skeleton", help="generate the interaction skeleton")
    p_skeleton.add_argument("input", metavar="FILE")
    p_skeleton.add_argument("--out", metavar="PATH", default=None, help="output file (default: stdout)")
    p_skeleton.add_argument("--format", choices=("json", "xpdl", "svg"), default="json")
    p_skeleton.set_defaults(func=cmd_skeleton)

    p_expand = sub.add_parser("expand", help="expand local statements into the skeleton")
    p_expand.add_argument("input", metavar="FILE")
    group = p_expand.add_mutually_exclusive_group()
    group.add_argument("--bind-by-name", action="store_true", default=True,
                       help="bind groups to like-named sub-processes (default)")
    group.add_argument("--bindings", metavar="PATH", default=None, help="bindings JSON file")
    p_expand.add_argument("--allow-unbound-groups", action="store_true",
                          help="attach unbound groups at pool level instead of failing")
    p_expand.add_argument("--out", metavar="PATH", default=None)
    p_expand.add_argument("--coverage-out", metavar="PATH", default=None)
    p_expand.add_argument("--format", choices=("json", "xpdl", "svg"), default="json")
    p_expand.set_defaults(func=cmd_expand)

    p_trace = sub.add_parser("trace", help="check completeness of a model against requirements")
    p_trace.add_argument("input", metavar="FILE")
    p_trace.add_argument("model", metavar="MODEL_JSON")
    p_trace.add_argument("--json", action="store_true", help="emit the report as JSON")
    p_trace.set_defaults(func=cmd_trace)

    p_export = sub.add_parser("export", help="convert a model JSON file to another format")
    p_export.add_argument("model", metavar="MODEL_JSON")
    p_export.add_argument("--out", metavar="PATH", default=None)
    p_export.add_argument("--format", choices=("json", "xpdl", "svg"), default="xpdl")
    p_export.set_defaults(func=cmd_export)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8469)
    p_serve.add_argument("--data-dir", default=None, help="defaults to $CHORDA_DATA_DIR or the cwd")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
