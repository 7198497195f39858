"""Command-line front end: ``hdlscope compile | run | list``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .builtin import default_registry, dump_lines
from .frontend import FrontendError, compile_files
from .ir import IRError, emit_text, parse_text
from .manager import AnalysisContext, AnalysisFailure, ManagerError, UnknownAnalysisError
from .report import dedup

EXIT_OK, EXIT_REPORTS, EXIT_FAILURE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdlscope", description="Static analysis for Verilog designs.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile Verilog files into one IR file")
    c.add_argument("files", nargs="+", type=Path)
    c.add_argument("-o", "--output", required=True, type=Path)
    c.add_argument("-D", "--define", action="append", default=[], metavar="NAME[=VALUE]")
    c.add_argument("--name", help="design name (default: stem of the first input)")

    r = sub.add_parser("run", help="run analyses on an IR file")
    r.add_argument("analyses", nargs="+")
    r.add_argument("-i", "--input", required=True, type=Path)
    r.add_argument("--opt", action="append", default=[], metavar="NAME=VALUE")
    r.add_argument("--dump", action="append", default=[], metavar="ANALYSIS")
    r.add_argument("--format", choices=("text", "records"), default="text")
    r.add_argument("--plugin", action="append", default=[], metavar="MODULE")

    ls = sub.add_parser("list", help="list registered analyses and their dependencies")
    ls.add_argument("--plugin", action="append", default=[], metavar="MODULE")
    return p


def _err(msg: str) -> None:
    print(f"hdlscope: {msg}", file=sys.stderr)


def cmd_compile(args) -> int:
    defines = {}
    for d in args.define:
        name, _, value = d.partition("=")
        defines[name] = value
    missing = [str(f) for f in args.files if not f.is_file()]
    if missing:
        _err("no such file: " + ", ".join(missing))
        return EXIT_FAILURE
    try:
        result = compile_files(args.files, defines=defines, name=args.name)
    except (FrontendError, IRError) as e:
        _err(str(e))
        return EXIT_REPORTS
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    args.output.write_text(emit_text(result.design), encoding="utf-8")
    return EXIT_OK


def _options(pairs: list[str]) -> dict[str, str]:
    out = {}
    for p in pairs:
        name, sep, value = p.partition("=")
        if not sep or not name:
            raise ValueError(f"--opt expects NAME=VALUE, got {p!r}")
        out[name] = value
    return out


def cmd_run(args) -> int:
    try:
        registry = default_registry(args.plugin)
        options = _options(args.opt)
        design = parse_text(args.input.read_text(encoding="utf-8"))
    except (OSError, ValueError, ImportError, IRError) as e:
        _err(str(e))
        return EXIT_FAILURE
    requested = list(dict.fromkeys(args.analyses + args.dump))
    ctx = AnalysisContext(registry, design, options)
    try:
        ctx.run(requested)
    except UnknownAnalysisError as e:
        _err(f"unknown analysis {e.name!r}; registered analyses:")
        for n in e.known:
            print(f"  {n}", file=sys.stderr)
        return EXIT_FAILURE
    except AnalysisFailure as e:
        _err(str(e))
        return EXIT_FAILURE
    except ManagerError as e:
        _err(str(e))
        return EXIT_FAILURE

    reports = []
    for name in dict.fromkeys(args.analyses):
        result = ctx.result(name)
        if hasattr(result, "reports"):
            reports.extend(result.reports)
        elif name not in args.dump:
            for line in dump_lines(result):
                print(line)
    reports = dedup(reports)
    for r in reports:
        print(r.record() if args.format == "records" else r.text())
    for name in dict.fromkeys(args.dump):
        print(f"== {name} ==")
        for line in dump_lines(ctx.result(name)):
            print(line)
    return EXIT_REPORTS if any(r.severity == "error" for r in reports) else EXIT_OK


def cmd_list(args) -> int:
    try:
        registry = default_registry(args.plugin)
    except ImportError as e:
        _err(str(e))
        return EXIT_FAILURE
    for name in registry.names():
        deps = registry.get(name).deps
        print(f"{name}: {', '.join(sorted(deps))}" if deps else name)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:  # usage errors and --help
        return int(e.code or 0)
    handler = {"compile": cmd_compile, "run": cmd_run, "list": cmd_list}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
