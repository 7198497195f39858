"""Verilog front end: preprocess, parse and elaborate source files into IR."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..ir import Design, validate
from .elaborate import Elaborator, Warning_
from .lexer import FrontendError, SrcLoc, preprocess, tokenize
from .parser import parse_source

__all__ = ["CompileResult", "FrontendError", "SrcLoc", "compile_files", "compile_source"]


@dataclass
class CompileResult:
    design: Design
    warnings: list[Warning_] = field(default_factory=list)


def compile_files(paths, defines: dict[str, str] | None = None, name: str | None = None) -> CompileResult:
    """Compile Verilog files into one validated IR design.

    The design is named after the first file unless ``name`` is given.
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise FrontendError("no input files")
    modules, order = [], []
    for p in paths:
        for m in parse_source(tokenize(preprocess(p, dict(defines or {})))):
            modules.append(m)
            order.append(m.name)
    elab = Elaborator(modules)
    mods = elab.run(list(dict.fromkeys(order)))
    design = Design(name or paths[0].stem, mods)
    problems = validate(design)
    if problems:
        raise FrontendError("internal lowering error: " + "; ".join(problems))
    return CompileResult(design, elab.warnings)


def compile_source(text: str, filename: str = "input.v", **kw) -> CompileResult:
    """Compile Verilog given as a string (written to a temporary file)."""
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / filename
        path.write_text(text, encoding="utf-8")
        return compile_files([path], **kw)
