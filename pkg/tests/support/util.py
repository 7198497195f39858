"""Shared helpers for compiling snippets and running analyses in tests."""

from __future__ import annotations

from pathlib import Path

from hdlscope.builtin import default_registry
from hdlscope.frontend import compile_files, compile_source
from hdlscope.manager import AnalysisContext

ROOT = Path(__file__).resolve().parents[2]
CORPUS = ROOT / "corpus"


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.v"))


def design_of(src: str | Path):
    if isinstance(src, Path):
        return compile_files([src]).design
    return compile_source(src).design


def analyze(src: str | Path, *names: str, options: dict | None = None) -> AnalysisContext:
    """Compile ``src`` (Verilog text or a file) and run ``names``."""
    ctx = AnalysisContext(default_registry(), design_of(src), dict(options or {}))
    return ctx.run(names)


def reports(src: str | Path, name: str, options: dict | None = None):
    return analyze(src, name, options=options).result(name).reports


def fixture(name: str) -> Path:
    return CORPUS / name
