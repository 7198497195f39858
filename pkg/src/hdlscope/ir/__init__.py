"""Hierarchical three-address-code IR with a canonical text form."""

from .nodes import *  # noqa: F401,F403
from .nodes import IRError
from .text import emit_text, fmt_stmt, parse_text, parse_text_unchecked
from .validate import Resolved, resolve, validate

__all__ = [
    "IRError", "emit_text", "fmt_stmt", "parse_text", "parse_text_unchecked",
    "Resolved", "resolve", "validate",
]
