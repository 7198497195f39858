"""Preprocessing and tokenization of Verilog source text."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


class FrontendError(Exception):
    """A source-level problem (syntax, unsupported construct, conflicting definitions)."""

    def __init__(self, message: str, loc: "SrcLoc | None" = None):
        self.loc = loc
        super().__init__(f"{loc}: {message}" if loc else message)


@dataclass(frozen=True)
class SrcLoc:
    file: str
    line: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}"


@dataclass(frozen=True)
class Token:
    kind: str  # id, sysid, num, str, op, kw, eof
    text: str
    loc: SrcLoc


KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "wor", "wand",
    "uwire", "tri", "triand", "trior", "supply0", "supply1", "integer", "real", "realtime",
    "time", "parameter", "localparam", "signed", "unsigned", "assign", "always", "initial",
    "begin", "end", "if", "else", "case", "casex", "casez", "endcase", "default",
    "posedge", "negedge", "or", "for", "while", "forever", "repeat", "function",
    "endfunction", "task", "endtask", "generate", "endgenerate", "genvar", "defparam",
    "wait", "fork", "join", "disable", "buf", "not", "and", "nand", "nor", "xor", "xnor",
    "logic", "always_ff", "always_comb", "always_latch", "specify", "endspecify",
}

_OPS = sorted(
    """<<< >>> === !== == != <= >= && || << >> ** ~& ~| ~^ ^~ +: -: -> ->>
    + - * / % & | ^ ~ ! < > = ? : ; , . ( ) [ ] { } @ #""".split(),
    key=len,
    reverse=True,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<attr>\(\*(?!\s*\)).*?\*\))
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<num>(?:\d[\d_]*)?\s*'\s*[sS]?[bBoOdDhH]\s*[0-9a-fA-FxXzZ?_]+|\d[\d_]*\.\d+(?:[eE][+-]?\d+)?|\d[\d_]*)
  | (?P<sysid>\$[A-Za-z_][\w$]*)
  | (?P<id>[A-Za-z_][\w$]*|\\\S+)
  | (?P<op>"""
    + "|".join(re.escape(o) for o in _OPS)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)

_DIRECTIVE_RE = re.compile(r"`(\w+)")


def preprocess(path: str | Path, defines: dict[str, str] | None = None,
               _depth: int = 0) -> list[tuple[str, SrcLoc]]:
    """Expand `define/`include/`ifdef; returns source lines tagged with origins."""
    path = Path(path)
    if _depth > 16:
        raise FrontendError(f"include nesting too deep at {path}")
    defines = {} if defines is None else defines
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FrontendError(f"cannot read {path}: {e.strerror}") from None
    out: list[tuple[str, SrcLoc]] = []
    stack: list[bool] = []  # active flags for nested `ifdef
    active = True
    lines = raw.split("\n")
    for n, line in enumerate(lines, 1):
        loc = SrcLoc(path.name, n)
        stripped = line.strip()
        m = re.match(r"`(ifdef|ifndef|else|elsif|endif)\b\s*(\w*)", stripped)
        if m:
            kind, name = m.groups()
            if kind in ("ifdef", "ifndef"):
                stack.append(active)
                cond = (name in defines) == (kind == "ifdef")
                active = active and cond
                stack.append(cond)
            elif kind in ("else", "elsif"):
                if len(stack) < 2:
                    raise FrontendError(f"`{kind} without `ifdef", loc)
                taken = stack.pop()
                outer = stack[-1]
                cond = not taken and (kind == "else" or name in defines)
                active = outer and cond
                stack.append(taken or cond)
            else:
                if len(stack) < 2:
                    raise FrontendError("`endif without `ifdef", loc)
                stack.pop()
                active = stack.pop()
            out.append(("", loc))
            continue
        if not active:
            out.append(("", loc))
            continue
        m = re.match(r"`define\s+(\w+)(.*)$", stripped)
        if m:
            body = re.sub(r"//.*$", "", m.group(2)).strip()
            defines[m.group(1)] = body
            out.append(("", loc))
            continue
        m = re.match(r'`include\s+"([^"]+)"', stripped)
        if m:
            inc = path.parent / m.group(1)
            out.extend(preprocess(inc, defines, _depth + 1))
            continue
        if re.match(r"`(timescale|resetall|celldefine|endcelldefine|default_nettype)\b", stripped):
            out.append(("", loc))
            continue

        def expand(mm: re.Match, loc=loc) -> str:
            name = mm.group(1)
            if name not in defines:
                raise FrontendError(f"undefined macro `{name}", loc)
            return defines[name]

        for _ in range(8):
            new = _DIRECTIVE_RE.sub(expand, line)
            if new == line:
                break
            line = new
        out.append((line, loc))
    if stack:
        raise FrontendError(f"unterminated `ifdef in {path.name}")
    return out


def tokenize(lines: list[tuple[str, SrcLoc]]) -> list[Token]:
    """Tokenize preprocessed lines. Block comments may span lines."""
    text = "\n".join(l for l, _ in lines)
    locs = [loc for _, loc in lines] or [SrcLoc("<empty>", 1)]
    toks: list[Token] = []
    pos, line_idx = 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        loc = locs[min(line_idx, len(locs) - 1)]
        if not m:
            raise FrontendError(f"unexpected character {text[pos]!r}", loc)
        kind, val = m.lastgroup, m.group()
        if kind in ("id",) and val in KEYWORDS:
            kind = "kw"
        if kind == "id" and val.startswith("\\"):
            val = val[1:]
        if kind not in ("ws", "nl", "lcomment", "bcomment", "attr"):
            if kind == "num":
                val = re.sub(r"\s+", "", val)
            toks.append(Token(kind, val, loc))
        line_idx += m.group().count("\n")
        pos = m.end()
    toks.append(Token("eof", "", locs[-1]))
    return toks
