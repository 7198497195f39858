"""Canonical `.qh` text form: emission and parsing.

Layout is fixed so that emission is deterministic: one declaration or
statement per line, two spaces per nesting level, attributes after the
terminating semicolon of their owner (or before the brace of a block).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..bitvec import BINARY_OPS, UNARY_OPS, BitVecError, LogicVec, parse_literal
from .nodes import (
    Access,
    ArrayType,
    Assign,
    BitType,
    Case,
    CaseArm,
    Compute,
    ConstDecl,
    Design,
    Event,
    Func,
    Goto,
    Guard,
    If,
    IndexedSel,
    InstModule,
    Invoke,
    IRError,
    Label,
    ModuleDef,
    NET_KINDS,
    NetDecl,
    Pass,
    Proc,
    Range,
    RealType,
    Receive,
    Return,
    Syscall,
    Type,
    VarDecl,
)

IND = "  "


# ------------------------------------------------------------ emission


def _fmt_value(v) -> str:
    if isinstance(v, LogicVec):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return json.dumps(str(v), ensure_ascii=False)


def fmt_attrs(attrs: dict) -> str:
    if not attrs:
        return ""
    body = ", ".join(f"{k} = {_fmt_value(v)}" for k, v in attrs.items())
    return f"(* {body} *)"


def _suffix(attrs: dict) -> str:
    a = fmt_attrs(attrs)
    return f" {a}" if a else ""


def _fmt_guard(g: Guard) -> str:
    events = " or ".join(str(e) for e in g.events)
    if g.kind == "delay":
        return f"#{g.amount};"
    if g.kind == "repeat":
        return f"repeat ({g.amount}) @({events});"
    return f"@({events});"


def fmt_stmt(s) -> str:
    """One statement without indentation (labels included)."""
    if isinstance(s, Label):
        return f"{s.name}:"
    if isinstance(s, Assign):
        text = f"{s.lhs} {s.op} {s.rhs};"
    elif isinstance(s, Guard):
        text = _fmt_guard(s)
    elif isinstance(s, If):
        text = f"if {s.cond} goto {s.target};"
    elif isinstance(s, Case):
        parts = [f"{a.pattern}: goto {a.target};" for a in s.arms]
        if s.default is not None:
            parts.append(f"default: goto {s.default};")
        text = f"{s.kind} {s.subject} {{ {' '.join(parts)} }}" if parts else f"{s.kind} {s.subject} {{ }}"
    elif isinstance(s, Goto):
        text = f"goto {s.target};"
    elif isinstance(s, Invoke):
        text = f"invoke {s.callee}({', '.join(s.params)});"
    elif isinstance(s, Receive):
        text = f"receive({', '.join(s.params)});"
    elif isinstance(s, Syscall):
        text = f"syscall {s.name}({', '.join(s.ins)})"
        if s.outs:
            text += f" -> ({', '.join(s.outs)})"
        text += ";"
    elif isinstance(s, Return):
        text = "return;"
    elif isinstance(s, Pass):
        text = "pass;"
    else:
        raise IRError(f"cannot emit {type(s).__name__}")
    return text + _suffix(s.attrs)


def _emit_signal(d, out: list[str], depth: int):
    prefix = f"{d.direction} " if d.direction else ""
    kind = d.kind if isinstance(d, NetDecl) else "var"
    out.append(f"{IND * depth}{prefix}{kind} {d.id} : {d.ty};{_suffix(d.attrs)}")


def _emit_const(c: ConstDecl, out: list[str], depth: int):
    out.append(f"{IND * depth}const {c.id} = {_fmt_value(c.value)};{_suffix(c.attrs)}")


def _emit_body(stmts, out: list[str], depth: int):
    for s in stmts:
        out.append(IND * depth + fmt_stmt(s))


def emit_text(d: Design) -> str:
    out = [f"design {d.name}{_suffix(d.attrs)};"]
    for m in d.modules:
        attrs = dict(m.attrs)
        if m.port_order:
            attrs["portOrder"] = " ".join(m.port_order)
        out.append(f"module {m.name}{_suffix(attrs)} {{")
        for n in m.nets:
            _emit_signal(n, out, 1)
        for v in m.vars:
            _emit_signal(v, out, 1)
        for c in m.consts:
            _emit_const(c, out, 1)
        for i in m.instances:
            out.append(f"{IND}inst {i.id} : {i.module};{_suffix(i.attrs)}")
        for p in m.procs:
            out.append(f"{IND}proc{_suffix(p.attrs)} {{")
            _emit_body(p.statements, out, 2)
            out.append(IND + "}")
        for f in m.funcs:
            sig = f"func {f.id}({', '.join(f.inputs)}) -> ({', '.join(f.outputs)})"
            out.append(f"{IND}{sig}{_suffix(f.attrs)} {{")
            for v in f.vars:
                _emit_signal(v, out, 2)
            for c in f.consts:
                _emit_const(c, out, 2)
            _emit_body(f.statements, out, 2)
            out.append(IND + "}")
        out.append("}")
    return "\n".join(out) + "\n"


# -------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<lit>\d*'[sS]?[bBoOdDhH][0-9a-fA-FxXzZ_?]+)
  | (?P<real>\d+\.\d+(?:[eE][+-]?\d+)?)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)
  | (?P<punct>\(\*|\*\)|->|<=|<-|\+:|-:|[{}()\[\]:;,=?@\#])
    """,
    re.VERBOSE,
)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise IRError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind != "ws":
            toks.append(Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


# ------------------------------------------------------------- parsing

_TYPE_RE = re.compile(r"^([us])(\d+)$")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Tok | None = None) -> IRError:
        t = tok or self.tok
        return IRError(msg, t.line, t.col)

    def next(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "id")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def ident(self, allow_dots: bool = False) -> str:
        t = self.tok
        if t.kind != "id":
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        if "." in t.text and not allow_dots:
            raise self.error(f"hierarchical name {t.text!r} not allowed here")
        self.i += 1
        return t.text

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            raise self.error(f"expected integer, found {t.text!r}")
        self.i += 1
        return int(t.text)

    # -- values
    def value(self):
        t = self.next()
        if t.kind == "str":
            return json.loads(t.text)
        if t.kind == "real":
            return float(t.text)
        if t.kind in ("lit", "int"):
            try:
                return parse_literal(t.text)
            except BitVecError as e:
                raise self.error(str(e), t) from None
        raise self.error(f"expected a value, found {t.text!r}", t)

    def attrs(self) -> dict:
        out: dict = {}
        if not self.accept("(*"):
            return out
        while True:
            key_tok = self.tok
            key = self.ident()
            self.expect("=")
            if key in out:
                raise self.error(f"duplicate attribute key {key!r}", key_tok)
            out[key] = self.value()
            if self.accept("*)"):
                return out
            self.expect(",")

    def type_(self) -> Type:
        t = self.tok
        name = self.ident()
        if name == "real":
            ty: Type = RealType()
        else:
            m = _TYPE_RE.match(name)
            if not m or int(m.group(2)) < 1:
                raise self.error(f"bad type {name!r}", t)
            ty = BitType(int(m.group(2)), m.group(1) == "s")
        while self.accept("["):
            ty = ArrayType(ty, self.integer())
            self.expect("]")
        return ty

    # -- structures
    def design(self) -> Design:
        self.expect("design")
        name = self.ident()
        attrs = self.attrs()
        self.expect(";")
        d = Design(name, [], attrs)
        while self.at("module"):
            d.modules.append(self.module())
        if self.tok.kind != "eof":
            raise self.error(f"expected 'module', found {self.tok.text!r}")
        return d

    def module(self) -> ModuleDef:
        self.expect("module")
        m = ModuleDef(self.ident())
        m.attrs = self.attrs()
        order = m.attrs.pop("portOrder", None)
        self.expect("{")
        while not self.accept("}"):
            t = self.tok
            if t.text in ("input", "output") or t.text in NET_KINDS or t.text == "var":
                decl = self.signal_decl()
                (m.nets if isinstance(decl, NetDecl) else m.vars).append(decl)
            elif t.text == "const":
                m.consts.append(self.const_decl())
            elif t.text == "inst":
                self.next()
                iid = self.ident()
                self.expect(":")
                mod = self.ident()
                self.expect(";")
                m.instances.append(InstModule(iid, mod, self.attrs()))
            elif t.text == "proc":
                self.next()
                attrs = self.attrs()
                self.expect("{")
                m.procs.append(Proc(self.statements(), attrs))
            elif t.text == "func":
                m.funcs.append(self.func())
            else:
                raise self.error(f"unexpected {t.text or 'end of input'!r} in module body")
        if isinstance(order, str):
            m.port_order = tuple(order.split())
        return m

    def signal_decl(self):
        direction = None
        if self.tok.text in ("input", "output"):
            direction = self.next().text
        kind = self.ident()
        if kind != "var" and kind not in NET_KINDS:
            raise self.error(f"unknown net kind {kind!r}")
        name = self.ident()
        self.expect(":")
        ty = self.type_()
        self.expect(";")
        attrs = self.attrs()
        if kind == "var":
            return VarDecl(name, ty, direction, attrs)
        return NetDecl(name, kind, ty, direction, attrs)

    def const_decl(self) -> ConstDecl:
        self.expect("const")
        name = self.ident()
        self.expect("=")
        val = self.value()
        if isinstance(val, str):
            raise self.error("constants must be bit vectors or reals")
        self.expect(";")
        return ConstDecl(name, val, self.attrs())

    def func(self) -> Func:
        self.expect("func")
        f = Func(self.ident())
        f.inputs = self.id_list()
        self.expect("->")
        f.outputs = self.id_list()
        f.attrs = self.attrs()
        self.expect("{")
        while self.at("var"):
            f.vars.append(self.signal_decl())
        while self.at("const"):
            f.consts.append(self.const_decl())
        f.statements = self.statements()
        return f

    def id_list(self) -> tuple[str, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.ident(True))
            while self.accept(","):
                out.append(self.ident(True))
        self.expect(")")
        return tuple(out)

    # -- statements
    def statements(self) -> list:
        out = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated block")
            out.append(self.statement())
        return out

    def statement(self):
        t = self.tok
        if t.kind == "id" and self.peek().text == ":" and "." not in t.text:
            self.i += 2
            return Label(t.text)
        if t.text == "@" or t.text == "#" or (t.text == "repeat" and self.peek().text == "("):
            s = self.guard()
        elif t.text == "if" and self.peek().kind == "id" and self.peek(2).text == "goto":
            self.next()
            cond = self.ident()
            self.expect("goto")
            s = If(cond, self.ident())
            self.expect(";")
        elif t.text in ("case", "casex", "casez") and self.peek().kind == "id" and self.peek(2).text == "{":
            return self.case()
        elif t.text == "goto" and self.peek().kind == "id" and self.peek(2).text == ";":
            self.next()
            s = Goto(self.ident())
            self.expect(";")
        elif t.text == "invoke" and self.peek().kind == "id" and self.peek(2).text == "(":
            self.next()
            callee = self.ident(True)
            s = Invoke(callee, self.id_list())
            self.expect(";")
        elif t.text == "receive" and self.peek().text == "(":
            self.next()
            s = Receive(self.id_list())
            self.expect(";")
        elif t.text == "syscall" and self.peek().kind == "id" and self.peek(2).text == "(":
            self.next()
            name = self.ident()
            ins = self.id_list()
            outs = self.id_list() if self.accept("->") else ()
            s = Syscall(name, ins, outs)
            self.expect(";")
        elif t.text in ("return", "pass") and self.peek().text == ";":
            self.i += 2
            s = Return() if t.text == "return" else Pass()
        else:
            s = self.assign()
        s.attrs = self.attrs()
        return s

    def guard(self) -> Guard:
        if self.accept("#"):
            g = Guard("delay", (), self.ident())
        elif self.accept("repeat"):
            self.expect("(")
            amount = self.ident()
            self.expect(")")
            self.expect("@")
            g = Guard("repeat", self.events(), amount)
        else:
            self.expect("@")
            g = Guard("event", self.events())
        self.expect(";")
        return g

    def events(self) -> tuple[Event, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                edge = None
                if self.tok.text in ("posedge", "negedge") and self.peek().kind == "id":
                    edge = self.next().text
                out.append(Event(edge, self.access()))
                if not self.accept("or"):
                    break
        self.expect(")")
        return tuple(out)

    def case(self) -> Case:
        kind = self.next().text
        subject = self.ident()
        self.expect("{")
        arms, default = [], None
        while not self.accept("}"):
            if self.accept("default"):
                self.expect(":")
                self.expect("goto")
                default = self.ident()
            else:
                pat = self.value()
                if not isinstance(pat, LogicVec):
                    raise self.error("case patterns must be bit vectors")
                self.expect(":")
                self.expect("goto")
                arms.append(CaseArm(pat, self.ident()))
            self.expect(";")
        return Case(kind, subject, tuple(arms), default, self.attrs())

    def access(self) -> Access:
        name = self.ident(True)
        index = sel = None
        if self.at("[") and self.peek().kind == "id" and self.peek(2).text == "]":
            self.next()
            index = self.ident()
            self.expect("]")
        if self.accept("["):
            if self.tok.kind == "int":
                hi = self.integer()
                self.expect(":")
                lo = self.integer()
                if hi < lo:
                    raise self.error(f"selector [{hi}:{lo}] must have m >= n")
                sel = Range(hi, lo)
            else:
                base = self.ident()
                desc = self.tok.text == "-:"
                if not (self.accept("+:") or self.accept("-:")):
                    raise self.error("expected '+:' or '-:' in part-select")
                sel = IndexedSel(base, self.integer(), desc)
            self.expect("]")
        return Access(name, index, sel)

    def assign(self) -> Assign:
        start = self.tok
        lhs = self.access()
        if self.tok.text not in ("=", "<=", "<-") or self.tok.kind != "punct":
            raise self.error(f"expected statement, found {start.text!r}", start)
        op = self.next().text
        t = self.tok
        nxt = self.peek()
        if t.kind == "id" and nxt.text == "?":
            c = self.ident()
            self.expect("?")
            a = self.ident()
            self.expect(":")
            rhs = Compute("mux", (c, a, self.ident()))
        elif t.text in ("zext", "sext", "cast") and nxt.kind == "id" and self.peek(2).text == "to":
            self.next()
            a = self.ident()
            self.expect("to")
            rhs = Compute(t.text, (a,), self.type_())
        elif t.text in UNARY_OPS and nxt.kind == "id" and self.peek(2).text == ";":
            self.next()
            rhs = Compute(t.text, (self.ident(),))
        elif t.text in BINARY_OPS and nxt.kind == "id" and self.peek(2).kind == "id":
            self.next()
            rhs = Compute(t.text, (self.ident(), self.ident()))
        else:
            rhs = self.access()
        self.expect(";")
        return Assign(op, lhs, rhs)


def parse_text(text: str) -> Design:
    """Parse `.qh` text; raises :class:`IRError` with line/column on failure.

    The result is also validated, so unresolved labels and duplicate
    identifiers are reported here.
    """
    from .validate import validate

    design = _Parser(text).design()
    problems = validate(design)
    if problems:
        raise IRError("; ".join(problems))
    return design


def parse_text_unchecked(text: str) -> Design:
    return _Parser(text).design()
