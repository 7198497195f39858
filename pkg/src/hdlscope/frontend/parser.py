"""Recursive-descent parser for the supported Verilog subset."""

from __future__ import annotations

from ..bitvec import BitVecError, parse_literal
from . import ast as A
from .lexer import FrontendError, Token

NET_KEYWORDS = {"wire", "wor", "wand", "uwire", "tri", "triand", "trior", "supply0", "supply1"}
GATES = {"buf", "not", "and", "nand", "or", "nor", "xor", "xnor"}
_REJECTED_ITEMS = {
    "generate": "generate blocks",
    "genvar": "generate blocks",
    "function": "functions",
    "task": "tasks",
    "defparam": "defparam",
    "specify": "specify blocks",
    "inout": "inout ports",
    "real": "real arithmetic",
    "realtime": "real arithmetic",
    "logic": "SystemVerilog declarations",
    "always_ff": "SystemVerilog always_ff",
    "always_comb": "SystemVerilog always_comb",
    "always_latch": "SystemVerilog always_latch",
}
_REJECTED_STMTS = {
    "while": "while loops",
    "forever": "forever loops",
    "repeat": "repeat loops",
    "wait": "wait statements",
    "fork": "fork/join",
    "disable": "disable statements",
}

# binary precedence, loosest first
_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^", "^~", "~^"],
    ["&"],
    ["==", "!=", "===", "!=="],
    ["<", "<=", ">", ">="],
    ["<<", ">>", "<<<", ">>>"],
    ["+", "-"],
    ["*", "/", "%"],
    ["**"],
]
_UNARY = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"}


class Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise FrontendError(f"expected {text!r}, found {self.tok.text or 'end of file'!r}", self.tok.loc)
        return self.next()

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            raise FrontendError(f"expected identifier, found {t.text or 'end of file'!r}", t.loc)
        self.i += 1
        return t.text

    def reject(self, what: str, tok: Token | None = None):
        t = tok or self.tok
        raise FrontendError(f"unsupported construct: {what}", t.loc)

    # -- top level
    def source(self) -> list[A.ModuleAst]:
        mods = []
        while self.tok.kind != "eof":
            if self.at("module"):
                mods.append(self.module())
            else:
                raise FrontendError(f"expected 'module', found {self.tok.text!r}", self.tok.loc)
        return mods

    def module(self) -> A.ModuleAst:
        loc = self.expect("module").loc
        name = self.ident()
        mod = A.ModuleAst(name, [], [], loc)
        if self.accept("#"):
            self.expect("(")
            if not self.at(")"):
                while True:
                    local = False
                    if self.at("parameter", "localparam"):
                        local = self.next().text == "localparam"
                    mod.items.extend(self.param_assignments(local))
                    if not self.accept(","):
                        break
            self.expect(")")
        if self.accept("("):
            if not self.at(")"):
                self.port_list(mod)
            self.expect(")")
        self.expect(";")
        while not self.at("endmodule"):
            if self.tok.kind == "eof":
                raise FrontendError(f"missing endmodule for {name}", loc)
            self.module_item(mod)
        self.expect("endmodule")
        return mod

    def port_list(self, mod: A.ModuleAst):
        if self.at("input", "output", "inout"):
            direction = kind = None
            signed, rng = False, None
            while True:
                if self.at("inout"):
                    self.reject("inout ports")
                if self.at("input", "output"):
                    direction = self.next().text
                    kind, signed, rng = self.decl_type(default="wire")
                t = self.tok
                pname = self.ident()
                mod.port_names.append(pname)
                mod.items.append(A.SignalDecl(pname, kind, direction, signed, rng, None, None, t.loc))
                if not self.accept(","):
                    break
        else:
            while True:
                mod.port_names.append(self.ident())
                if not self.accept(","):
                    break

    def decl_type(self, default: str):
        kind = default
        if self.tok.text in NET_KEYWORDS or self.at("reg", "integer"):
            kind = self.next().text
        elif self.at("real", "realtime", "logic"):
            self.reject(_REJECTED_ITEMS[self.tok.text])
        signed = False
        if self.accept("signed"):
            signed = True
        elif self.accept("unsigned"):
            pass
        rng = self.range_spec() if self.at("[") else None
        return kind, signed, rng

    def range_spec(self) -> A.RangeSpec:
        self.expect("[")
        msb = self.expr()
        self.expect(":")
        lsb = self.expr()
        self.expect("]")
        return A.RangeSpec(msb, lsb)

    def param_assignments(self, local: bool) -> list[A.ParamDecl]:
        if self.at("integer"):
            self.next()
        signed = self.accept("signed")
        rng = self.range_spec() if self.at("[") else None
        out = []
        while True:
            t = self.tok
            pname = self.ident()
            self.expect("=")
            out.append(A.ParamDecl(pname, local, rng, signed, self.expr(), t.loc))
            # inside a #( ) list the next comma may start a new `parameter`
            if not (self.at(",") and self.peek().kind == "id" and self.peek(2).text == "="):
                break
            self.next()
        return out

    def module_item(self, mod: A.ModuleAst):
        t = self.tok
        if t.kind == "kw" and t.text in _REJECTED_ITEMS:
            self.reject(_REJECTED_ITEMS[t.text])
        if self.at("input", "output"):
            direction = self.next().text
            kind, signed, rng = self.decl_type(default="wire")
            self.signal_names(mod, kind, direction, signed, rng)
        elif self.at("reg", "integer") or t.text in NET_KEYWORDS:
            kind, signed, rng = self.decl_type(default="wire")
            if kind == "integer" and rng is None:
                signed = True
            self.signal_names(mod, kind, None, signed, rng)
        elif self.at("parameter", "localparam"):
            local = self.next().text == "localparam"
            mod.items.extend(self.param_assignments(local))
            self.expect(";")
        elif self.at("assign"):
            self.next()
            if self.accept("#"):
                self.primary()
            while True:
                loc = self.tok.loc
                lhs = self.lvalue()
                self.expect("=")
                mod.items.append(A.ContAssign(lhs, self.expr(), loc))
                if not self.accept(","):
                    break
            self.expect(";")
        elif self.at("always"):
            self.next()
            mod.items.append(A.AlwaysBlock(self.stmt_or_null(), t.loc))
        elif self.at("initial"):
            self.next()
            mod.items.append(A.InitialBlock(self.stmt_or_null(), t.loc))
        elif t.kind == "kw" and t.text in GATES:
            self.gate_instances(mod)
        elif t.kind == "id":
            self.instances(mod)
        elif self.accept(";"):
            pass
        else:
            raise FrontendError(f"unexpected {t.text!r} in module body", t.loc)

    def signal_names(self, mod, kind, direction, signed, rng):
        while True:
            t = self.tok
            sname = self.ident()
            array = self.range_spec() if self.at("[") else None
            init = None
            if self.accept("="):
                init = self.expr()
            mod.items.append(A.SignalDecl(sname, kind, direction, signed, rng, array, init, t.loc))
            if not self.accept(","):
                break
        self.expect(";")

    def gate_instances(self, mod):
        gate = self.next().text
        while True:
            loc = self.tok.loc
            gname = self.ident() if self.tok.kind == "id" else None
            self.expect("(")
            conns = [self.expr()]
            while self.accept(","):
                conns.append(self.expr())
            self.expect(")")
            mod.items.append(A.GateInst(gate, gname, conns, loc))
            if not self.accept(","):
                break
        self.expect(";")

    def connections(self) -> list[A.PortConn]:
        self.expect("(")
        conns: list[A.PortConn] = []
        if self.at(")"):
            self.next()
            return conns
        while True:
            loc = self.tok.loc
            if self.accept("."):
                pname = self.ident()
                self.expect("(")
                e = None if self.at(")") else self.expr()
                self.expect(")")
                conns.append(A.PortConn(pname, e, loc))
            elif self.at(",", ")"):
                conns.append(A.PortConn(None, None, loc))
            else:
                conns.append(A.PortConn(None, self.expr(), loc))
            if not self.accept(","):
                break
        self.expect(")")
        return conns

    def instances(self, mod):
        mname = self.ident()
        params: list[A.PortConn] = []
        if self.accept("#"):
            if self.at("("):
                params = self.connections()
            else:
                params = [A.PortConn(None, self.primary(), self.tok.loc)]
        while True:
            loc = self.tok.loc
            iname = self.ident()
            if self.at("["):
                self.reject("instance arrays")
            conns = self.connections()
            mod.items.append(A.Instance(mname, iname, params, conns, loc))
            if not self.accept(","):
                break
        self.expect(";")

    # -- statements
    def stmt_or_null(self) -> A.Stmt | None:
        if self.accept(";"):
            return None
        return self.statement()

    def statement(self) -> A.Stmt:
        t = self.tok
        if t.kind == "kw" and t.text in _REJECTED_STMTS:
            self.reject(_REJECTED_STMTS[t.text])
        if self.accept("begin"):
            if self.accept(":"):
                self.ident()
            stmts = []
            while not self.accept("end"):
                if self.tok.kind == "eof":
                    raise FrontendError("missing 'end'", t.loc)
                s = self.stmt_or_null()
                if s is not None:
                    stmts.append(s)
            return A.Block(stmts, t.loc)
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.stmt_or_null()
            other = self.stmt_or_null() if self.accept("else") else None
            return A.IfStmt(cond, then, other, t.loc)
        if self.at("case", "casex", "casez"):
            kind = self.next().text
            self.expect("(")
            subject = self.expr()
            self.expect(")")
            items = []
            while not self.accept("endcase"):
                if self.accept("default"):
                    self.accept(":")
                    items.append(A.CaseItem([], self.stmt_or_null()))
                    continue
                exprs = [self.expr()]
                while self.accept(","):
                    exprs.append(self.expr())
                self.expect(":")
                items.append(A.CaseItem(exprs, self.stmt_or_null()))
            return A.CaseStmt(kind, subject, items, t.loc)
        if self.at("@"):
            sens = self.sensitivity()
            return A.EventStmt(sens, self.stmt_or_null(), t.loc)
        if self.accept("#"):
            amount = self.primary()
            return A.DelayStmt(amount, self.stmt_or_null(), t.loc)
        if self.accept("for"):
            self.expect("(")
            init = self.plain_assign()
            self.expect(";")
            cond = self.expr()
            self.expect(";")
            step = self.plain_assign()
            self.expect(")")
            return A.ForStmt(init, cond, step, self.stmt_or_null(), t.loc)
        if t.kind == "sysid":
            self.next()
            args = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
            self.expect(";")
            return A.SysTaskStmt(t.text, args, t.loc)
        s = self.plain_assign(allow_nb=True)
        self.expect(";")
        return s

    def plain_assign(self, allow_nb: bool = False) -> A.AssignStmt:
        loc = self.tok.loc
        lhs = self.lvalue()
        if allow_nb and self.at("<="):
            op = self.next().text
        else:
            op = self.expect("=").text
        if self.accept("#"):
            self.primary()
        if self.at("@"):
            self.reject("intra-assignment event controls")
        return A.AssignStmt(op, lhs, self.expr(), loc)

    def sensitivity(self) -> A.Sensitivity:
        self.expect("@")
        if self.accept("*"):
            return A.Sensitivity([], star=True)
        if self.tok.kind == "id":
            return A.Sensitivity([A.EventExpr(None, self.primary())])
        self.expect("(")
        if self.at("*") and self.peek().text == ")":
            self.i += 2
            return A.Sensitivity([], star=True)
        events = []
        while True:
            edge = None
            if self.at("posedge", "negedge"):
                edge = self.next().text
            events.append(A.EventExpr(edge, self.expr()))
            if not (self.accept("or") or self.accept(",")):
                break
        self.expect(")")
        return A.Sensitivity(events)

    def lvalue(self) -> A.Expr:
        t = self.tok
        if self.at("{"):
            self.next()
            parts = [self.lvalue()]
            while self.accept(","):
                parts.append(self.lvalue())
            self.expect("}")
            return A.Concat(parts, t.loc)
        base: A.Expr = A.Ident(self.ident(), t.loc)
        if self.at("."):
            self.reject("hierarchical references")
        return self.selects(base)

    # -- expressions
    def expr(self) -> A.Expr:
        cond = self.binary(0)
        if self.at("?"):
            loc = self.next().loc
            then = self.expr()
            self.expect(":")
            other = self.expr()
            return A.Ternary(cond, then, other, loc)
        return cond

    def binary(self, level: int) -> A.Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            t = self.next()
            if t.text == "**":
                right = self.binary(level)  # right associative
            else:
                right = self.binary(level + 1)
            left = A.Binary(t.text, left, right, t.loc)
        return left

    def unary(self) -> A.Expr:
        t = self.tok
        if t.kind == "op" and t.text in _UNARY:
            self.next()
            return A.Unary(t.text, self.unary(), t.loc)
        return self.primary()

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "num":
            self.next()
            if "'" not in t.text and "." in t.text:
                return A.RealNum(float(t.text), t.loc)
            try:
                value = parse_literal(t.text.replace("_", "") if "'" not in t.text else t.text)
            except BitVecError as e:
                raise FrontendError(str(e), t.loc) from None
            sized = "'" in t.text and not t.text.startswith("'")
            return A.Number(value, sized, t.loc)
        if t.kind == "str":
            self.next()
            return A.StringLit(t.text[1:-1], t.loc)
        if t.kind == "sysid":
            self.next()
            args = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
            return A.SysCallExpr(t.text, args, t.loc)
        if t.kind == "id":
            self.next()
            if self.at("."):
                self.reject("hierarchical references")
            if self.at("("):
                self.reject(f"function call {t.text}")
            return self.selects(A.Ident(t.text, t.loc))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("{"):
            first = self.expr()
            if self.at("{"):
                self.next()
                parts = [self.expr()]
                while self.accept(","):
                    parts.append(self.expr())
                self.expect("}")
                self.expect("}")
                return A.Replicate(first, parts, t.loc)
            parts = [first]
            while self.accept(","):
                parts.append(self.expr())
            self.expect("}")
            return A.Concat(parts, t.loc)
        raise FrontendError(f"unexpected {t.text or 'end of file'!r} in expression", t.loc)

    def selects(self, base: A.Expr) -> A.Expr:
        while self.at("["):
            loc = self.next().loc
            first = self.expr()
            if self.accept(":"):
                base = A.PartSelect(base, first, self.expr(), loc)
            elif self.at("+:", "-:"):
                desc = self.next().text == "-:"
                base = A.IndexedPart(base, first, self.expr(), desc, loc)
            else:
                base = A.Index(base, first, loc)
            self.expect("]")
        return base


def parse_source(toks: list[Token]) -> list[A.ModuleAst]:
    return Parser(toks).source()
