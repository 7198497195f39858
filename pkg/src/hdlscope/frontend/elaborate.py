"""Elaboration: parameter resolution, declaration processing and lowering to IR.

Every always block, continuous assignment, gate primitive and port connection
becomes one :class:`~hdlscope.ir.Proc`. Expressions are flattened into
three-address form with ``$t`` temporaries and ``$c`` constants, sized by
the usual context-determined rules. Stores truncate implicitly; extensions
are explicit ``zext``/``sext`` computes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bitvec import LogicVec, resize
from ..ir import (
    Access,
    ArrayType,
    Assign,
    BitType,
    Case,
    CaseArm,
    Compute,
    ConstDecl,
    Event,
    Goto,
    Guard,
    If,
    IndexedSel,
    InstModule,
    Label,
    ModuleDef,
    NetDecl,
    Pass,
    Proc,
    Range,
    Syscall,
    VarDecl,
)
from . import ast as A
from .consteval import ConstEnv
from .lexer import FrontendError, SrcLoc

ARITH = {"+": "add", "-": "sub", "*": "mul"}
BITWISE = {"&": "and", "|": "or", "^": "xor", "~^": "xor", "^~": "xor"}
RELATIONAL = {"<": "lt", ">": "gt", "<=": "le", ">=": "ge"}
EQUALITY = {"==": "eq", "!=": "neq", "===": "equiv", "!==": "nequiv"}
REDUCTIONS = {"&": "rand", "|": "ror", "^": "rxor", "~&": "rand", "~|": "ror", "~^": "rxor", "^~": "rxor"}
GATE_OPS = {"and": "&", "nand": "&", "or": "|", "nor": "|", "xor": "^", "xnor": "^"}
VAR_KINDS = ("reg", "integer")
MAX_UNROLL = 4096


@dataclass
class Signal:
    name: str
    width: int
    signed: bool
    msb: int
    lsb: int
    array: tuple[int, int] | None
    kind: str
    direction: str | None
    loc: SrcLoc | None
    implicit: bool = False

    def bit_pos(self, index: int, loc=None) -> int:
        pos = index - self.lsb if self.msb >= self.lsb else self.lsb - index
        if not 0 <= pos < self.width:
            raise FrontendError(f"bit {index} out of range for {self.name}", loc)
        return pos

    def elem_pos(self, index: int, loc=None) -> int:
        first, last = self.array
        pos = index - first if last >= first else first - index
        if not 0 <= pos < abs(last - first) + 1:
            raise FrontendError(f"element {index} out of range for {self.name}", loc)
        return pos

    @property
    def ir_type(self):
        ty = BitType(self.width, self.signed)
        if self.array:
            return ArrayType(ty, abs(self.array[1] - self.array[0]) + 1)
        return ty


@dataclass
class PortInfo:
    name: str
    width: int
    signed: bool
    direction: str


@dataclass
class Warning_:
    message: str
    loc: SrcLoc | None = None

    def __str__(self) -> str:
        return f"{self.loc}: warning: {self.message}" if self.loc else f"warning: {self.message}"


# ------------------------------------------------------------ parameters


def resolve_params(mod: A.ModuleAst, overrides: dict, parent_env: ConstEnv | None = None):
    """Ordered parameter values for ``mod`` with instantiation overrides applied.

    ``overrides`` maps parameter names or positional indices to expressions
    evaluated in ``parent_env``.
    """
    env = ConstEnv()
    kinds: dict[str, str] = {}
    positional = 0
    for item in mod.items:
        if not isinstance(item, A.ParamDecl):
            continue
        override = None
        if not item.local:
            if item.name in overrides:
                override = overrides[item.name]
            elif positional in overrides:
                override = overrides[positional]
            positional += 1
        if override is not None:
            value = (parent_env or ConstEnv()).vec_value(override)
        else:
            value = env.vec_value(item.value)
        if item.range is not None:
            width = abs(env.int_value(item.range.msb) - env.int_value(item.range.lsb)) + 1
            value = resize(value, width, value.signed).with_signed(item.signed)
        elif item.signed and not value.signed:
            value = value.with_signed(True)
        env.values[item.name] = value
        kinds[item.name] = "localparam" if item.local else "parameter"
    return env.values, kinds


def _param_key(values: dict[str, LogicVec]) -> tuple:
    return tuple((k, str(v)) for k, v in values.items())


# ------------------------------------------------------------ helpers


def lvalue_bases(e: A.Expr) -> list[str]:
    if isinstance(e, A.Ident):
        return [e.name]
    if isinstance(e, (A.Index, A.PartSelect, A.IndexedPart)):
        return lvalue_bases(e.base)
    if isinstance(e, A.Concat):
        return [n for p in e.parts for n in lvalue_bases(p)]
    return []


def is_lvalue(e: A.Expr) -> bool:
    if isinstance(e, A.Ident):
        return True
    if isinstance(e, (A.Index, A.PartSelect, A.IndexedPart)):
        return is_lvalue(e.base)
    if isinstance(e, A.Concat):
        return all(is_lvalue(p) for p in e.parts)
    return False


def expr_idents(e, out: list[str]):
    """Identifiers mentioned by an expression, in first-occurrence order."""
    if e is None:
        return
    if isinstance(e, A.Ident):
        out.append(e.name)
    elif isinstance(e, A.Index):
        expr_idents(e.base, out)
        expr_idents(e.index, out)
    elif isinstance(e, A.PartSelect):
        expr_idents(e.base, out)
        expr_idents(e.msb, out)
        expr_idents(e.lsb, out)
    elif isinstance(e, A.IndexedPart):
        expr_idents(e.base, out)
        expr_idents(e.start, out)
        expr_idents(e.width, out)
    elif isinstance(e, A.Unary):
        expr_idents(e.operand, out)
    elif isinstance(e, A.Binary):
        expr_idents(e.left, out)
        expr_idents(e.right, out)
    elif isinstance(e, A.Ternary):
        for x in (e.cond, e.then, e.other):
            expr_idents(x, out)
    elif isinstance(e, A.Concat):
        for p in e.parts:
            expr_idents(p, out)
    elif isinstance(e, A.Replicate):
        expr_idents(e.count, out)
        for p in e.parts:
            expr_idents(p, out)
    elif isinstance(e, A.SysCallExpr):
        for a in e.args:
            expr_idents(a, out)


def lvalue_index_idents(e, out: list[str]):
    """Identifiers read while addressing an lvalue (indices, part-select bases)."""
    if isinstance(e, A.Index):
        lvalue_index_idents(e.base, out)
        expr_idents(e.index, out)
    elif isinstance(e, A.PartSelect):
        lvalue_index_idents(e.base, out)
    elif isinstance(e, A.IndexedPart):
        lvalue_index_idents(e.base, out)
        expr_idents(e.start, out)
    elif isinstance(e, A.Concat):
        for p in e.parts:
            lvalue_index_idents(p, out)


def stmt_reads(s, out: list[str]):
    if s is None:
        return
    if isinstance(s, A.Block):
        for x in s.stmts:
            stmt_reads(x, out)
    elif isinstance(s, A.IfStmt):
        expr_idents(s.cond, out)
        stmt_reads(s.then, out)
        stmt_reads(s.other, out)
    elif isinstance(s, A.CaseStmt):
        expr_idents(s.subject, out)
        for it in s.items:
            for e in it.exprs:
                expr_idents(e, out)
            stmt_reads(it.body, out)
    elif isinstance(s, A.AssignStmt):
        expr_idents(s.rhs, out)
        lvalue_index_idents(s.lhs, out)
    elif isinstance(s, (A.EventStmt, A.DelayStmt)):
        stmt_reads(s.body, out)
    elif isinstance(s, A.SysTaskStmt):
        for a in s.args:
            expr_idents(a, out)
    elif isinstance(s, A.ForStmt):
        stmt_reads(s.body, out)


def stmt_targets(s, out: list[str]):
    if s is None:
        return
    if isinstance(s, A.Block):
        for x in s.stmts:
            stmt_targets(x, out)
    elif isinstance(s, A.IfStmt):
        stmt_targets(s.then, out)
        stmt_targets(s.other, out)
    elif isinstance(s, A.CaseStmt):
        for it in s.items:
            stmt_targets(it.body, out)
    elif isinstance(s, A.AssignStmt):
        out.extend(lvalue_bases(s.lhs))
    elif isinstance(s, (A.EventStmt, A.DelayStmt, A.ForStmt)):
        stmt_targets(s.body, out)


def _unique(names):
    seen, out = set(), []
    for n in names:
        if n not in seen:
            seen.add(n)
            out.append(n)
    return out


class ProcLowerer:
    """Accumulates the statements of one Proc."""

    def __init__(self):
        self.stmts: list = []
        self.labels = 0

    def label(self) -> str:
        name = f"$L{self.labels}"
        self.labels += 1
        return name

    def emit(self, stmt, loc: SrcLoc | None = None):
        if loc is not None and hasattr(stmt, "attrs"):
            stmt.attrs["loc"] = str(loc)
        self.stmts.append(stmt)


# ------------------------------------------------------------ module builder


@dataclass
class InstanceUse:
    item: A.Instance
    child: str  # IR module name
    defined: bool
    connections: list[tuple[str, A.Expr | None]] = field(default_factory=list)


class ModuleBuilder:
    def __init__(self, elab: "Elaborator", ast: A.ModuleAst, params: dict, kinds: dict,
                 ir_name: str, attrs: dict):
        self.elab = elab
        self.ast = ast
        self.env = ConstEnv(params)
        self.ir = ModuleDef(ir_name, dict(attrs))
        if ast.loc is not None:
            self.ir.attrs.setdefault("loc", str(ast.loc))
        self.signals: dict[str, Signal] = {}
        self.const_names: dict[tuple[str, bool], str] = {}
        self.temp_count = 0
        self.instances: list[InstanceUse] = []
        self.proc_items: list = []
        for name, value in params.items():
            self.ir.consts.append(ConstDecl(name, value, {"param": kinds[name]}))
        self._declare()

    # -- declarations
    def _declare(self):
        decls: dict[str, A.SignalDecl] = {}
        merged: dict[str, dict] = {}
        order: list[str] = []
        for item in self.ast.items:
            if not isinstance(item, A.SignalDecl):
                continue
            if item.name in self.env.values:
                raise FrontendError(f"{item.name} is already declared as a parameter", item.loc)
            info = merged.setdefault(item.name, {"kind": None, "direction": None, "signed": False,
                                                 "range": None, "array": None, "loc": item.loc,
                                                 "init": None})
            if item.name not in decls:
                order.append(item.name)
                decls[item.name] = item
            if item.direction:
                if info["direction"] and info["direction"] != item.direction:
                    raise FrontendError(f"conflicting directions for {item.name}", item.loc)
                info["direction"] = item.direction
            if item.kind is not None and item.kind != "wire":
                if info["kind"] not in (None, "wire", item.kind):
                    raise FrontendError(f"{item.name} redeclared as {item.kind}", item.loc)
                info["kind"] = item.kind
            elif item.kind == "wire" and info["kind"] is None:
                info["kind"] = "wire"
            info["signed"] = info["signed"] or item.signed
            if item.range is not None:
                info["range"] = item.range
            if item.array is not None:
                info["array"] = item.array
            if item.init is not None:
                info["init"] = item.init
        for pname in self.ast.port_names:
            if pname not in merged or merged[pname]["direction"] is None:
                raise FrontendError(f"port {pname} of {self.ast.name} has no direction", self.ast.loc)
        for name in order:
            info = merged[name]
            if info["direction"] and name not in self.ast.port_names:
                raise FrontendError(f"{name} is declared as a port but not listed in the port list", info["loc"])
            kind = info["kind"] or "wire"
            if kind == "integer" and info["range"] is None:
                msb, lsb = 31, 0
                info["signed"] = True
            elif info["range"] is not None:
                msb = self.env.int_value(info["range"].msb)
                lsb = self.env.int_value(info["range"].lsb)
            else:
                msb = lsb = 0
            array = None
            if info["array"] is not None:
                array = (self.env.int_value(info["array"].msb), self.env.int_value(info["array"].lsb))
            sig = Signal(name, abs(msb - lsb) + 1, info["signed"], msb, lsb, array, kind,
                         info["direction"], info["loc"])
            self._add_signal(sig)
            if info["init"] is not None:
                self.proc_items.append(A.ContAssign(A.Ident(name, info["loc"]), info["init"], info["loc"]))
        # implicit nets from connections and continuous assignment targets
        for item in self.ast.items:
            names: list[str] = []
            if isinstance(item, A.ContAssign):
                names = lvalue_bases(item.lhs)
            elif isinstance(item, A.Instance):
                for c in item.conns:
                    if isinstance(c.expr, A.Ident):
                        names.append(c.expr.name)
            elif isinstance(item, A.GateInst):
                names = [c.name for c in item.conns if isinstance(c, A.Ident)]
            for n in names:
                if n not in self.signals and n not in self.env.values:
                    loc = getattr(item, "loc", None)
                    self._add_signal(Signal(n, 1, False, 0, 0, None, "wire", None, loc, implicit=True))
        natural = tuple(s.id for s in self.ir.signals() if s.direction)
        if tuple(self.ast.port_names) != natural:
            self.ir.port_order = tuple(self.ast.port_names)
        for item in self.ast.items:
            if isinstance(item, (A.ContAssign, A.AlwaysBlock, A.InitialBlock, A.GateInst, A.Instance)):
                self.proc_items.append(item)

    def _add_signal(self, sig: Signal):
        self.signals[sig.name] = sig
        attrs = {"loc": str(sig.loc)} if sig.loc else {}
        if sig.implicit:
            attrs["implicit"] = "true"
        if sig.kind in VAR_KINDS:
            self.ir.vars.append(VarDecl(sig.name, sig.ir_type, sig.direction, attrs))
        else:
            kind = {"tri": "wire", "supply0": "wire", "supply1": "wire"}.get(sig.kind, sig.kind)
            self.ir.nets.append(NetDecl(sig.name, kind, sig.ir_type, sig.direction, attrs))
        if sig.kind in ("supply0", "supply1"):
            value = A.Number(LogicVec(("1" if sig.kind == "supply1" else "0") * sig.width), True, sig.loc)
            self.proc_items.append(A.ContAssign(A.Ident(sig.name, sig.loc), value, sig.loc))

    def driven(self) -> set[str]:
        """Signals with some driver other than connections to undefined modules."""
        out = {n for n, s in self.signals.items() if s.direction == "input"}
        for item in self.proc_items:
            if isinstance(item, A.ContAssign):
                out.update(lvalue_bases(item.lhs))
            elif isinstance(item, (A.AlwaysBlock, A.InitialBlock)):
                names: list[str] = []
                stmt_targets(item.body, names)
                out.update(names)
            elif isinstance(item, A.GateInst):
                outs = item.conns[:-1] if item.gate in ("buf", "not") else item.conns[:1]
                for e in outs:
                    out.update(lvalue_bases(e))
        for use in self.instances:
            if not use.defined:
                continue
            ports = {p.name: p for p in self.elab.ports_of(use.child)}
            for pname, expr in use.connections:
                if expr is not None and ports[pname].direction == "output":
                    out.update(lvalue_bases(expr))
        return out

    # -- names
    def temp(self, width: int, signed: bool = False) -> str:
        name = f"$t{self.temp_count}"
        self.temp_count += 1
        self.ir.vars.append(VarDecl(name, BitType(width, signed)))
        return name

    def const(self, value: LogicVec) -> str:
        key = (value.bits, value.signed)
        if key not in self.const_names:
            name = f"$c{len(self.const_names)}"
            self.const_names[key] = name
            self.ir.consts.append(ConstDecl(name, value))
        return self.const_names[key]

    def signal(self, name: str, loc) -> Signal:
        sig = self.signals.get(name)
        if sig is None:
            raise FrontendError(f"undeclared identifier {name}", loc)
        return sig

    # -- sizing
    def info(self, e, env: ConstEnv) -> tuple[int, bool]:
        """Self-determined (width, signed) of an expression."""
        if isinstance(e, A.Number):
            return e.value.width, e.value.signed
        if isinstance(e, A.StringLit):
            return max(8, 8 * len(e.text)), False
        if isinstance(e, A.RealNum):
            raise FrontendError("unsupported construct: real arithmetic", e.loc)
        if isinstance(e, A.Ident):
            if e.name in env.values:
                v = env.values[e.name]
                return v.width, v.signed
            sig = self.signal(e.name, e.loc)
            if sig.array:
                raise FrontendError(f"array {e.name} used without an index", e.loc)
            return sig.width, sig.signed
        if isinstance(e, A.Index):
            base = self._root(e.base)
            if isinstance(e.base, A.Ident) and base.array:
                return base.width, base.signed
            return 1, False
        if isinstance(e, A.PartSelect):
            return abs(env.int_value(e.msb) - env.int_value(e.lsb)) + 1, False
        if isinstance(e, A.IndexedPart):
            return env.int_value(e.width), False
        if isinstance(e, A.Unary):
            if e.op in ("+", "-", "~", "buf"):
                return self.info(e.operand, env)
            return 1, False
        if isinstance(e, A.Binary):
            if e.op in ARITH or e.op in BITWISE or e.op in ("/", "%"):
                wa, sa = self.info(e.left, env)
                wb, sb = self.info(e.right, env)
                return max(wa, wb), sa and sb
            if e.op in ("**", "<<", ">>", "<<<", ">>>"):
                return self.info(e.left, env)
            return 1, False
        if isinstance(e, A.Ternary):
            wa, sa = self.info(e.then, env)
            wb, sb = self.info(e.other, env)
            return max(wa, wb), sa and sb
        if isinstance(e, A.Concat):
            return sum(self.info(p, env)[0] for p in e.parts), False
        if isinstance(e, A.Replicate):
            n = env.int_value(e.count)
            return n * sum(self.info(p, env)[0] for p in e.parts), False
        if isinstance(e, A.SysCallExpr):
            if e.name in ("$signed", "$unsigned") and len(e.args) == 1:
                return self.info(e.args[0], env)[0], e.name == "$signed"
            if e.name == "$clog2":
                return env.vec_value(e).width, False
            raise FrontendError(f"unsupported system function {e.name}", e.loc)
        raise FrontendError(f"unsupported expression {type(e).__name__}", getattr(e, "loc", None))

    def _root(self, e) -> Signal:
        while not isinstance(e, A.Ident):
            if not isinstance(e, (A.Index, A.PartSelect, A.IndexedPart)):
                raise FrontendError("selects apply only to named signals", getattr(e, "loc", None))
            e = e.base
        return self.signal(e.name, e.loc)

    def lvalue_width(self, e, env) -> int:
        if isinstance(e, A.Concat):
            return sum(self.lvalue_width(p, env) for p in e.parts)
        if isinstance(e, A.Ident):
            return self.signal(e.name, e.loc).width
        return self.info(e, env)[0]

    # -- expression lowering
    def compute(self, pl, loc, op, args, width, signed, ty=None) -> str:
        t = self.temp(width, signed)
        pl.emit(Assign("=", Access(t), Compute(op, tuple(args), ty)), loc)
        return t

    def extend(self, pl, loc, vid, w, width, signed) -> str:
        if w >= width:
            return vid
        op = "sext" if signed else "zext"
        return self.compute(pl, loc, op, [vid], width, signed, BitType(width, signed))

    def _try_fold(self, e, env) -> LogicVec | None:
        if isinstance(e, A.Number):
            return e.value
        if isinstance(e, A.Ident) and e.name in env.values:
            return env.values[e.name]
        if isinstance(e, (A.Unary, A.Binary, A.Ternary)) and env.is_const(e):
            try:
                return env.vec_value(e)
            except FrontendError:
                return None
        return None

    def value(self, e, pl, env, width=None, signed=None) -> str:
        """Lower ``e`` to an identifier holding it at ``width`` bits."""
        sw, ss = self.info(e, env)
        if width is None:
            width, signed = sw, ss
        width = max(width, sw)
        loc = getattr(e, "loc", None)
        folded = self._try_fold(e, env)
        if folded is not None:
            v = resize(folded.with_signed(folded.signed and signed), width)
            return self.const(v.with_signed(signed))
        if isinstance(e, A.Ident):
            return self.extend(pl, loc, e.name, sw, width, signed)
        if isinstance(e, A.StringLit):
            data = "".join(format(ord(c), "08b") for c in e.text) or "0" * 8
            return self.const(resize(LogicVec(data), width))
        if isinstance(e, (A.Index, A.PartSelect, A.IndexedPart)):
            acc = self.access(e, pl, env)
            t = self.temp(sw, False)
            pl.emit(Assign("=", Access(t), acc), loc)
            return self.extend(pl, loc, t, sw, width, signed)
        if isinstance(e, A.Unary):
            if e.op == "+":
                return self.value(e.operand, pl, env, width, signed)
            if e.op in ("-", "~", "buf"):
                a = self.value(e.operand, pl, env, width, signed)
                op = {"-": "neg", "~": "not", "buf": "buf"}[e.op]
                return self.compute(pl, loc, op, [a], width, signed)
            if e.op == "!":
                b = self.bool1(e.operand, pl, env)
                r = self.compute(pl, loc, "not", [b], 1, False)
                return self.extend(pl, loc, r, 1, width, False)
            a = self.value(e.operand, pl, env)
            r = self.compute(pl, loc, REDUCTIONS[e.op], [a], 1, False)
            if e.op.startswith("~") or e.op == "^~":
                r = self.compute(pl, loc, "not", [r], 1, False)
            return self.extend(pl, loc, r, 1, width, False)
        if isinstance(e, A.Binary):
            op = e.op
            if op in ARITH or op in BITWISE or op in ("/", "%"):
                a = self.value(e.left, pl, env, width, signed)
                b = self.value(e.right, pl, env, width, signed)
                if op == "/":
                    name = "sdiv" if signed else "udiv"
                elif op == "%":
                    name = "srem" if signed else "urem"
                else:
                    name = ARITH.get(op) or BITWISE[op]
                r = self.compute(pl, loc, name, [a, b], width, signed)
                if op in ("~^", "^~"):
                    r = self.compute(pl, loc, "not", [r], width, signed)
                return r
            if op in ("**", "<<", ">>", "<<<", ">>>"):
                a = self.value(e.left, pl, env, width, signed)
                b = self.value(e.right, pl, env)
                if op == "**":
                    name = "pow" if signed else "upow"
                elif op in ("<<", "<<<"):
                    name = "shl"
                else:
                    name = "ashr" if op == ">>>" and signed else "lshr"
                return self.compute(pl, loc, name, [a, b], width, signed)
            if op in RELATIONAL or op in EQUALITY:
                wa, sa = self.info(e.left, env)
                wb, sb = self.info(e.right, env)
                w, s = max(wa, wb), sa and sb
                a = self.value(e.left, pl, env, w, s)
                b = self.value(e.right, pl, env, w, s)
                name = EQUALITY.get(op) or ("s" if s else "u") + RELATIONAL[op]
                r = self.compute(pl, loc, name, [a, b], 1, False)
                return self.extend(pl, loc, r, 1, width, False)
            if op in ("&&", "||"):
                a = self.bool1(e.left, pl, env)
                b = self.bool1(e.right, pl, env)
                r = self.compute(pl, loc, "and" if op == "&&" else "or", [a, b], 1, False)
                return self.extend(pl, loc, r, 1, width, False)
            raise FrontendError(f"unsupported operator {op}", loc)
        if isinstance(e, A.Ternary):
            c = self.bool1(e.cond, pl, env)
            a = self.value(e.then, pl, env, width, signed)
            b = self.value(e.other, pl, env, width, signed)
            return self.compute(pl, loc, "mux", [c, a, b], width, signed)
        if isinstance(e, (A.Concat, A.Replicate)):
            parts = list(e.parts)
            if isinstance(e, A.Replicate):
                n = env.int_value(e.count)
                if n < 1:
                    raise FrontendError("replication count must be positive", loc)
                parts = parts * n
            ids = [(self.value(p, pl, env), self.info(p, env)[0]) for p in parts]
            acc, acc_w = ids[0]
            for pid, pw in ids[1:]:
                acc_w += pw
                acc = self.compute(pl, loc, "concat", [acc, pid], acc_w, False)
            return self.extend(pl, loc, acc, acc_w, width, signed)
        if isinstance(e, A.SysCallExpr) and e.name in ("$signed", "$unsigned"):
            a = self.value(e.args[0], pl, env)
            s = e.name == "$signed"
            r = self.compute(pl, loc, "cast", [a], sw, s, BitType(sw, s))
            return self.extend(pl, loc, r, sw, width, signed)
        raise FrontendError(f"unsupported expression {type(e).__name__}", loc)

    def bool1(self, e, pl, env) -> str:
        """1-bit truth value of ``e`` (OR-reduced when wider)."""
        w, _ = self.info(e, env)
        v = self.value(e, pl, env)
        if w == 1:
            return v
        return self.compute(pl, getattr(e, "loc", None), "ror", [v], 1, False)

    def index_id(self, idx, pl, env, pos_of, loc) -> str:
        """Identifier holding a normalized (0-based) position for an index expression."""
        folded = self._try_fold(idx, env)
        if folded is not None and folded.is_defined():
            pos = pos_of(folded.to_int(), loc)
            return self.const(LogicVec.from_int(pos, max(1, pos.bit_length())))
        return self.value(idx, pl, env)

    def access(self, e, pl, env) -> Access:
        loc = getattr(e, "loc", None)
        sel = None
        outer = e
        if isinstance(e, (A.PartSelect, A.IndexedPart)) or (
            isinstance(e, A.Index) and not (isinstance(e.base, A.Ident) and self._root(e.base).array)
        ):
            inner = e.base
        else:
            inner = None
        base = e if inner is None else inner
        root = self._root(outer)
        index = None
        if isinstance(base, A.Index) and isinstance(base.base, A.Ident) and root.array:
            first, last = root.array
            if last < first and self._try_fold(base.index, env) is None:
                raise FrontendError("variable index into an ascending array range", loc)
            index = self._normalized_index(base.index, pl, env, root.elem_pos, min(first, last), loc)
        elif not isinstance(base, A.Ident):
            raise FrontendError("unsupported nested select", loc)
        elif root.array:
            raise FrontendError(f"array {root.name} used without an index", loc)
        if inner is not None:
            if isinstance(outer, A.Index):
                sel = self._bit_select(outer.index, root, pl, env, loc)
            elif isinstance(outer, A.PartSelect):
                hi = root.bit_pos(env.int_value(outer.msb), loc)
                lo = root.bit_pos(env.int_value(outer.lsb), loc)
                if hi < lo:
                    raise FrontendError("part-select direction does not match the declaration", loc)
                sel = Range(hi, lo)
            else:
                width = env.int_value(outer.width)
                folded = self._try_fold(outer.start, env)
                if folded is not None and folded.is_defined():
                    start = folded.to_int()
                    if outer.descending:
                        hi, lo = root.bit_pos(start, loc), root.bit_pos(start - width + 1, loc)
                    else:
                        hi, lo = root.bit_pos(start + width - 1, loc), root.bit_pos(start, loc)
                    sel = Range(hi, lo)
                else:
                    if root.msb < root.lsb:
                        raise FrontendError("indexed part-select on an ascending range", loc)
                    b = self._normalized_index(outer.start, pl, env, root.bit_pos, root.lsb, loc)
                    sel = IndexedSel(b, width, outer.descending)
        return Access(root.name, index, sel)

    def _normalized_index(self, idx, pl, env, pos_of, offset, loc) -> str:
        folded = self._try_fold(idx, env)
        if folded is not None and folded.is_defined():
            pos = pos_of(folded.to_int(), loc)
            return self.const(LogicVec.from_int(pos, max(1, pos.bit_length())))
        v = self.value(idx, pl, env)
        if offset:
            w, _ = self.info(idx, env)
            c = self.const(LogicVec.from_int(offset, w))
            v = self.compute(pl, loc, "sub", [v, c], w, False)
        return v

    def _bit_select(self, idx, root: Signal, pl, env, loc):
        folded = self._try_fold(idx, env)
        if folded is not None and folded.is_defined():
            p = root.bit_pos(folded.to_int(), loc)
            return Range(p, p)
        if root.msb < root.lsb:
            raise FrontendError("variable bit-select on an ascending range", loc)
        b = self._normalized_index(idx, pl, env, root.bit_pos, root.lsb, loc)
        return IndexedSel(b, 1)

    # -- stores and statements
    def store(self, lhs, vid: str, op: str, pl, env, loc):
        if isinstance(lhs, A.Concat):
            total = self.lvalue_width(lhs, env)
            offset = total
            for part in lhs.parts:
                w = self.lvalue_width(part, env)
                t = self.temp(w)
                pl.emit(Assign("=", Access(t), Access(vid, None, Range(offset - 1, offset - w))), loc)
                self.store(part, t, op, pl, env, loc)
                offset -= w
            return
        if isinstance(lhs, A.Ident):
            sig = self.signal(lhs.name, lhs.loc)
            if sig.array:
                raise FrontendError(f"cannot assign whole array {lhs.name}", loc)
            if lhs.name in env.values:
                raise FrontendError(f"cannot assign to constant {lhs.name}", loc)
            pl.emit(Assign(op, Access(lhs.name), Access(vid)), loc)
            return
        if not is_lvalue(lhs):
            raise FrontendError("invalid assignment target", loc)
        pl.emit(Assign(op, self.access(lhs, pl, env), Access(vid)), loc)

    def assign(self, lhs, rhs, op, pl, env, loc):
        lw = self.lvalue_width(lhs, env)
        rw, rs = self.info(rhs, env)
        if isinstance(lhs, A.Ident) and isinstance(rhs, (A.Index, A.PartSelect, A.IndexedPart)) and rw >= lw:
            self.signal(lhs.name, lhs.loc)
            pl.emit(Assign(op, Access(lhs.name), self.access(rhs, pl, env)), loc)
            return
        v = self.value(rhs, pl, env, max(lw, rw), rs)
        self.store(lhs, v, op, pl, env, loc)

    def guard(self, sens: A.Sensitivity, body, pl, env, loc):
        if sens.star:
            names: list[str] = []
            stmt_reads(body, names)
            events = tuple(Event(None, Access(n)) for n in _unique(names)
                           if n in self.signals and n not in env.values)
        else:
            evs = []
            for ev in sens.events:
                if not is_lvalue(ev.expr) or isinstance(ev.expr, A.Concat):
                    raise FrontendError("event expressions must name signals", loc)
                if isinstance(ev.expr, A.Ident):
                    self.signal(ev.expr.name, ev.expr.loc)
                    acc = Access(ev.expr.name)
                else:
                    acc = self.access(ev.expr, pl, env)
                evs.append(Event(ev.edge, acc))
            events = tuple(evs)
        pl.emit(Guard("event", events), loc)

    def stmt(self, s, pl, env):
        if s is None:
            return
        if isinstance(s, A.Block):
            for x in s.stmts:
                self.stmt(x, pl, env)
        elif isinstance(s, A.AssignStmt):
            if isinstance(s.lhs, A.Ident) and s.lhs.name in env.values:
                raise FrontendError(f"cannot assign to constant {s.lhs.name}", s.loc)
            self.assign(s.lhs, s.rhs, s.op, pl, env, s.loc)
        elif isinstance(s, A.IfStmt):
            c = self.bool1(s.cond, pl, env)
            l_then, l_end = pl.label(), pl.label()
            pl.emit(If(c, l_then), s.loc)
            self.stmt(s.other, pl, env)
            pl.emit(Goto(l_end))
            pl.emit(Label(l_then))
            self.stmt(s.then, pl, env)
            pl.emit(Label(l_end))
        elif isinstance(s, A.CaseStmt):
            self.case(s, pl, env)
        elif isinstance(s, A.EventStmt):
            self.guard(s.sens, s.body, pl, env, s.loc)
            if s.body is None:
                pl.emit(Pass())
            self.stmt(s.body, pl, env)
        elif isinstance(s, A.DelayStmt):
            amount = self.value(s.amount, pl, env)
            pl.emit(Guard("delay", (), amount), s.loc)
            if s.body is None:
                pl.emit(Pass())
            self.stmt(s.body, pl, env)
        elif isinstance(s, A.SysTaskStmt):
            ins = tuple(self.value(a, pl, env) for a in s.args if not isinstance(a, A.StringLit))
            pl.emit(Syscall(s.name, ins), s.loc)
        elif isinstance(s, A.ForStmt):
            self.unroll(s, pl, env)
        else:
            raise FrontendError(f"unsupported statement {type(s).__name__}", getattr(s, "loc", None))

    def unroll(self, s: A.ForStmt, pl, env):
        if not isinstance(s.init.lhs, A.Ident) or not isinstance(s.step.lhs, A.Ident) \
                or s.init.lhs.name != s.step.lhs.name:
            raise FrontendError("for loops must step a single loop variable", s.loc)
        var = s.init.lhs.name
        width = self.signals[var].width if var in self.signals else 32
        cur = env.child(**{var: resize(env.vec_value(s.init.rhs), width).with_signed(True)})
        for _ in range(MAX_UNROLL):
            if not cur.int_value(s.cond):
                return
            self.stmt(s.body, pl, cur)
            nxt = resize(cur.vec_value(s.step.rhs), width).with_signed(True)
            cur = env.child(**{var: nxt})
        raise FrontendError(f"for loop exceeds {MAX_UNROLL} iterations", s.loc)

    def case(self, s: A.CaseStmt, pl, env):
        items = [it for it in s.items if it.exprs]
        defaults = [it for it in s.items if not it.exprs]
        if len(defaults) > 1:
            raise FrontendError("multiple default items", s.loc)
        sw, _ = self.info(s.subject, env)
        widths = [sw] + [self.info(e, env)[0] for it in items for e in it.exprs]
        width = max(widths)
        subject = self.value(s.subject, pl, env, width, False)
        l_end = pl.label()
        arm_labels = [pl.label() for _ in items]
        l_default = pl.label() if defaults else None
        constant = all(self._try_fold(e, env) is not None for it in items for e in it.exprs)
        if constant:
            arms = []
            for it, lab in zip(items, arm_labels):
                for e in it.exprs:
                    arms.append(CaseArm(resize(self._try_fold(e, env).with_signed(False), width), lab))
            pl.emit(Case(s.kind, subject, tuple(arms), l_default), s.loc)
            if l_default is None:
                pl.emit(Goto(l_end))
        else:
            if s.kind != "case":
                raise FrontendError(f"{s.kind} items must be constant", s.loc)
            for it, lab in zip(items, arm_labels):
                for e in it.exprs:
                    v = self.value(e, pl, env, width, False)
                    t = self.compute(pl, s.loc, "equiv", [subject, v], 1, False)
                    pl.emit(If(t, lab), s.loc)
            pl.emit(Goto(l_default or l_end))
        for it, lab in zip(items, arm_labels):
            pl.emit(Label(lab))
            self.stmt(it.body, pl, env)
            pl.emit(Goto(l_end))
        if defaults:
            pl.emit(Label(l_default))
            self.stmt(defaults[0].body, pl, env)
        pl.emit(Label(l_end))

    # -- procs
    def _looping_assign(self, reads, body, attrs, loc) -> Proc:
        pl = ProcLowerer()
        reads = [r for r in _unique(reads) if r in self.signals or "." in r]
        if reads:
            top = pl.label()
            pl.emit(Label(top))
            pl.emit(Guard("event", tuple(Event(None, Access(r)) for r in reads)), loc)
            body(pl)
            pl.emit(Goto(top))
        else:
            body(pl)
        return Proc(pl.stmts, attrs)

    def _cont_assign(self, lhs, rhs, loc, extra: dict | None = None) -> Proc:
        reads: list[str] = []
        expr_idents(rhs, reads)
        lvalue_index_idents(lhs, reads)
        reads = [r for r in reads if r not in self.env.values]
        attrs = {"origin": "assign", **(extra or {}), "loc": str(loc)}
        return self._looping_assign(reads, lambda pl: self.assign(lhs, rhs, "<-", pl, self.env, loc),
                                    attrs, loc)

    def build_procs(self):
        for item in self.proc_items:
            if isinstance(item, A.ContAssign):
                self.ir.procs.append(self._cont_assign(item.lhs, item.rhs, item.loc))
            elif isinstance(item, A.AlwaysBlock):
                pl = ProcLowerer()
                top = pl.label()
                pl.emit(Label(top))
                self.stmt(item.body, pl, self.env)
                if isinstance(pl.stmts[-1], (Label, Guard)):  # nothing after the guard
                    pl.emit(Pass())
                pl.emit(Goto(top))
                self.ir.procs.append(Proc(pl.stmts, {"origin": "always", "loc": str(item.loc)}))
            elif isinstance(item, A.InitialBlock):
                pl = ProcLowerer()
                self.stmt(item.body, pl, self.env)
                if not pl.stmts:
                    pl.emit(Pass())
                attrs = {"origin": "always", "initial": "true", "synthesizable": "false",
                         "loc": str(item.loc)}
                self.ir.procs.append(Proc(pl.stmts, attrs))
            elif isinstance(item, A.GateInst):
                self._gate(item)
            elif isinstance(item, A.Instance):
                use = next(u for u in self.instances if u.item is item)
                self._port_procs(use)

    def _gate(self, g: A.GateInst):
        if len(g.conns) < 2:
            raise FrontendError(f"{g.gate} gate needs at least two terminals", g.loc)
        if g.gate in ("buf", "not"):
            src = g.conns[-1]
            for out in g.conns[:-1]:
                expr = A.Unary("buf" if g.gate == "buf" else "~", src, g.loc)
                self.ir.procs.append(self._cont_assign(out, expr, g.loc, {"gate": g.gate}))
            return
        op = GATE_OPS[g.gate]
        expr = g.conns[1]
        for c in g.conns[2:]:
            expr = A.Binary(op, expr, c, g.loc)
        if g.gate in ("nand", "nor", "xnor"):
            expr = A.Unary("~", expr, g.loc)
        self.ir.procs.append(self._cont_assign(g.conns[0], expr, g.loc, {"gate": g.gate}))

    def _port_procs(self, use: InstanceUse):
        inst = use.item
        ports = {p.name: p for p in self.elab.ports_of(use.child)}
        for pname, expr in use.connections:
            if expr is None:
                continue
            port = ports[pname]
            target = f"{inst.name}.{pname}"
            loc = inst.loc
            if port.direction == "input":
                reads: list[str] = []
                expr_idents(expr, reads)
                reads = [r for r in reads if r not in self.env.values]
                attrs = {"origin": "assign", "portConn": f"to:{inst.name}", "loc": str(loc)}

                def body(pl, expr=expr, target=target, port=port):
                    ew, es = self.info(expr, self.env)
                    v = self.value(expr, pl, self.env, max(ew, port.width), es)
                    pl.emit(Assign("<-", Access(target), Access(v)), loc)

                self.ir.procs.append(self._looping_assign(reads, body, attrs, loc))
            else:
                if not is_lvalue(expr):
                    raise FrontendError(f"output port {pname} of {inst.name} must connect to a signal", loc)
                attrs = {"origin": "assign", "portConn": f"from:{inst.name}", "loc": str(loc)}

                def body(pl, expr=expr, target=target, port=port):
                    lw = self.lvalue_width(expr, self.env)
                    if isinstance(expr, A.Ident):
                        self.signal(expr.name, expr.loc)
                    if isinstance(expr, A.Ident) and lw <= port.width:
                        pl.emit(Assign("<-", Access(expr.name), Access(target)), loc)
                        return
                    t = self.temp(port.width, port.signed)
                    pl.emit(Assign("=", Access(t), Access(target)), loc)
                    t = self.extend(pl, loc, t, port.width, lw, port.signed)
                    self.store(expr, t, "<-", pl, self.env, loc)

                self.ir.procs.append(self._looping_assign([target], body, attrs, loc))

    def port_infos(self) -> list[PortInfo]:
        return [PortInfo(n, self.signals[n].width, self.signals[n].signed, self.signals[n].direction)
                for n in self.ast.port_names]


# ------------------------------------------------------------ elaborator


@dataclass
class MissingUse:
    parent: ModuleBuilder
    item: A.Instance


class Elaborator:
    def __init__(self, modules: list[A.ModuleAst]):
        self.asts: dict[str, A.ModuleAst] = {}
        for m in modules:
            if m.name in self.asts:
                raise FrontendError(
                    f"conflicting definitions of module {m.name} (first at {self.asts[m.name].loc})", m.loc)
            self.asts[m.name] = m
        self.builders: dict[tuple, ModuleBuilder] = {}
        self.by_name: dict[str, ModuleBuilder] = {}
        self.spec_counts: dict[str, int] = {}
        self.missing: dict[str, list[MissingUse]] = {}
        self.inferred: dict[str, tuple[ModuleDef, list[PortInfo]]] = {}
        self.warnings: list[Warning_] = []

    def ports_of(self, ir_name: str) -> list[PortInfo]:
        if ir_name in self.by_name:
            return self.by_name[ir_name].port_infos()
        return self.inferred[ir_name][1]

    def request(self, name: str, overrides: dict, parent_env: ConstEnv | None) -> str:
        ast = self.asts[name]
        values, kinds = resolve_params(ast, overrides, parent_env)
        key = (name, _param_key(values))
        if key in self.builders:
            return self.builders[key].ir.name
        default_values, _ = resolve_params(ast, {})
        attrs: dict = {}
        if _param_key(values) == _param_key(default_values):
            ir_name = name
        else:
            self.spec_counts[name] = self.spec_counts.get(name, 0) + 1
            ir_name = f"{name}${self.spec_counts[name]}"
            attrs = {"specializes": name,
                     "params": ", ".join(f"{k}={v}" for k, v in values.items() if kinds[k] == "parameter")}
        b = ModuleBuilder(self, ast, values, kinds, ir_name, attrs)
        self.builders[key] = b
        self.by_name[ir_name] = b
        for item in ast.items:
            if isinstance(item, A.Instance):
                self._instance(b, item)
        return ir_name

    def _instance(self, parent: ModuleBuilder, item: A.Instance):
        if item.module not in self.asts:
            if item.params:
                self.warnings.append(Warning_(
                    f"parameters of undefined module {item.module} are ignored", item.loc))
            parent.instances.append(InstanceUse(item, item.module, False))
            self.missing.setdefault(item.module, []).append(MissingUse(parent, item))
            return
        child_ast = self.asts[item.module]
        overrides: dict = {}
        for k, p in enumerate(item.params):
            if p.expr is None:
                continue
            overrides[p.name if p.name is not None else k] = p.expr
        child = self.request(item.module, overrides, parent.env)
        use = InstanceUse(item, child, True)
        ports = child_ast.port_names
        named = [c for c in item.conns if c.name is not None]
        if named and len(named) != len(item.conns):
            raise FrontendError("cannot mix named and positional connections", item.loc)
        if named:
            seen = set()
            for c in item.conns:
                if c.name not in ports:
                    raise FrontendError(f"module {item.module} has no port {c.name}", c.loc)
                if c.name in seen:
                    raise FrontendError(f"port {c.name} connected twice", c.loc)
                seen.add(c.name)
            by_name = {c.name: c.expr for c in item.conns}
            use.connections = [(p, by_name[p]) for p in ports if p in by_name]
        else:
            if len(item.conns) > len(ports):
                raise FrontendError(
                    f"instance {item.name} has {len(item.conns)} connections but {item.module} "
                    f"has {len(ports)} ports", item.loc)
            use.connections = [(p, c.expr) for p, c in zip(ports, item.conns)]
        parent.instances.append(use)

    def infer_signatures(self):
        for mname, uses in self.missing.items():
            port_order: list[str] = []
            widths: dict[str, list[int]] = {}
            signed: dict[str, bool] = {}
            driven: dict[str, bool] = {}
            for use in uses:
                parent_driven = use.parent.driven()
                for k, c in enumerate(use.item.conns):
                    pname = c.name if c.name is not None else f"$t{k + 1}"
                    if pname not in widths:
                        port_order.append(pname)
                        widths[pname] = []
                        driven[pname] = False
                        signed[pname] = True
                    if c.expr is None:
                        continue
                    w, s = use.parent.info(c.expr, use.parent.env)
                    widths[pname].append(w)
                    signed[pname] = signed[pname] and s
                    if not is_lvalue(c.expr) or any(n in parent_driven for n in lvalue_bases(c.expr)):
                        driven[pname] = True
            mod = ModuleDef(mname, {"external": "true"})
            infos = []
            for pname in port_order:
                ws = widths[pname] or [1]
                width = max(ws)
                attrs: dict = {}
                distinct = sorted(set(ws))
                if len(distinct) > 1:
                    attrs["mergedWidths"] = ",".join(str(w) for w in distinct)
                    self.warnings.append(Warning_(
                        f"port {pname} of inferred module {mname} connected with widths "
                        f"{attrs['mergedWidths']}; merged to {width} bits (implicit conversion)",
                        uses[0].item.loc))
                direction = "input" if driven[pname] else "output"
                sg = signed[pname] and bool(widths[pname])
                mod.nets.append(NetDecl(pname, "wire", BitType(width, sg), direction, attrs))
                infos.append(PortInfo(pname, width, sg, direction))
            self.inferred[mname] = (mod, infos)
            for use in uses:
                inst_use = next(u for u in use.parent.instances if u.item is use.item)
                conns = []
                for k, c in enumerate(use.item.conns):
                    conns.append((c.name if c.name is not None else f"$t{k + 1}", c.expr))
                inst_use.connections = conns

    def run(self, order: list[str]) -> list[ModuleDef]:
        instantiated = {it.module for m in self.asts.values() for it in m.items
                        if isinstance(it, A.Instance)}
        for name in order:
            if name not in instantiated:
                self.request(name, {}, None)
        for name in order:
            # modules reachable only through instantiation cycles
            if not any(k[0] == name for k in self.builders):
                self.request(name, {}, None)
        self.infer_signatures()
        for b in self.builders.values():
            for use in b.instances:
                b.ir.instances.append(InstModule(use.item.name, use.child, {"loc": str(use.item.loc)}))
            b.build_procs()
        modules = []
        for name in order:
            modules.extend(b.ir for k, b in self.builders.items() if k[0] == name)
        modules.extend(self.inferred[n][0] for n in self.missing)
        return modules
