"""In-memory IR: hierarchical structures plus three-address statements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from ..bitvec import LogicVec

AttrValue = Union[LogicVec, float, str]
Attrs = dict  # ordered str -> AttrValue

NET_KINDS = ("wire", "wor", "wand", "uwire", "tri", "triand", "trior", "supply0", "supply1")
ASSIGN_OPS = ("=", "<=", "<-")
DIRECTIONS = ("input", "output")


class IRError(Exception):
    """Malformed IR: syntax errors, unresolved references, invariant violations."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class BitType:
    width: int
    signed: bool = False

    def __post_init__(self):
        if self.width < 1:
            raise IRError(f"bit-vector width must be positive, got {self.width}")

    def __str__(self) -> str:
        return f"{'s' if self.signed else 'u'}{self.width}"


@dataclass(frozen=True)
class RealType:
    def __str__(self) -> str:
        return "real"


@dataclass(frozen=True)
class ArrayType:
    elem: "Type"
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise IRError(f"array length must be positive, got {self.length}")

    def __str__(self) -> str:
        return f"{self.elem}[{self.length}]"


Type = Union[BitType, RealType, ArrayType]


def bit_width(ty: Type) -> int | None:
    """Width of a bit-vector type, the element width for arrays, None for reals."""
    while isinstance(ty, ArrayType):
        ty = ty.elem
    return ty.width if isinstance(ty, BitType) else None


def is_signed(ty: Type) -> bool:
    while isinstance(ty, ArrayType):
        ty = ty.elem
    return isinstance(ty, BitType) and ty.signed


# ---------------------------------------------------------- declarations


@dataclass
class NetDecl:
    id: str
    kind: str
    ty: Type
    direction: str | None = None
    attrs: Attrs = field(default_factory=dict)


@dataclass
class VarDecl:
    id: str
    ty: Type
    direction: str | None = None
    attrs: Attrs = field(default_factory=dict)


@dataclass
class ConstDecl:
    id: str
    value: LogicVec | float
    attrs: Attrs = field(default_factory=dict)

    @property
    def ty(self) -> Type:
        if isinstance(self.value, float):
            return RealType()
        return BitType(self.value.width, self.value.signed)


@dataclass
class InstModule:
    id: str
    module: str
    attrs: Attrs = field(default_factory=dict)


# ------------------------------------------------------------- accesses


@dataclass(frozen=True)
class Range:
    """Constant selector ``[high:low]``."""

    high: int
    low: int

    @property
    def width(self) -> int:
        return self.high - self.low + 1

    def __str__(self) -> str:
        return f"[{self.high}:{self.low}]"


@dataclass(frozen=True)
class IndexedSel:
    """Indexed part-select ``[base+:width]`` or ``[base-:width]``."""

    base: str
    width: int
    descending: bool = False

    def __str__(self) -> str:
        return f"[{self.base}{'-' if self.descending else '+'}:{self.width}]"


Selector = Union[Range, IndexedSel]


@dataclass(frozen=True)
class Access:
    name: str
    index: str | None = None
    sel: Selector | None = None

    @property
    def is_plain(self) -> bool:
        return self.index is None and self.sel is None and "." not in self.name

    @property
    def is_hier(self) -> bool:
        return "." in self.name

    def used_ids(self) -> list[str]:
        """Identifiers read to compute the address (array index, part-select base)."""
        out = []
        if self.index is not None:
            out.append(self.index)
        if isinstance(self.sel, IndexedSel):
            out.append(self.sel.base)
        return out

    def __str__(self) -> str:
        text = self.name
        if self.index is not None:
            text += f"[{self.index}]"
        if self.sel is not None:
            text += str(self.sel)
        return text


@dataclass(frozen=True)
class Compute:
    """``uop a`` | ``bop a b`` | ``c ? a : b`` (op ``mux``) | ``zext/sext/cast a to ty``."""

    op: str
    args: tuple[str, ...]
    ty: Type | None = None

    def __str__(self) -> str:
        if self.op == "mux":
            c, a, b = self.args
            return f"{c} ? {a} : {b}"
        if self.op in ("zext", "sext", "cast"):
            return f"{self.op} {self.args[0]} to {self.ty}"
        return " ".join((self.op, *self.args))


# ----------------------------------------------------------- statements


@dataclass
class Label:
    name: str


@dataclass
class Assign:
    op: str
    lhs: Access
    rhs: Access | Compute
    attrs: Attrs = field(default_factory=dict)

    @property
    def kind(self) -> str:
        if isinstance(self.rhs, Compute):
            return "compute"
        if not self.lhs.is_plain:
            return "hier-store" if self.lhs.is_hier else "local-store"
        return "hier-load" if self.rhs.is_hier else "local-load"

    @property
    def target(self) -> str:
        return self.lhs.name

    def used_ids(self) -> list[str]:
        if isinstance(self.rhs, Compute):
            used = list(self.rhs.args)
        else:
            used = [self.rhs.name, *self.rhs.used_ids()]
        return used + self.lhs.used_ids()


@dataclass(frozen=True)
class Event:
    edge: str | None  # "posedge" | "negedge" | None
    expr: Access

    def __str__(self) -> str:
        return f"{self.edge} {self.expr}" if self.edge else str(self.expr)


@dataclass
class Guard:
    """Timing control: ``@(events)``, ``#amount`` or ``repeat (amount) @(events)``."""

    kind: str  # "event" | "delay" | "repeat"
    events: tuple[Event, ...] = ()
    amount: str | None = None
    attrs: Attrs = field(default_factory=dict)

    @property
    def edge_sensitive(self) -> bool:
        return any(e.edge for e in self.events)

    def used_ids(self) -> list[str]:
        out = [] if self.amount is None else [self.amount]
        for e in self.events:
            out += [e.expr.name, *e.expr.used_ids()]
        return out


@dataclass
class If:
    cond: str
    target: str
    attrs: Attrs = field(default_factory=dict)


@dataclass(frozen=True)
class CaseArm:
    pattern: LogicVec
    target: str


@dataclass
class Case:
    kind: str  # "case" | "casex" | "casez"
    subject: str
    arms: tuple[CaseArm, ...]
    default: str | None = None
    attrs: Attrs = field(default_factory=dict)

    def targets(self) -> list[str]:
        out = [a.target for a in self.arms]
        if self.default is not None:
            out.append(self.default)
        return out


@dataclass
class Goto:
    target: str
    attrs: Attrs = field(default_factory=dict)


@dataclass
class Invoke:
    callee: str
    params: tuple[str, ...] = ()
    attrs: Attrs = field(default_factory=dict)


@dataclass
class Receive:
    params: tuple[str, ...] = ()
    attrs: Attrs = field(default_factory=dict)


@dataclass
class Syscall:
    name: str
    ins: tuple[str, ...] = ()
    outs: tuple[str, ...] = ()
    attrs: Attrs = field(default_factory=dict)


@dataclass
class Return:
    attrs: Attrs = field(default_factory=dict)


@dataclass
class Pass:
    attrs: Attrs = field(default_factory=dict)


Statement = Union[Label, Assign, Guard, If, Case, Goto, Invoke, Receive, Syscall, Return, Pass]


def stmt_targets(stmt: Statement) -> list[str]:
    """Labels a control-transfer statement can jump to."""
    if isinstance(stmt, (If, Goto)):
        return [stmt.target]
    if isinstance(stmt, Case):
        return stmt.targets()
    return []


def stmt_loc(stmt: Statement) -> str | None:
    attrs = getattr(stmt, "attrs", None)
    return attrs.get("loc") if attrs else None


# ----------------------------------------------------------- structures


@dataclass
class Proc:
    statements: list[Statement] = field(default_factory=list)
    attrs: Attrs = field(default_factory=dict)


@dataclass
class Func:
    id: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    vars: list[VarDecl] = field(default_factory=list)
    consts: list[ConstDecl] = field(default_factory=list)
    statements: list[Statement] = field(default_factory=list)
    attrs: Attrs = field(default_factory=dict)


@dataclass
class ModuleDef:
    name: str
    attrs: Attrs = field(default_factory=dict)
    nets: list[NetDecl] = field(default_factory=list)
    vars: list[VarDecl] = field(default_factory=list)
    consts: list[ConstDecl] = field(default_factory=list)
    instances: list[InstModule] = field(default_factory=list)
    procs: list[Proc] = field(default_factory=list)
    funcs: list[Func] = field(default_factory=list)
    # declaration order of ports; empty means "nets then vars as listed"
    port_order: tuple[str, ...] = ()

    def signals(self) -> Iterator[NetDecl | VarDecl]:
        yield from self.nets
        yield from self.vars

    def ports(self) -> list[NetDecl | VarDecl]:
        by_name = {d.id: d for d in self.signals() if d.direction}
        if self.port_order:
            return [by_name[n] for n in self.port_order if n in by_name]
        return list(by_name.values())

    def lookup(self, name: str):
        """Declaration named ``name`` (signal, const, instance or func) or None."""
        for group in (self.nets, self.vars, self.consts, self.instances, self.funcs):
            for d in group:
                if d.id == name:
                    return d
        return None

    @property
    def external(self) -> bool:
        return self.attrs.get("external") == "true"


@dataclass
class Design:
    name: str
    modules: list[ModuleDef] = field(default_factory=list)
    attrs: Attrs = field(default_factory=dict)

    def module(self, name: str) -> ModuleDef:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    def module_map(self) -> dict[str, ModuleDef]:
        return {m.name: m for m in self.modules}
