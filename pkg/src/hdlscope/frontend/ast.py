"""Syntax tree for the supported Verilog subset (no desugaring)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..bitvec import LogicVec
from .lexer import SrcLoc

# ------------------------------------------------------------ expressions


@dataclass
class Ident:
    name: str
    loc: SrcLoc


@dataclass
class Number:
    value: LogicVec
    sized: bool
    loc: SrcLoc


@dataclass
class RealNum:
    value: float
    loc: SrcLoc


@dataclass
class StringLit:
    text: str
    loc: SrcLoc


@dataclass
class Index:
    base: "Expr"
    index: "Expr"
    loc: SrcLoc


@dataclass
class PartSelect:
    base: "Expr"
    msb: "Expr"
    lsb: "Expr"
    loc: SrcLoc


@dataclass
class IndexedPart:
    base: "Expr"
    start: "Expr"
    width: "Expr"
    descending: bool
    loc: SrcLoc


@dataclass
class Unary:
    op: str
    operand: "Expr"
    loc: SrcLoc


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: SrcLoc


@dataclass
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    loc: SrcLoc


@dataclass
class Concat:
    parts: list["Expr"]
    loc: SrcLoc


@dataclass
class Replicate:
    count: "Expr"
    parts: list["Expr"]
    loc: SrcLoc


@dataclass
class SysCallExpr:
    name: str
    args: list["Expr"]
    loc: SrcLoc


Expr = Union[Ident, Number, RealNum, StringLit, Index, PartSelect, IndexedPart, Unary,
             Binary, Ternary, Concat, Replicate, SysCallExpr]

# ------------------------------------------------------------ statements


@dataclass
class EventExpr:
    edge: str | None
    expr: Expr


@dataclass
class Sensitivity:
    events: list[EventExpr]
    star: bool = False


@dataclass
class Block:
    stmts: list["Stmt"]
    loc: SrcLoc


@dataclass
class IfStmt:
    cond: Expr
    then: "Stmt | None"
    other: "Stmt | None"
    loc: SrcLoc


@dataclass
class CaseItem:
    exprs: list[Expr]  # empty means default
    body: "Stmt | None"


@dataclass
class CaseStmt:
    kind: str
    subject: Expr
    items: list[CaseItem]
    loc: SrcLoc


@dataclass
class AssignStmt:
    op: str  # "=" or "<="
    lhs: Expr
    rhs: Expr
    loc: SrcLoc


@dataclass
class EventStmt:
    sens: Sensitivity
    body: "Stmt | None"
    loc: SrcLoc


@dataclass
class DelayStmt:
    amount: Expr
    body: "Stmt | None"
    loc: SrcLoc


@dataclass
class SysTaskStmt:
    name: str
    args: list[Expr]
    loc: SrcLoc


@dataclass
class ForStmt:
    init: AssignStmt
    cond: Expr
    step: AssignStmt
    body: "Stmt | None"
    loc: SrcLoc


Stmt = Union[Block, IfStmt, CaseStmt, AssignStmt, EventStmt, DelayStmt, SysTaskStmt, ForStmt]

# ------------------------------------------------------------ module items


@dataclass
class RangeSpec:
    msb: Expr
    lsb: Expr


@dataclass
class SignalDecl:
    name: str
    kind: str  # wire kinds, "reg", "integer"
    direction: str | None
    signed: bool
    range: RangeSpec | None
    array: RangeSpec | None
    init: Expr | None
    loc: SrcLoc


@dataclass
class ParamDecl:
    name: str
    local: bool
    range: RangeSpec | None
    signed: bool
    value: Expr
    loc: SrcLoc


@dataclass
class ContAssign:
    lhs: Expr
    rhs: Expr
    loc: SrcLoc


@dataclass
class AlwaysBlock:
    body: Stmt | None
    loc: SrcLoc


@dataclass
class InitialBlock:
    body: Stmt | None
    loc: SrcLoc


@dataclass
class PortConn:
    name: str | None  # None for positional
    expr: Expr | None  # None for an explicitly empty `.p()`
    loc: SrcLoc


@dataclass
class Instance:
    module: str
    name: str
    params: list[PortConn]
    conns: list[PortConn]
    loc: SrcLoc


@dataclass
class GateInst:
    gate: str
    name: str | None
    conns: list[Expr]
    loc: SrcLoc


Item = Union[SignalDecl, ParamDecl, ContAssign, AlwaysBlock, InitialBlock, Instance, GateInst]


@dataclass
class ModuleAst:
    name: str
    port_names: list[str]
    items: list[Item] = field(default_factory=list)
    loc: SrcLoc | None = None
