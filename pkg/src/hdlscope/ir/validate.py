"""Structural checks over a Design and hierarchical name resolution."""

from __future__ import annotations

from dataclasses import dataclass

from ..bitvec import BINARY_OPS, UNARY_OPS
from .nodes import (
    Access,
    Assign,
    Case,
    Compute,
    Design,
    Func,
    Guard,
    If,
    InstModule,
    Invoke,
    IRError,
    Label,
    ModuleDef,
    NET_KINDS,
    NetDecl,
    Range,
    Receive,
    Syscall,
    VarDecl,
    stmt_targets,
)

_COMPUTE_OPS = UNARY_OPS | BINARY_OPS | {"mux", "zext", "sext", "cast"}
_ARITY = {"mux": 3, "zext": 1, "sext": 1, "cast": 1}


def _arity(op: str) -> int:
    if op in _ARITY:
        return _ARITY[op]
    return 1 if op in UNARY_OPS else 2


def _check_body(where: str, stmts, in_func: bool, out: list[str]):
    labels: dict[str, int] = {}
    for s in stmts:
        if isinstance(s, Label):
            if s.name in labels:
                out.append(f"{where}: duplicate label {s.name!r}")
            labels[s.name] = 1
    for s in stmts:
        for t in stmt_targets(s):
            if t not in labels:
                out.append(f"{where}: unresolved label {t!r}")
        if isinstance(s, Guard) and in_func:
            out.append(f"{where}: guard statements are not allowed in functions")
        if isinstance(s, Assign):
            if s.op not in ("=", "<=", "<-"):
                out.append(f"{where}: bad assignment operator {s.op!r}")
            if in_func and s.op == "<=":
                out.append(f"{where}: non-blocking assignment inside a function")
            if isinstance(s.rhs, Compute):
                if not s.lhs.is_plain:
                    out.append(f"{where}: compute result must be stored to a plain identifier")
                if s.rhs.op not in _COMPUTE_OPS:
                    out.append(f"{where}: unknown operator {s.rhs.op!r}")
                elif len(s.rhs.args) != _arity(s.rhs.op):
                    out.append(f"{where}: {s.rhs.op} takes {_arity(s.rhs.op)} operand(s)")
            elif not s.lhs.is_plain and not s.rhs.is_plain:
                out.append(f"{where}: store source must be a plain identifier ({s.lhs} = {s.rhs})")
            for acc in (s.lhs, s.rhs):
                if isinstance(acc, Access) and isinstance(acc.sel, Range) and acc.sel.high < acc.sel.low:
                    out.append(f"{where}: selector {acc.sel} must have m >= n")
        if isinstance(s, Case) and s.kind not in ("case", "casex", "casez"):
            out.append(f"{where}: bad case kind {s.kind!r}")


def validate(d: Design) -> list[str]:
    """One diagnostic string per violated structural invariant; [] if valid."""
    out: list[str] = []
    seen_modules: set[str] = set()
    for m in d.modules:
        if m.name in seen_modules:
            out.append(f"duplicate module {m.name!r}")
        seen_modules.add(m.name)
    for m in d.modules:
        names: set[str] = set()
        for group in (m.nets, m.vars, m.consts, m.instances, m.funcs):
            for decl in group:
                if decl.id in names:
                    out.append(f"module {m.name}: duplicate identifier {decl.id!r}")
                names.add(decl.id)
        for n in m.nets:
            if n.kind not in NET_KINDS:
                out.append(f"module {m.name}: unknown net kind {n.kind!r}")
        port_names = {s.id for s in m.signals() if s.direction}
        if m.port_order and set(m.port_order) != port_names:
            out.append(f"module {m.name}: port order does not match declared ports")
        for inst in m.instances:
            if inst.module not in seen_modules:
                out.append(f"module {m.name}: instance {inst.id} of unknown module {inst.module!r}")
        for k, p in enumerate(m.procs):
            _check_body(f"module {m.name} proc {k}", p.statements, False, out)
            _check_names(d, m, f"module {m.name} proc {k}", p.statements, set(), out)
        for f in m.funcs:
            _check_body(f"module {m.name} func {f.id}", f.statements, True, out)
            local = {v.id for v in (*f.vars, *f.consts)} | set(f.inputs) | set(f.outputs)
            _check_names(d, m, f"module {m.name} func {f.id}", f.statements, local, out)
    return out


def _stmt_names(s) -> list[str]:
    if isinstance(s, Assign):
        return [s.lhs.name, *s.used_ids()]
    if isinstance(s, Guard):
        return s.used_ids()
    if isinstance(s, If):
        return [s.cond]
    if isinstance(s, Case):
        return [s.subject]
    if isinstance(s, Syscall):
        return [*s.ins, *s.outs]
    if isinstance(s, Invoke):
        return [s.callee, *s.params]
    if isinstance(s, Receive):
        return list(s.params)
    return []


def _check_names(d: Design, m: ModuleDef, where: str, stmts, local: set[str], out: list[str]):
    """Every identifier a statement mentions must be declared (or reachable via instances)."""
    known = d.module_map()
    for s in stmts:
        for name in _stmt_names(s):
            if name in local or m.lookup(name) is not None:
                continue
            if "." in name:
                inst = m.lookup(name.split(".", 1)[0])
                if isinstance(inst, InstModule) and inst.module not in known:
                    continue  # reported as an unknown module already
                try:
                    resolve(d, name, m.name)
                    continue
                except IRError:
                    pass
            out.append(f"{where}: undeclared identifier {name!r}")


# ------------------------------------------------------------ resolve


@dataclass(frozen=True)
class Resolved:
    """Declaration reached by a (possibly hierarchical) name."""

    module: ModuleDef
    decl: object
    instance_path: tuple[str, ...]

    @property
    def kind(self) -> str:
        if isinstance(self.decl, NetDecl):
            return "net"
        if isinstance(self.decl, VarDecl):
            return "var"
        if isinstance(self.decl, InstModule):
            return "instance"
        if isinstance(self.decl, Func):
            return "func"
        return "const"


def resolve(d: Design, path: str, scope: str | None = None) -> Resolved:
    """Walk ``inst.inst.name`` from ``scope`` (default: the first top module)."""
    modules = d.module_map()
    if scope is None:
        instantiated = {i.module for m in d.modules for i in m.instances}
        tops = [m.name for m in d.modules if m.name not in instantiated]
        if not tops:
            raise IRError("design has no top module")
        scope = tops[0]
    if scope not in modules:
        raise IRError(f"unknown module {scope!r}")
    module = modules[scope]
    parts = path.split(".")
    trail: list[str] = []
    for seg in parts[:-1]:
        inst = next((i for i in module.instances if i.id == seg), None)
        if inst is None:
            raise IRError(f"unknown instance {seg!r} in module {module.name}")
        trail.append(seg)
        module = modules[inst.module]
    decl = module.lookup(parts[-1])
    if decl is None:
        raise IRError(f"unknown name {parts[-1]!r} in module {module.name}")
    return Resolved(module, decl, tuple(trail))


def signal_type(m: ModuleDef, name: str):
    decl = m.lookup(name)
    return getattr(decl, "ty", None)


def is_three_address(stmt) -> bool:
    """True when no operand nests another computation (always true for these nodes)."""
    if isinstance(stmt, Assign) and isinstance(stmt.rhs, Compute):
        return all(isinstance(a, str) and a for a in stmt.rhs.args)
    return True
