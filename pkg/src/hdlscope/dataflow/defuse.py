"""Statement-level definitions and uses, and the flattened def-chain graph."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..ir import Access, Assign, Case, Compute, Design, Guard, If, Invoke, Receive, Syscall
from .hierarchy import Hierarchy, ProcId, qualify


@dataclass(frozen=True)
class StmtRef:
    module: str
    body: int | str
    index: int


@dataclass(frozen=True)
class StmtInfo:
    defs: tuple[tuple[str, str], ...]  # (name, assignment operator)
    uses: tuple[str, ...]


@dataclass
class DefUse:
    design: Design
    stmts: dict[StmtRef, StmtInfo] = field(default_factory=dict)
    defs_of: dict[tuple[str, str], list[StmtRef]] = field(default_factory=dict)
    uses_of: dict[tuple[str, str], list[StmtRef]] = field(default_factory=dict)

    def statement(self, ref: StmtRef):
        m = self.design.module(ref.module)
        if isinstance(ref.body, int):
            return m.procs[ref.body].statements[ref.index]
        return next(f for f in m.funcs if f.id == ref.body).statements[ref.index]

    def dump(self):
        for ref, info in self.stmts.items():
            if info.defs or info.uses:
                d = ",".join(f"{n}{op}" for n, op in info.defs)
                yield f"{ref.module}[{ref.body}].{ref.index} def={d} use={','.join(info.uses)}"


def stmt_def_use(stmt, consts: set[str]) -> StmtInfo:
    defs: list[tuple[str, str]] = []
    uses: list[str] = []
    if isinstance(stmt, Assign):
        defs.append((stmt.lhs.name, stmt.op))
        uses = stmt.used_ids()
    elif isinstance(stmt, Guard):
        uses = stmt.used_ids()
    elif isinstance(stmt, If):
        uses = [stmt.cond]
    elif isinstance(stmt, Case):
        uses = [stmt.subject]
    elif isinstance(stmt, Syscall):
        uses = list(stmt.ins)
        defs = [(o, "=") for o in stmt.outs]
    elif isinstance(stmt, Invoke):
        uses = list(stmt.params)
    elif isinstance(stmt, Receive):
        defs = [(p, "=") for p in stmt.params]
    uses = list(dict.fromkeys(u for u in uses if u not in consts))
    return StmtInfo(tuple(defs), tuple(uses))


def analyze_def_use(design: Design) -> DefUse:
    du = DefUse(design)
    for m in design.modules:
        consts = {c.id for c in m.consts}
        bodies = [(k, p.statements) for k, p in enumerate(m.procs)]
        bodies += [(f.id, f.statements) for f in m.funcs]
        for body, stmts in bodies:
            for i, s in enumerate(stmts):
                ref = StmtRef(m.name, body, i)
                info = stmt_def_use(s, consts)
                du.stmts[ref] = info
                for name, _ in info.defs:
                    du.defs_of.setdefault((m.name, name), []).append(ref)
                for name in info.uses:
                    du.uses_of.setdefault((m.name, name), []).append(ref)
    return du


# ------------------------------------------------------------ def chains

IDENTITY_OPS = frozenset({"buf"})


@dataclass(frozen=True)
class Source:
    """A signal feeding a statement, seen through any temporaries."""

    name: str  # module-local
    role: str  # "data" | "cond" (mux select) | "index" (address)
    identity: bool
    ops: frozenset[str]


@dataclass(frozen=True)
class Flow:
    src: str
    dst: str
    proc: ProcId
    stmt: StmtRef
    role: str
    identity: bool
    ops: frozenset[str]
    op: str  # assignment operator of the defining statement


@dataclass
class DefChain:
    graph: nx.DiGraph
    flows: list[Flow]
    defs: dict[str, list[tuple[ProcId, StmtRef]]]
    uses: dict[str, list[tuple[ProcId, StmtRef]]]
    conditions: dict[tuple[ProcId, StmtRef], tuple[tuple[str, str], ...]]
    expanders: dict  # module name -> ModuleSources

    def flows_between(self, src: str, dst: str) -> list[Flow]:
        return self.graph.edges[src, dst]["flows"] if self.graph.has_edge(src, dst) else []

    def dump(self):
        for u, v, data in sorted(self.graph.edges(data=True)):
            kinds = sorted({f.role for f in data["flows"]})
            ident = "identity" if any(f.identity for f in data["flows"]) else "compute"
            yield f"{u} -> {v} {'/'.join(kinds)} {ident}"


def _compose(outer: str, inner: str) -> str:
    return outer if outer != "data" else inner


class ModuleSources:
    """Expands statement operands of one module through its temporaries."""

    def __init__(self, module, du: DefUse):
        self.module = module
        self.du = du
        self.consts = {c.id for c in module.consts}
        self.temps = {v.id for v in module.vars if v.id.startswith("$t") and not v.direction}
        self._memo: dict[str, tuple[Source, ...]] = {}
        self._busy: set[str] = set()

    def is_temp(self, name: str) -> bool:
        return name in self.temps

    def _name(self, name: str, role: str, identity: bool, ops: frozenset) -> list[Source]:
        if name in self.consts:
            return []
        if name not in self.temps:
            return [Source(name, role, identity, ops)]
        out = []
        for s in self.temp_sources(name):
            out.append(Source(s.name, _compose(role, s.role), identity and s.identity, ops | s.ops))
        return out

    def temp_sources(self, temp: str) -> tuple[Source, ...]:
        if temp in self._memo:
            return self._memo[temp]
        if temp in self._busy:
            return ()
        self._busy.add(temp)
        out: list[Source] = []
        for ref in self.du.defs_of.get((self.module.name, temp), []):
            out.extend(self.stmt_sources(self.du.statement(ref)))
        self._busy.discard(temp)
        self._memo[temp] = tuple(dict.fromkeys(out))
        return self._memo[temp]

    def access_sources(self, acc: Access, role: str = "data") -> list[Source]:
        out = self._name(acc.name, role, acc.index is None and acc.sel is None, frozenset())
        for u in acc.used_ids():
            out += self._name(u, "index", False, frozenset())
        return out

    def expr_sources(self, rhs) -> list[Source]:
        if isinstance(rhs, Access):
            return self.access_sources(rhs)
        out: list[Source] = []
        ops = frozenset([rhs.op])
        ident = rhs.op in IDENTITY_OPS
        for k, a in enumerate(rhs.args):
            role = "cond" if rhs.op == "mux" and k == 0 else "data"
            out += self._name(a, role, ident, ops)
        return out

    def stmt_sources(self, stmt) -> list[Source]:
        if isinstance(stmt, Assign):
            out = self.expr_sources(stmt.rhs)
            for u in stmt.lhs.used_ids():
                out += self._name(u, "index", False, frozenset())
            return out
        if isinstance(stmt, If):
            return self._name(stmt.cond, "data", True, frozenset())
        if isinstance(stmt, Case):
            return self._name(stmt.subject, "data", True, frozenset())
        if isinstance(stmt, Guard):
            out = []
            for e in stmt.events:
                out += self.access_sources(e.expr)
            return out
        return []


def build_def_chain(h: Hierarchy, du: DefUse) -> DefChain:
    graph = nx.DiGraph()
    for name, info in h.signals.items():
        if not info.temp:
            graph.add_node(name)
    expanders = {m.name: ModuleSources(m, du) for m in h.design.modules}
    flows: list[Flow] = []
    defs: dict[str, list] = {}
    uses: dict[str, list] = {}
    conditions: dict = {}
    for pid, proc in h.procs:
        ms = expanders[pid.module]
        for i, stmt in enumerate(proc.statements):
            ref = StmtRef(pid.module, pid.index, i)
            info = du.stmts[ref]
            for u in info.uses:
                if not ms.is_temp(u):
                    uses.setdefault(qualify(pid.path, u), []).append((pid, ref))
            if isinstance(stmt, (If, Case, Guard)):
                kind = "if" if isinstance(stmt, If) else "case" if isinstance(stmt, Case) else (
                    "guard-edge" if stmt.edge_sensitive else "guard-level")
                srcs = ms.stmt_sources(stmt)
                conditions[(pid, ref)] = tuple(dict.fromkeys((qualify(pid.path, s.name), kind) for s in srcs))
            for name, op in info.defs:
                if ms.is_temp(name):
                    continue
                dst = qualify(pid.path, name)
                defs.setdefault(dst, []).append((pid, ref))
                graph.add_node(dst)
                if not isinstance(stmt, Assign):
                    continue
                for s in ms.stmt_sources(stmt):
                    src = qualify(pid.path, s.name)
                    f = Flow(src, dst, pid, ref, s.role, s.identity, s.ops, op)
                    flows.append(f)
                    if graph.has_edge(src, dst):
                        graph.edges[src, dst]["flows"].append(f)
                    else:
                        graph.add_edge(src, dst, flows=[f])
    return DefChain(graph, flows, defs, uses, conditions, expanders)
