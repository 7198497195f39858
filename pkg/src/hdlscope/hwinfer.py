"""Hardware understanding: clock-tree members, registers and their reset logic."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .bitvec import LogicVec
from .dataflow import ENTRY, EXIT, ConstMap, DefChain, DefUse, GuardMap, Hierarchy, ProcId, qualify
from .ir import Access, Assign, Case, Guard, If, stmt_loc
from .report import Report, looks_like_reset, make_report

# ------------------------------------------------------------------ clocks


@dataclass
class ClockSet:
    members: dict[str, tuple[str, ...]]  # clock -> edge-event sites (file:line)
    seeds: frozenset[str]
    flagged: dict[str, tuple[str, ...]]  # clock -> sites of non-identity data uses

    def __contains__(self, name: str) -> bool:
        return name in self.members

    def dump(self):
        for name in sorted(self.members):
            kind = "seed" if name in self.seeds else "tree"
            sites = ",".join(self.members[name]) or "-"
            yield f"clock {name} {kind} {sites}"
        for name in sorted(self.flagged):
            yield f"flag {name} combinational-use {','.join(self.flagged[name])}"


def _edge_events(stmt: Guard):
    return [e for e in stmt.events if e.edge]


def _cond_signals(dc: DefChain, pid: ProcId) -> set[str]:
    """Signals feeding any if/case subject of one Proc."""
    out = set()
    for (p, _), conds in dc.conditions.items():
        if p == pid:
            out.update(s for s, kind in conds if kind in ("if", "case"))
    return out


def _nba_guards(h: Hierarchy, guards: GuardMap):
    """(pid, guard index, statement index) for every `<=` with a reaching guard."""
    for pid, proc in h.procs:
        for k, stmt in enumerate(proc.statements):
            if isinstance(stmt, Assign) and stmt.op == "<=":
                for g in sorted(guards.of(pid.module, pid.index, k)):
                    if g != ENTRY:
                        yield pid, g, k


def infer_clocks(h: Hierarchy, dc: DefChain, guards: GuardMap) -> ClockSet:
    sites: dict[str, set[str]] = {}
    for pid, g, _ in _nba_guards(h, guards):
        proc = h.modules[pid.module].procs[pid.index]
        guard = proc.statements[g]
        branch = _cond_signals(dc, pid)
        for e in _edge_events(guard):
            q = qualify(pid.path, e.expr.name)
            # an edge signal tested inside its own block is an asynchronous reset
            if q not in branch:
                sites.setdefault(q, set()).add(stmt_loc(guard) or str(pid))
    seeds = frozenset(sites)
    tree = nx.Graph()
    for f in dc.flows:
        if f.identity and f.op == "<-" and f.role == "data":
            tree.add_edge(f.src, f.dst)
    members = set(seeds)
    for s in seeds:
        if s in tree:
            members |= nx.node_connected_component(tree, s)
    flagged: dict[str, set[str]] = {}
    for f in dc.flows:
        if f.src in members and not f.identity:
            proc = h.modules[f.proc.module].procs[f.proc.index]
            flagged.setdefault(f.src, set()).add(stmt_loc(proc.statements[f.stmt.index]) or str(f.proc))
    return ClockSet({m: tuple(sorted(sites.get(m, ()))) for m in members}, seeds,
                    {m: tuple(sorted(v)) for m, v in flagged.items()})


# --------------------------------------------------------------- registers


@dataclass
class RegInfo:
    name: str
    clocks: frozenset[str]
    sites: tuple[tuple[ProcId, int], ...]  # non-blocking assignments


@dataclass
class RegMap:
    regs: dict[str, RegInfo]
    reports: list[Report] = field(default_factory=list)

    def __contains__(self, name: str) -> bool:
        return name in self.regs

    def is_register(self, name: str) -> bool:
        return name in self.regs

    def dump(self):
        for name in sorted(self.regs):
            yield f"reg {name} clocks={','.join(sorted(self.regs[name].clocks))}"
        for r in self.reports:
            yield r.text()


def _governing_clocks(h, guards, clocks, pid, k) -> set[str]:
    proc = h.modules[pid.module].procs[pid.index]
    out = set()
    for g in guards.of(pid.module, pid.index, k):
        if g == ENTRY:
            continue
        for e in _edge_events(proc.statements[g]):
            q = qualify(pid.path, e.expr.name)
            if q in clocks:
                out.add(q)
    return out


def infer_regs(h: Hierarchy, guards: GuardMap, clocks: ClockSet) -> RegMap:
    found: dict[str, tuple[set, list]] = {}
    reports = []
    for pid, proc in h.procs:
        temps = {v.id for v in h.modules[pid.module].vars if v.id.startswith("$t") and not v.direction}
        for k, stmt in enumerate(proc.statements):
            if not isinstance(stmt, Assign) or stmt.op == "<-" or stmt.lhs.name in temps:
                continue
            clks = _governing_clocks(h, guards, clocks, pid, k)
            if not clks:
                continue
            q = qualify(pid.path, stmt.lhs.name)
            if stmt.op == "<=":
                entry = found.setdefault(q, (set(), []))
                entry[0].update(clks)
                entry[1].append((pid, k))
            else:
                reports.append(make_report(
                    "regs", "blocking-register", "warning", stmt_loc(stmt),
                    f"blocking assignment to {q} under a clock edge; not treated as a register",
                    site=q, module=pid.module))
    regs = {q: RegInfo(q, frozenset(c), tuple(s)) for q, (c, s) in found.items()}
    return RegMap(regs, reports)


# ------------------------------------------------------------------ resets


@dataclass(frozen=True)
class ResetInfo:
    register: str
    signal: str
    active_high: bool
    value: LogicVec
    site: str  # location of the resetting assignment
    confidence: float = 0.5


@dataclass
class ResetMap:
    resets: dict[str, ResetInfo | None]

    def get(self, name: str) -> ResetInfo | None:
        return self.resets.get(name)

    def dump(self):
        for name in sorted(self.resets):
            r = self.resets[name]
            if r is None:
                yield f"reset {name} none"
            else:
                pol = "high" if r.active_high else "low"
                yield f"reset {name} {r.signal} active-{pol} {r.value} confidence={r.confidence:.2f} at {r.site}"


END = EXIT


class _ProcView:
    """The statements of one Proc with the helpers the reset search needs."""

    def __init__(self, h: Hierarchy, du: DefUse, cm: ConstMap, cfg, pid: ProcId):
        self.h, self.du, self.cm, self.cfg, self.pid = h, du, cm, cfg, pid
        self.stmts = cfg.statements
        self.consts = h.consts(pid.module)

    def region(self, g: int) -> nx.DiGraph:
        """Paths of one iteration: from guard g up to a back edge, another guard or the exit."""
        r = nx.DiGraph()
        r.add_node(g)
        work, seen = [g], {g}
        while work:
            a = work.pop()
            for b in self.cfg.successors(a):
                if b == EXIT or self.cfg.is_back_edge(a, b) or (b != g and isinstance(self.stmts[b], Guard)):
                    r.add_edge(a, END)
                    continue
                r.add_edge(a, b)
                if b not in seen:
                    seen.add(b)
                    work.append(b)
        return r

    def temp_def(self, name: str):
        refs = self.du.defs_of.get((self.pid.module, name), [])
        if len(refs) != 1 or not name.startswith("$t"):
            return None
        return self.du.statement(refs[0])

    def is_const(self, name: str) -> LogicVec | None:
        if name in self.consts:
            v = self.consts[name].value
            return v if isinstance(v, LogicVec) and v.is_defined() else None
        v = self.cm.get(qualify(self.pid.path, name))
        if v is not None and all(b in "01" for b in v.bits):
            return LogicVec(v.bits.lower(), v.signed)
        return None

    def trace_condition(self, name: str) -> tuple[str, bool]:
        """Follow temporaries back to the tested signal; returns (signal, true-when-signal-high)."""
        high = True
        for _ in range(16):
            stmt = self.temp_def(name)
            if stmt is None or not isinstance(stmt, Assign):
                break
            rhs = stmt.rhs
            if isinstance(rhs, Access):
                if rhs.index is not None or rhs.sel is not None:
                    break
                name = rhs.name
                continue
            op, args = rhs.op, rhs.args
            if op in ("not", "lnot") and len(args) == 1:
                high, name = not high, args[0]
            elif op in ("buf", "bool") and len(args) == 1:
                name = args[0]
            elif op in ("eq", "neq", "equiv", "nequiv") and len(args) == 2:
                a, b = args
                c = self.is_const(b)
                if c is None:
                    a, b = b, a
                    c = self.is_const(b)
                if c is None or c.to_uint() not in (0, 1) or self.is_const(a) is not None:
                    break
                flip = (c.to_uint() == 0) != (op in ("neq", "nequiv"))
                high, name = high != flip, a
            else:
                break
        return name, high

    def value_of(self, stmt: Assign, width: int) -> LogicVec | None:
        if stmt.lhs.index is not None or stmt.lhs.sel is not None:
            return None
        rhs = stmt.rhs
        if not isinstance(rhs, Access) or rhs.index is not None or rhs.sel is not None:
            return None
        v = self.is_const(rhs.name)
        if v is None:
            return None
        if v.width >= width:
            return LogicVec(v.bits[v.width - width:])
        return LogicVec("0" * (width - v.width) + v.bits)

    def last_values(self, region: nx.DiGraph, start: int, reg: str, width: int) -> set:
        """Possible last assignments of ``reg`` on paths from ``start`` to END.

        Elements are LogicVec constants, "?" for a non-constant write, or None
        when some path does not write the register at all.
        """
        state: dict[int, frozenset] = {start: frozenset([None])}
        order = [n for n in nx.topological_sort(region.subgraph(nx.descendants(region, start) | {start}))]
        out = set()
        for n in order:
            if n not in state:
                continue
            cur = state[n]
            if n != END:
                s = self.stmts[n]
                if isinstance(s, Assign) and s.op != "<-" and s.lhs.name == reg:
                    v = self.value_of(s, width)
                    cur = frozenset([("?" if v is None else (v, stmt_loc(s)))])
            if n == END:
                out |= cur
                continue
            for b in region.successors(n):
                state[b] = state.get(b, frozenset()) | cur
        return out


def _branch_sides(stmt, view: _ProcView, cfg, k: int):
    """(tested signal, [(successor, active_high)]) for 1-bit branches, else None."""
    if isinstance(stmt, If):
        sig, high = view.trace_condition(stmt.cond)
        succ = dict((kind, b) for b, kind in cfg.succ[k])
        return sig, [(succ["taken"], high), (succ["not-taken"], not high)]
    if isinstance(stmt, Case):
        info = view.h.signals.get(qualify(view.pid.path, stmt.subject))
        if info is None or info.width != 1:
            return None
        sig, high = view.trace_condition(stmt.subject)
        sides = []
        for b, kind in cfg.succ[k]:
            if kind.startswith("arm"):
                p = stmt.arms[int(kind[3:])].pattern
                if p.bits in ("0", "1"):
                    sides.append((b, (p.bits == "1") == high))
        return sig, sides
    return None


def _find_reset(view: _ProcView, g: int, reg_local: str, width: int):
    region = view.region(g)
    if END not in region:
        return None
    dom = nx.immediate_dominators(region, g)
    on_every_path = set()
    n = END
    while n != g:
        n = dom[n]
        on_every_path.add(n)
    for k in sorted(on_every_path):
        if k < 0 or k == g:
            continue
        sides = _branch_sides(view.stmts[k], view, view.cfg, k)
        if sides is None:
            continue
        sig, arms = sides
        qsig = qualify(view.pid.path, sig)
        info = view.h.signals.get(qsig)
        if info is None or info.width != 1 or info.temp:
            continue
        for succ, high in arms:
            last = view.last_values(region, succ, reg_local, width)
            if len(last) == 1:
                (only,) = last
                if isinstance(only, tuple):
                    value, loc = only
                    return qsig, high, value, loc
    return None


def infer_resets(h: Hierarchy, regs: RegMap, cm: ConstMap, cfgs, guards: GuardMap, du: DefUse) -> ResetMap:
    found: dict[str, ResetInfo | None] = {}
    for name in sorted(regs.regs):
        info = regs.regs[name]
        width = h.signals[name].width or 1
        candidates = set()
        ok = True
        for pid, k in info.sites:
            view = _ProcView(h, du, cm, cfgs[(pid.module, pid.index)], pid)
            local = view.stmts[k].lhs.name
            for g in guards.of(pid.module, pid.index, k):
                if g == ENTRY:
                    continue
                r = _find_reset(view, g, local, width)
                if r is None:
                    ok = False
                else:
                    candidates.add(r)
        if ok and len({(s, p, v) for s, p, v, _ in candidates}) == 1:
            sig, high, value, loc = min(candidates, key=lambda c: c[3] or "")
            found[name] = ResetInfo(name, sig, high, value, loc or "")
        else:
            found[name] = None
    per_signal: dict[str, int] = {}
    for r in found.values():
        if r is not None:
            per_signal[r.signal] = per_signal.get(r.signal, 0) + 1
    for name, r in found.items():
        if r is not None:
            conf = 0.5 + (0.25 if per_signal[r.signal] >= 2 else 0) + (0.25 if looks_like_reset(r.signal) else 0)
            found[name] = ResetInfo(r.register, r.signal, r.active_high, r.value, r.site, conf)
    return ResetMap(found)
