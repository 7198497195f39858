"""X-propagation: unknown values that can reach branch or guard conditions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..bitvec import LogicVec
from ..dataflow import ConstMap, DefChain, Hierarchy, index_may_exceed, qualify
from ..ir import Access, Assign, Case, Compute, If, IndexedSel, stmt_loc
from ..report import ReportSet, make_report
from .common import signal_location, signal_module, stmt_location, synth_procs
from .missing_reset import MissingResetResult

BLOCKING_OPS = frozenset({"equiv", "nequiv"})
CONDITION_KINDS = ("if", "case", "guard-edge")


@dataclass(frozen=True)
class XSource:
    signal: str
    kind: str  # x-literal | x-value | missing-reset | out-of-bounds
    loc: str


def _literal_x(ms, consts, rhs, seen=None) -> bool:
    """Does the right-hand side carry an x/z constant, looking through temporaries?"""
    seen = set() if seen is None else seen
    names = [rhs.name] if isinstance(rhs, Access) else list(rhs.args)
    if isinstance(rhs, Compute) and rhs.op in BLOCKING_OPS:
        return False
    for n in names:
        c = consts.get(n)
        if c is not None:
            if isinstance(c.value, LogicVec) and not c.value.is_defined():
                return True
        elif ms.is_temp(n) and n not in seen:
            seen.add(n)
            for ref in ms.du.defs_of.get((ms.module.name, n), []):
                s = ms.du.statement(ref)
                if isinstance(s, Assign) and _literal_x(ms, consts, s.rhs, seen):
                    return True
    return False


def _oob(h: Hierarchy, cm: ConstMap, pid, acc: Access) -> bool:
    info = h.signals.get(qualify(pid.path, acc.name))
    if info is None or info.width is None:
        return False
    if acc.index is not None and info.array_len is not None:
        idx = cm.get(qualify(pid.path, acc.index))
        if idx is not None and index_may_exceed(idx, info.array_len):
            return True
    if isinstance(acc.sel, IndexedSel):
        idx = cm.get(qualify(pid.path, acc.sel.base))
        if idx is not None and index_may_exceed(idx, info.width - acc.sel.width + 1):
            return True
    return False


def _temp_consumers(ms, temp: str) -> tuple[list[str], bool]:
    """Signals assigned from ``temp`` through temporaries, and whether it reaches a condition."""
    dsts: list[str] = []
    to_cond = False
    todo, seen = [temp], {temp}
    while todo:
        t = todo.pop()
        for ref in ms.du.uses_of.get((ms.module.name, t), []):
            s = ms.du.statement(ref)
            if isinstance(s, (If, Case)):
                to_cond = True
            elif isinstance(s, Assign):
                n = s.lhs.name
                if not ms.is_temp(n):
                    dsts.append(n)
                elif n not in seen:
                    seen.add(n)
                    todo.append(n)
    return sorted(set(dsts)), to_cond


def x_sources(h: Hierarchy, dc: DefChain, cm: ConstMap, mr: MissingResetResult) -> list[XSource]:
    found: dict[str, XSource] = {}
    for pid, proc in synth_procs(h):
        ms = dc.expanders[pid.module]
        consts = h.consts(pid.module)
        for k, stmt in enumerate(proc.statements):
            if not isinstance(stmt, Assign) or ms.is_temp(stmt.lhs.name):
                continue
            dst = qualify(pid.path, stmt.lhs.name)
            if _literal_x(ms, consts, stmt.rhs):
                found.setdefault(dst, XSource(dst, "x-literal", stmt_loc(stmt) or ""))
        for k, stmt in enumerate(proc.statements):
            if not (isinstance(stmt, Assign) and isinstance(stmt.rhs, Access) and _oob(h, cm, pid, stmt.rhs)):
                continue
            loc = stmt_loc(stmt) or ""
            if not ms.is_temp(stmt.lhs.name):
                targets = [stmt.lhs.name]
            else:
                targets, to_cond = _temp_consumers(ms, stmt.lhs.name)
                if to_cond:  # the select feeds a condition directly
                    targets.append(stmt.rhs.name)
            for t in targets:
                q = qualify(pid.path, t)
                found.setdefault(q, XSource(q, "out-of-bounds", loc))
    # signals holding a fixed X bit with no X-carrying predecessor
    def has_x(name):
        v = cm.get(name)
        return v is not None and "X" in v.bits
    for name in sorted(dc.graph.nodes):
        if name in found or not has_x(name):
            continue
        preds = [p for p in dc.graph.predecessors(name) if has_x(p) or p in found]
        if not preds:
            found[name] = XSource(name, "x-value", signal_location(h, name) or "")
    for name in mr.registers:
        found.setdefault(name, XSource(name, "missing-reset", signal_location(h, name) or ""))
    return [found[k] for k in sorted(found)]


def _condition_sites(h: Hierarchy, dc: DefChain) -> dict[str, list]:
    synth = {pid for pid, _ in synth_procs(h)}
    out: dict[str, list] = {}
    for (pid, ref), conds in sorted(dc.conditions.items(), key=lambda e: (str(e[0][0]), e[0][1].index)):
        if pid not in synth:
            continue
        ms = dc.expanders[pid.module]
        # operands seen only through === / !== cannot make the condition unknown
        live = {qualify(pid.path, src.name) for src in ms.stmt_sources(ms.du.statement(ref))
                if not src.ops & BLOCKING_OPS}
        for sig, kind in conds:
            if kind in CONDITION_KINDS and sig in live:
                out.setdefault(sig, []).append((pid, ref))
    return out


def _propagates(flows) -> bool:
    return any(not (f.ops & BLOCKING_OPS) for f in flows)


def detect_x_prop(h: Hierarchy, dc: DefChain, cm: ConstMap, mr: MissingResetResult) -> ReportSet:
    sites = _condition_sites(h, dc)
    reports = []
    for src in x_sources(h, dc, cm, mr):
        parent = {src.signal: None}
        queue = deque([src.signal])
        hit = None
        while queue:
            n = queue.popleft()
            if n in sites:
                hit = n
                break
            for m in sorted(dc.graph.successors(n)):
                if m not in parent and _propagates(dc.graph.edges[n, m]["flows"]):
                    parent[m] = n
                    queue.append(m)
        if hit is None:
            continue
        path = [hit]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        evidence = [f"{src.loc} {src.signal} ({src.kind})"]
        for a, b in zip(path, path[1:]):
            f = dc.graph.edges[a, b]["flows"][0]
            evidence.append(f"{stmt_location(h, f.proc, f.stmt.index) or ''} {b}")
        pid, ref = sites[hit][0]
        cond_loc = stmt_location(h, pid, ref.index)
        evidence.append(f"{cond_loc} condition")
        reports.append(make_report(
            "x-prop", src.kind, "warning", cond_loc,
            f"unknown value from {src.signal} ({src.kind}) reaches a condition through "
            + " -> ".join(path),
            site=src.signal, evidence=evidence, module=signal_module(h, src.signal)))
    return ReportSet(reports)

