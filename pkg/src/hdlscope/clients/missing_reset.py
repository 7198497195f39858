"""Missing-reset detection over the hardware dependency graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from ..dataflow import BranchInfo, DefChain, Hierarchy, StmtRef, qualify
from ..hwinfer import RegMap, ResetMap
from ..ir import Assign
from ..report import Report, make_report
from .common import control_closure, signal_module, stmt_location, synth_procs

DEFAULT_CYCLE_BOUND = 32


@dataclass
class HwDepGraph:
    """Signal graph; edges point from a dependent signal to what it depends on.

    Edge attribute ``kinds`` maps each of data/control/resetting/synchronization
    to the sorted evidencing locations.
    """

    graph: nx.DiGraph = field(default_factory=nx.DiGraph)

    def add(self, src: str, dst: str, kind: str, loc: str | None):
        if not self.graph.has_edge(src, dst):
            self.graph.add_edge(src, dst, kinds={})
        self.graph.edges[src, dst]["kinds"].setdefault(kind, set()).add(loc or "")

    def edges_of(self, kind: str):
        return sorted((u, v) for u, v, d in self.graph.edges(data=True) if kind in d["kinds"])

    def dump(self):
        for u, v, d in sorted(self.graph.edges(data=True), key=lambda e: (e[0], e[1])):
            yield f"{u} -> {v} {'/'.join(sorted(d['kinds']))}"


def build_hw_dep_graph(h: Hierarchy, dc: DefChain, branches: BranchInfo,
                       regs: RegMap, resets: ResetMap) -> HwDepGraph:
    g = HwDepGraph()
    for name in regs.regs:
        g.graph.add_node(name)
    for pid, proc in synth_procs(h):
        ms = dc.expanders[pid.module]
        for k, stmt in enumerate(proc.statements):
            if not isinstance(stmt, Assign) or ms.is_temp(stmt.lhs.name):
                continue
            dst = qualify(pid.path, stmt.lhs.name)
            loc = stmt_location(h, pid, k)
            for s in ms.stmt_sources(stmt):
                g.add(dst, qualify(pid.path, s.name), "control" if s.role == "cond" else "data", loc)
            reset = resets.get(dst) if dst in regs else None
            for b in control_closure(branches, pid, k):
                for sig, _ in dc.conditions.get((pid, StmtRef(pid.module, pid.index, b)), ()):
                    if reset is not None and sig == reset.signal:
                        continue
                    g.add(dst, sig, "control", stmt_location(h, pid, b))
    for name, info in sorted(regs.regs.items()):
        for clk in sorted(info.clocks):
            g.add(name, clk, "synchronization", None)
        r = resets.get(name)
        if r is not None:
            g.add(name, r.signal, "resetting", r.site)
            g.add(name, f"const:{r.value}", "resetting", r.site)
    return g


def shortest_cycle(graph: nx.DiGraph, node: str, bound: int) -> list[str] | None:
    """Shortest cycle through ``node`` with at most ``bound`` nodes, as a node list."""
    parent = {node: None}
    queue = deque([(node, 0)])
    while queue:
        n, depth = queue.popleft()
        if depth >= bound:
            continue
        for m in sorted(graph.successors(n)):
            if m == node:
                path = [n]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            if m not in parent:
                parent[m] = n
                queue.append((m, depth + 1))
    return None


@dataclass
class MissingResetResult:
    graph: HwDepGraph
    reports: list[Report]
    registers: list[str]  # reported registers

    def closure(self) -> set[str]:
        """Reported registers plus every signal that depends on one of them.

        Edges point from dependent to dependee, so an unknown value held by a
        reported register can only reach the register's ancestors.
        """
        out = set(self.registers)
        for r in self.registers:
            out |= nx.ancestors(self.graph.graph, r)
        return out

    def dump(self):
        yield from self.graph.dump()
        for r in self.reports:
            yield r.text()


def detect_missing_reset(h: Hierarchy, dc: DefChain, branches: BranchInfo, regs: RegMap,
                         resets: ResetMap, bound: int = DEFAULT_CYCLE_BOUND) -> MissingResetResult:
    g = build_hw_dep_graph(h, dc, branches, regs, resets)
    reports, found = [], []
    for name in sorted(regs.regs):
        if resets.get(name) is not None:
            continue
        cycle = shortest_cycle(g.graph, name, bound)
        if cycle is None:
            continue
        found.append(name)
        pid, k = regs.regs[name].sites[0]
        evidence = [f"{stmt_location(h, *regs.regs[n].sites[0]) if n in regs else ''} {n}".strip()
                    for n in cycle + [name]]
        reports.append(make_report(
            "missing-reset", "missing-reset", "error", stmt_location(h, pid, k),
            f"register {name} lacks reset logic and lies on a dependency cycle of {len(cycle)} signal(s)",
            site=name, evidence=evidence, module=signal_module(h, name)))
    return MissingResetResult(g, reports, found)
