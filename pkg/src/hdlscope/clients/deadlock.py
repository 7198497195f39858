"""Deadlock detection: cycles of Procs that wait on each other's signals."""

from __future__ import annotations

import networkx as nx

from ..dataflow import Hierarchy, ProcDepGraph
from ..report import ReportSet, make_report

MAX_CYCLES = 1000


def _canonical(cycle: list, labels) -> list:
    k = min(range(len(cycle)), key=lambda i: labels[cycle[i]])
    return cycle[k:] + cycle[:k]


def proc_cycles(pdg: ProcDepGraph, limit: int = MAX_CYCLES) -> list[list]:
    """Elementary cycles, each rotated to start at its smallest label, sorted."""
    out = []
    for c in nx.simple_cycles(pdg.graph):
        out.append(_canonical(c, pdg.labels))
        if len(out) >= limit:
            break
    return sorted(out, key=lambda c: [pdg.labels[p] for p in c])


def detect_deadlock(h: Hierarchy, pdg: ProcDepGraph) -> ReportSet:
    reports = []
    for cycle in proc_cycles(pdg):
        hops = list(zip(cycle, cycle[1:] + cycle[:1]))
        signals = [", ".join(pdg.graph.edges[a, b]["signals"]) for a, b in hops]
        names = [pdg.labels[p] for p in cycle]
        evidence = []
        for (a, b), sig in zip(hops, signals):
            loc = h.modules[a.module].procs[a.index].attrs.get("loc", "")
            evidence.append(f"{loc} {pdg.labels[a]} waits on {sig} from {pdg.labels[b]}")
        first = cycle[0]
        reports.append(make_report(
            "deadlock", "deadlock", "error", h.modules[first.module].procs[first.index].attrs.get("loc"),
            "processes may stall each other: " + " -> ".join(names + names[:1])
            + " via " + "; ".join(signals),
            site=names[0], evidence=evidence, module=first.module,
            subject=" ".join(n.rsplit(".", 1)[-1] for n in names)))
    return ReportSet(reports)
