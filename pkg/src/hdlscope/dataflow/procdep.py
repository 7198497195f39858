"""Process dependency graph: which Procs wait on signals defined by other Procs."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .defuse import DefChain
from .hierarchy import Hierarchy, ProcId

# Level-sensitive guards are excluded: every continuous assignment waits on
# its operands, which would turn ordinary combinational feedback into cycles.
CONDITION_KINDS = ("if", "case", "guard-edge")


def proc_label(h: Hierarchy, pid: ProcId) -> str:
    """``Process-<line>`` from the Proc's source location, else its index."""
    proc = h.modules[pid.module].procs[pid.index]
    loc = proc.attrs.get("loc")
    line = loc.rsplit(":", 1)[-1] if loc else f"#{pid.index}"
    prefix = f"{pid.path}." if pid.path else ""
    return f"{prefix}Process-{line}"


@dataclass
class ProcDepGraph:
    graph: nx.DiGraph  # nodes ProcId; edge attr "signals": sorted tuple of labels
    labels: dict[ProcId, str]

    def dump(self):
        for u, v, data in sorted(self.graph.edges(data=True), key=lambda e: (str(e[0]), str(e[1]))):
            yield f"{self.labels[u]} -> {self.labels[v]} [{', '.join(data['signals'])}]"


def build_proc_dep_graph(h: Hierarchy, dc: DefChain) -> ProcDepGraph:
    g = nx.DiGraph()
    labels = {}
    for pid, _ in h.procs:
        g.add_node(pid)
        labels[pid] = proc_label(h, pid)
    definers: dict[str, set[ProcId]] = {}
    for sig, sites in dc.defs.items():
        for pid, _ in sites:
            definers.setdefault(sig, set()).add(pid)
    edges: dict[tuple[ProcId, ProcId], set[str]] = {}
    for (pid, _), conds in dc.conditions.items():
        for sig, kind in conds:
            if kind not in CONDITION_KINDS:
                continue
            for other in definers.get(sig, ()):
                if other != pid:
                    edges.setdefault((pid, other), set()).add(sig)
    for (a, b), sigs in edges.items():
        g.add_edge(a, b, signals=tuple(sorted(sigs)))
    return ProcDepGraph(g, labels)
