"""Control-flow graphs, control dependence ("branch") and reaching guards."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..ir import Case, Design, Goto, Guard, If, Label, Return

ENTRY = -1
EXIT = -2


@dataclass
class Cfg:
    """One Proc or Func body. Nodes are statement indices plus ENTRY/EXIT."""

    module: str
    body: int | str
    statements: list
    succ: dict[int, list[tuple[int, str]]] = field(default_factory=dict)
    pred: dict[int, list[tuple[int, str]]] = field(default_factory=dict)

    @property
    def nodes(self) -> list[int]:
        return [ENTRY, *range(len(self.statements)), EXIT]

    def edges(self) -> list[tuple[int, int, str]]:
        return [(a, b, k) for a in self.nodes for b, k in self.succ.get(a, [])]

    def successors(self, n: int) -> list[int]:
        return [b for b, _ in self.succ.get(n, [])]

    def is_back_edge(self, a: int, b: int) -> bool:
        return a >= 0 and 0 <= b <= a

    def digraph(self, drop_back_edges: bool = False) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        for a, b, _ in self.edges():
            if drop_back_edges and self.is_back_edge(a, b):
                g.add_edge(a, EXIT)
            else:
                g.add_edge(a, b)
        return g


def build_body_cfg(module: str, body: int | str, stmts: list) -> Cfg:
    cfg = Cfg(module, body, stmts)
    labels = {s.name: k for k, s in enumerate(stmts) if isinstance(s, Label)}
    n = len(stmts)

    def nxt(k: int) -> int:
        return k + 1 if k + 1 < n else EXIT

    def add(a: int, b: int, kind: str):
        cfg.succ.setdefault(a, []).append((b, kind))
        cfg.pred.setdefault(b, []).append((a, kind))

    add(ENTRY, 0 if n else EXIT, "entry")
    for k, s in enumerate(stmts):
        if isinstance(s, Goto):
            add(k, labels[s.target], "goto")
        elif isinstance(s, If):
            add(k, labels[s.target], "taken")
            add(k, nxt(k), "not-taken")
        elif isinstance(s, Case):
            for j, arm in enumerate(s.arms):
                add(k, labels[arm.target], f"arm{j}")
            if s.default is not None:
                add(k, labels[s.default], "default")
            else:
                add(k, nxt(k), "fallthrough")
        elif isinstance(s, Return):
            add(k, EXIT, "return")
        else:
            add(k, nxt(k), "fall")
    return cfg


def build_cfgs(design: Design) -> dict[tuple[str, int | str], Cfg]:
    out = {}
    for m in design.modules:
        for k, p in enumerate(m.procs):
            out[(m.name, k)] = build_body_cfg(m.name, k, p.statements)
        for f in m.funcs:
            out[(m.name, f.id)] = build_body_cfg(m.name, f.id, f.statements)
    return out


def dump_cfgs(cfgs):
    for (module, body), cfg in cfgs.items():
        edges = cfg.edges()
        yield f"{module}[{body}] nodes={len(cfg.nodes)} edges={len(edges)}"
        for a, b, k in edges:
            yield f"  {_name(a)} -> {_name(b)} {k}"


def _name(n: int) -> str:
    return {ENTRY: "entry", EXIT: "exit"}.get(n, str(n))


# ------------------------------------------------------------ control dependence


@dataclass
class BranchInfo:
    """Per body: statement index -> branch statements (If/Case) it is control dependent on."""

    deps: dict[tuple[str, int | str], dict[int, frozenset[int]]]

    def of(self, module: str, body, index: int) -> frozenset[int]:
        return self.deps.get((module, body), {}).get(index, frozenset())

    def dump(self):
        for (module, body), d in self.deps.items():
            for k in sorted(d):
                if d[k]:
                    yield f"{module}[{body}] {k} <- {sorted(d[k])}"


def control_dependence(cfg: Cfg) -> dict[int, frozenset[int]]:
    """Post-dominator based control dependence; loop back edges are treated as exits."""
    g = cfg.digraph(drop_back_edges=True)
    rev = g.reverse(copy=True)
    reachable = nx.descendants(rev, EXIT) | {EXIT}
    ipdom = nx.immediate_dominators(rev.subgraph(reachable), EXIT)
    deps: dict[int, set[int]] = {k: set() for k in range(len(cfg.statements))}
    for a, b in g.edges():
        if a < 0 or not isinstance(cfg.statements[a], (If, Case)):
            continue
        if a not in ipdom or b not in ipdom:
            continue
        stop = ipdom[a]
        runner = b
        while runner != stop and runner != EXIT:
            if runner >= 0:
                deps[runner].add(a)
            nxt = ipdom.get(runner, EXIT)
            if nxt == runner:
                break
            runner = nxt
    return {k: frozenset(v) for k, v in deps.items()}


def analyze_branches(cfgs) -> BranchInfo:
    return BranchInfo({key: control_dependence(cfg) for key, cfg in cfgs.items()})


# ------------------------------------------------------------ reaching guards


@dataclass
class GuardMap:
    """Per body: statement index -> guard statement indices reaching it (ENTRY = -1)."""

    guards: dict[tuple[str, int | str], dict[int, frozenset[int]]]

    def of(self, module: str, body, index: int) -> frozenset[int]:
        return self.guards.get((module, body), {}).get(index, frozenset())

    def dump(self):
        for (module, body), g in self.guards.items():
            for k in sorted(g):
                yield f"{module}[{body}] {k} <- {sorted(g[k])}"


def reaching_guards(cfg: Cfg) -> dict[int, frozenset[int]]:
    stmts = cfg.statements
    inn: dict[int, frozenset[int]] = {}
    out: dict[int, frozenset[int]] = {ENTRY: frozenset([ENTRY])}
    work = [b for b in cfg.successors(ENTRY)]
    while work:
        n = work.pop()
        if n == EXIT:
            continue
        new_in = frozenset().union(*(out.get(p, frozenset()) for p, _ in cfg.pred.get(n, [])))
        new_out = frozenset([n]) if isinstance(stmts[n], Guard) else new_in
        if inn.get(n) == new_in and n in out:
            continue
        inn[n] = new_in
        if out.get(n) != new_out:
            out[n] = new_out
            work.extend(cfg.successors(n))
        elif n not in out:
            out[n] = new_out
            work.extend(cfg.successors(n))
    return {k: inn[k] for k in sorted(inn)}


def analyze_reaching_guards(cfgs) -> GuardMap:
    return GuardMap({key: reaching_guards(cfg) for key, cfg in cfgs.items()})
