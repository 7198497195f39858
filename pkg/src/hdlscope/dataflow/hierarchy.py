"""Module hierarchy and the flattened instance view shared by later analyses.

Signals are named relative to the top module: ``acc`` for a top-level
signal, ``i.$t1`` for port ``$t1`` of instance ``i``. A design with several
top modules prefixes each hierarchy with its top module name.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from ..ir import ArrayType, ConstDecl, Design, ModuleDef, NetDecl, Proc, RealType, bit_width, is_signed


class HierarchyError(Exception):
    pass


def qualify(path: str, name: str) -> str:
    return f"{path}.{name}" if path else name


def is_temp(decl) -> bool:
    return decl.id.startswith("$t") and not decl.direction and not isinstance(decl, NetDecl)


@dataclass(frozen=True)
class InstanceNode:
    path: str
    module: str
    parent: str | None
    inst_id: str | None


@dataclass(frozen=True)
class ProcId:
    path: str
    module: str
    index: int

    def __str__(self) -> str:
        return f"{self.path or '<top>'}:{self.module}[{self.index}]"


@dataclass
class SigInfo:
    name: str  # qualified
    local: str
    path: str
    module: str
    kind: str  # net kind or "var"
    width: int | None  # None for real
    signed: bool
    array_len: int | None
    direction: str | None
    temp: bool
    top_input: bool = False
    top_output: bool = False
    external_port: bool = False
    loc: str | None = None


@dataclass
class Hierarchy:
    design: Design
    graph: nx.MultiDiGraph
    edges: list[tuple[str, str, str]]
    tops: list[str]
    instances: list[InstanceNode]
    signals: dict[str, SigInfo] = field(default_factory=dict)
    procs: list[tuple[ProcId, Proc]] = field(default_factory=list)
    modules: dict[str, ModuleDef] = field(default_factory=dict)
    _by_path: dict[str, InstanceNode] = field(default_factory=dict, repr=False)
    _consts: dict[str, dict[str, ConstDecl]] = field(default_factory=dict, repr=False)

    def module_of(self, path: str) -> ModuleDef:
        return self.modules[self._by_path[path].module]

    def instance(self, path: str) -> InstanceNode:
        return self._by_path[path]

    def consts(self, module: str) -> dict[str, ConstDecl]:
        return self._consts[module]

    def dump(self):
        for p, i, c in self.edges:
            yield f"{p} {i} {c}"
        yield "tops " + " ".join(self.tops)


def analyze_hierarchy(design: Design) -> Hierarchy:
    modules = design.module_map()
    graph = nx.MultiDiGraph()
    edges = []
    for m in design.modules:
        graph.add_node(m.name)
    for m in design.modules:
        for inst in m.instances:
            if inst.module not in modules:
                raise HierarchyError(f"instance {inst.id} of unknown module {inst.module}")
            graph.add_edge(m.name, inst.module, key=inst.id)
            edges.append((m.name, inst.id, inst.module))
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        names = [u for u, *_ in cycle]
        raise HierarchyError("instantiation cycle: " + " -> ".join(names + names[:1]))
    instantiated = {c for _, _, c in edges}
    tops = [m.name for m in design.modules if m.name not in instantiated]
    h = Hierarchy(design, graph, edges, tops, [], modules=modules)
    h._consts = {m.name: {c.id: c for c in m.consts} for m in design.modules}

    def walk(path: str, module: str, parent: str | None, inst_id: str | None):
        node = InstanceNode(path, module, parent, inst_id)
        h.instances.append(node)
        h._by_path[path] = node
        m = modules[module]
        is_top = parent is None
        for d in m.signals():
            ty = d.ty
            elem = ty.elem if isinstance(ty, ArrayType) else ty
            q = qualify(path, d.id)
            h.signals[q] = SigInfo(
                q, d.id, path, module,
                d.kind if isinstance(d, NetDecl) else "var",
                None if isinstance(elem, RealType) else bit_width(elem),
                is_signed(elem),
                ty.length if isinstance(ty, ArrayType) else None,
                d.direction, is_temp(d),
                top_input=is_top and d.direction == "input",
                top_output=is_top and d.direction == "output",
                external_port=m.external and d.direction is not None,
                loc=d.attrs.get("loc"),
            )
        if not m.external:
            for k, proc in enumerate(m.procs):
                h.procs.append((ProcId(path, module, k), proc))
        for inst in m.instances:
            walk(qualify(path, inst.id), inst.module, path, inst.id)

    for top in tops:
        walk("" if len(tops) == 1 else top, top, None, None)
    return h
