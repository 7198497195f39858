"""Analysis registry, dependency planning and run-once execution."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import networkx as nx

from .ir import Design


class ManagerError(Exception):
    pass


class DuplicateAnalysisError(ManagerError):
    pass


class UnknownAnalysisError(ManagerError):
    def __init__(self, name: str, known: Iterable[str]):
        self.name = name
        self.known = sorted(known)
        super().__init__(f"unknown analysis {name!r}")


class CycleError(ManagerError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("dependency cycle: " + " -> ".join(cycle + cycle[:1]))


class AnalysisFailure(ManagerError):
    def __init__(self, name: str, cause: BaseException):
        self.name = name
        self.cause = cause
        super().__init__(f"analysis {name} failed: {cause}")


@dataclass
class RunInput:
    """What an analysis receives: the design, its dependencies' results, and options."""

    design: Design | None
    deps: dict[str, Any]
    options: dict[str, str]

    def __getitem__(self, name: str) -> Any:
        return self.deps[name]


@dataclass
class Analysis:
    name: str
    run: Callable[[RunInput], Any]
    deps: tuple[str, ...] = ()
    needs_design: bool = True
    description: str = ""
    dump: Callable[[Any], Iterable[str]] | None = None


class Registry:
    def __init__(self):
        self._analyses: dict[str, Analysis] = {}

    def register(self, analysis: Analysis) -> None:
        if analysis.name in self._analyses:
            raise DuplicateAnalysisError(f"analysis {analysis.name!r} is already registered")
        self._analyses[analysis.name] = analysis

    def get(self, name: str) -> Analysis:
        try:
            return self._analyses[name]
        except KeyError:
            raise UnknownAnalysisError(name, self._analyses) from None

    def __contains__(self, name: str) -> bool:
        return name in self._analyses

    def __len__(self) -> int:
        return len(self._analyses)

    def names(self) -> list[str]:
        return sorted(self._analyses)

    def plan(self, requested: Iterable[str]) -> list[str]:
        """Requested analyses plus transitive dependencies, topologically ordered.

        Among analyses whose dependencies are satisfied, the lexicographically
        smallest runs first.
        """
        graph = nx.DiGraph()
        stack = list(requested)
        for name in stack:
            self.get(name)
        seen: set[str] = set()
        while stack:
            name = stack.pop()
            if name in seen:
                continue
            seen.add(name)
            graph.add_node(name)
            for dep in self.get(name).deps:
                graph.add_edge(dep, name)
                stack.append(dep)
        indegree = {n: graph.in_degree(n) for n in graph}
        ready = [n for n, d in indegree.items() if d == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            n = heapq.heappop(ready)
            order.append(n)
            for succ in graph.successors(n):
                indegree[succ] -= 1
                if indegree[succ] == 0:
                    heapq.heappush(ready, succ)
        if len(order) != graph.number_of_nodes():
            rest = graph.subgraph(n for n in graph if n not in set(order))
            cycle = [u for u, _ in nx.find_cycle(rest)]
            # name the cycle in dependency direction starting at its smallest member
            cycle.reverse()
            k = cycle.index(min(cycle))
            raise CycleError(cycle[k:] + cycle[:k])
        return order


@dataclass
class AnalysisContext:
    registry: Registry
    design: Design | None = None
    options: dict[str, str] = field(default_factory=dict)
    cache: dict[str, Any] = field(default_factory=dict)
    run_counts: dict[str, int] = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def execute(self, plan: list[str]) -> "AnalysisContext":
        """Run each analysis of ``plan`` once, in order, caching results."""
        for name in plan:
            if name in self.cache:
                continue
            analysis = self.registry.get(name)
            missing = [d for d in analysis.deps if d not in self.cache]
            if missing:
                raise ManagerError(f"{name} scheduled before its dependencies {missing}")
            inp = RunInput(self.design if analysis.needs_design else None,
                           {d: self.cache[d] for d in analysis.deps}, self.options)
            try:
                result = analysis.run(inp)
            except ManagerError:
                raise
            except Exception as e:  # noqa: BLE001 - reported with the analysis name
                raise AnalysisFailure(name, e) from e
            self.cache[name] = result
            self.run_counts[name] = self.run_counts.get(name, 0) + 1
            self.diagnostics.extend(getattr(result, "reports", ()) or ())
        return self

    def run(self, requested: Iterable[str]) -> "AnalysisContext":
        return self.execute(self.registry.plan(requested))

    def result(self, name: str) -> Any:
        return self.cache[name]
