"""The single registration point for every built-in analysis."""

from __future__ import annotations

import importlib
from typing import Iterable

from . import clients, dataflow, hwinfer
from .ir import emit_text
from .manager import Analysis, Registry, RunInput


def dump_lines(result) -> list[str]:
    """Deterministic text form of any analysis result."""
    dump = getattr(result, "dump", None)
    return list(dump()) if dump is not None else [str(result)]


def _cycle_bound(inp: RunInput) -> int:
    raw = inp.options.get("missing-reset.cycle-bound", str(clients.DEFAULT_CYCLE_BOUND))
    try:
        bound = int(raw)
    except ValueError:
        raise ValueError(f"missing-reset.cycle-bound must be an integer, got {raw!r}") from None
    if bound < 1:
        raise ValueError("missing-reset.cycle-bound must be positive")
    return bound


class _Text(str):
    """A string result whose dump is the string itself."""

    def dump(self):
        yield from self.splitlines()


class _Cfgs(dict):
    def dump(self):
        return dataflow.cfg.dump_cfgs(self)


def _checked_const_prop(h):
    cm = dataflow.analyze_const_prop(h)
    if not dataflow.check_fixpoint(h, cm):
        raise RuntimeError("constant propagation result is not a fixpoint")
    return cm


BUILTINS = [
    Analysis("hello", lambda i: _Text("Hello"), description="returns the greeting Hello"),
    Analysis("dump", lambda i: _Text(i["hello"]), ("hello",), needs_design=False,
             description="prints the result of hello"),
    Analysis("ir", lambda i: _Text(emit_text(i.design).rstrip("\n")), description="the design as IR text"),
    Analysis("hierarchy", lambda i: dataflow.analyze_hierarchy(i.design),
             description="module instantiation graph and flattened signals"),
    Analysis("cfg", lambda i: _Cfgs(dataflow.build_cfgs(i.design)), description="control-flow graph per Proc"),
    Analysis("def-use", lambda i: dataflow.analyze_def_use(i.design), description="per-statement defs and uses"),
    Analysis("branch", lambda i: dataflow.analyze_branches(i["cfg"]), ("cfg",), needs_design=False,
             description="control dependence on if/case statements"),
    Analysis("reaching-guards", lambda i: dataflow.analyze_reaching_guards(i["cfg"]), ("cfg",),
             needs_design=False, description="guards that may govern each statement"),
    Analysis("fi-def-chain", lambda i: dataflow.build_def_chain(i["hierarchy"], i["def-use"]),
             ("def-use", "hierarchy"), needs_design=False, description="flow-insensitive signal flow graph"),
    Analysis("proc-dep-graph", lambda i: dataflow.build_proc_dep_graph(i["hierarchy"], i["fi-def-chain"]),
             ("fi-def-chain", "hierarchy"), needs_design=False, description="Proc wait dependences"),
    Analysis("fi-const-prop", lambda i: _checked_const_prop(i["hierarchy"]), ("fi-def-chain", "hierarchy"),
             needs_design=False, description="bit-level constant propagation"),
    Analysis("clocks", lambda i: hwinfer.infer_clocks(i["hierarchy"], i["fi-def-chain"], i["reaching-guards"]),
             ("fi-def-chain", "hierarchy", "reaching-guards"), needs_design=False,
             description="clock-tree members"),
    Analysis("regs", lambda i: hwinfer.infer_regs(i["hierarchy"], i["reaching-guards"], i["clocks"]),
             ("clocks", "hierarchy", "reaching-guards"), needs_design=False,
             description="registers and their clocks"),
    Analysis("resets", lambda i: hwinfer.infer_resets(i["hierarchy"], i["regs"], i["fi-const-prop"], i["cfg"],
                                                      i["reaching-guards"], i["def-use"]),
             ("cfg", "def-use", "fi-const-prop", "hierarchy", "reaching-guards", "regs"), needs_design=False,
             description="reset signal, polarity and value per register"),
    Analysis("missing-reset", lambda i: clients.detect_missing_reset(
                 i["hierarchy"], i["fi-def-chain"], i["branch"], i["regs"], i["resets"], _cycle_bound(i)),
             ("branch", "fi-def-chain", "hierarchy", "regs", "resets"), needs_design=False,
             description="unreset registers on dependency cycles"),
    Analysis("unreachable-state", lambda i: clients.detect_unreachable_state(
                 i["hierarchy"], i["def-use"], i["fi-const-prop"]),
             ("def-use", "fi-const-prop", "hierarchy"), needs_design=False,
             description="comparisons and case arms that can never match"),
    Analysis("deadlock", lambda i: clients.detect_deadlock(i["hierarchy"], i["proc-dep-graph"]),
             ("hierarchy", "proc-dep-graph"), needs_design=False, description="cycles of waiting Procs"),
    Analysis("undriven", lambda i: clients.detect_undriven(i["hierarchy"], i["fi-def-chain"]),
             ("fi-def-chain", "hierarchy"), needs_design=False, description="used but never driven signals"),
    Analysis("unloaded", lambda i: clients.detect_unloaded(i["hierarchy"], i["fi-def-chain"]),
             ("fi-def-chain", "hierarchy"), needs_design=False, description="driven but never used signals"),
    Analysis("mis-truncation", lambda i: clients.detect_mis_truncation(i["hierarchy"], i["fi-const-prop"]),
             ("fi-const-prop", "hierarchy"), needs_design=False,
             description="assignments dropping possibly non-zero bits"),
    Analysis("port-mismatch", lambda i: clients.detect_port_mismatch(i["hierarchy"], i["fi-def-chain"]),
             ("fi-def-chain", "hierarchy"), needs_design=False,
             description="merged port widths and conflicting output connections"),
    Analysis("x-prop", lambda i: clients.detect_x_prop(
                 i["hierarchy"], i["fi-def-chain"], i["fi-const-prop"], i["missing-reset"]),
             ("fi-const-prop", "fi-def-chain", "hierarchy", "missing-reset"), needs_design=False,
             description="unknown values reaching conditions"),
    Analysis("taint", lambda i: clients.detect_taint(
                 i["hierarchy"], i["def-use"], clients.TaintSpec.from_options(i.options)),
             ("def-use", "hierarchy"), needs_design=False,
             description="explicit flows from taint.sources to taint.sinks"),
]


def register_builtins(registry: Registry) -> Registry:
    for a in BUILTINS:
        registry.register(a)
    return registry


def load_extensions(registry: Registry, modules: Iterable[str]) -> Registry:
    """Import each module and call its ``register(registry)`` hook."""
    for name in modules:
        mod = importlib.import_module(name)
        hook = getattr(mod, "register", None)
        if hook is None:
            raise ImportError(f"extension module {name} has no register(registry) function")
        hook(registry)
    return registry


def default_registry(extensions: Iterable[str] = ()) -> Registry:
    return load_extensions(register_builtins(Registry()), extensions)
