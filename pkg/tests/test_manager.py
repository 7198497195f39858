from __future__ import annotations

import itertools
import random

import pytest

from hdlscope.builtin import BUILTINS, default_registry
from hdlscope.manager import (
    Analysis,
    AnalysisContext,
    AnalysisFailure,
    CycleError,
    DuplicateAnalysisError,
    Registry,
    UnknownAnalysisError,
)
from support.util import design_of, fixture


def registry(*analyses: Analysis) -> Registry:
    r = Registry()
    for a in analyses:
        r.register(a)
    return r


def const(name, deps=(), value=None):
    return Analysis(name, lambda i, v=value or name: v, tuple(deps), needs_design=False)


# -- register


def test_register_hello():
    r = registry(BUILTINS[0])
    assert r.names() == ["hello"]
    assert r.get("hello").name == "hello"


def test_register_duplicate():
    r = registry(const("a"))
    with pytest.raises(DuplicateAnalysisError):
        r.register(const("a"))
    assert len(r) == 1


def test_builtins_all_retrievable():
    r = default_registry()
    assert len(r) == len(BUILTINS) == len({a.name for a in BUILTINS})
    for a in BUILTINS:
        assert r.get(a.name) is a
        assert all(d in r for d in a.deps)


def test_unknown_analysis_lists_known_names():
    r = registry(const("a"), const("b"))
    with pytest.raises(UnknownAnalysisError) as e:
        r.get("zzz")
    assert e.value.name == "zzz" and sorted(e.value.known) == ["a", "b"]


# -- plan


def test_plan_dump():
    assert default_registry().plan(["dump"]) == ["hello", "dump"]


def test_plan_no_deps():
    assert default_registry().plan(["hello"]) == ["hello"]


def test_plan_two_cycle_names_both():
    r = registry(const("A", ["B"]), const("B", ["A"]))
    with pytest.raises(CycleError) as e:
        r.plan(["A"])
    assert set(e.value.cycle) == {"A", "B"}
    assert "A" in str(e.value) and "B" in str(e.value)


def test_plan_three_cycle_reported_in_full():
    r = registry(const("x", ["y"]), const("y", ["z"]), const("z", ["x"]), const("top", ["x"]))
    with pytest.raises(CycleError) as e:
        r.plan(["top"])
    assert sorted(e.value.cycle) == ["x", "y", "z"]


def test_plan_unknown_dependency():
    r = registry(const("a", ["ghost"]))
    with pytest.raises(UnknownAnalysisError):
        r.plan(["a"])


def test_plan_lexicographic_ties():
    r = registry(const("c"), const("a"), const("b"), const("top", ["c", "b", "a"]))
    assert r.plan(["top"]) == ["a", "b", "c", "top"]
    assert r.plan(["c", "a"]) == ["a", "c"]


def _random_dag(rng: random.Random, n: int) -> Registry:
    names = [f"n{k:02d}" for k in range(n)]
    analyses = []
    for k, name in enumerate(names):
        deps = [d for d in names[:k] if rng.random() < 0.3]
        analyses.append(const(name, deps))
    rng.shuffle(analyses)
    return registry(*analyses)


def _closure(r: Registry, requested) -> set[str]:
    out, stack = set(), list(requested)
    while stack:
        n = stack.pop()
        if n not in out:
            out.add(n)
            stack.extend(r.get(n).deps)
    return out


@pytest.mark.parametrize("seed", range(20))
def test_plan_properties_random_dags(seed):
    rng = random.Random(seed)
    r = _random_dag(rng, 15)
    requested = rng.sample(r.names(), 3)
    plan = r.plan(requested)
    assert len(plan) == len(set(plan))
    assert set(plan) == _closure(r, requested)
    pos = {n: k for k, n in enumerate(plan)}
    for n in plan:
        assert all(pos[d] < pos[n] for d in r.get(n).deps)
    # tie-breaking: each step takes the smallest ready name
    done: set[str] = set()
    for n in plan:
        ready = [m for m in plan if m not in done and set(r.get(m).deps) <= done]
        assert n == min(ready)
        done.add(n)
    assert r.plan(requested) == plan


def test_plan_every_builtin_is_acyclic():
    r = default_registry()
    for name in r.names():
        plan = r.plan([name])
        assert plan[-1] == name


# -- execute


def test_execute_hello_dump():
    ctx = AnalysisContext(default_registry())
    ctx.execute(["hello", "dump"])
    assert ctx.result("hello") == "Hello"
    assert ctx.result("dump") == "Hello"


def test_execute_empty_plan():
    ctx = AnalysisContext(default_registry())
    ctx.execute([])
    assert ctx.cache == {} and ctx.run_counts == {}


def test_execute_diamond_runs_each_once():
    calls = []

    def rec(name, deps=()):
        def run(inp):
            calls.append(name)
            return (name, tuple(inp[d] for d in deps))
        return Analysis(name, run, tuple(deps), needs_design=False)

    r = registry(rec("base"), rec("left", ["base"]), rec("right", ["base"]), rec("top", ["left", "right"]))
    ctx = AnalysisContext(r).run(["top", "left", "right"])
    assert calls == ["base", "left", "right", "top"]
    assert set(ctx.run_counts.values()) == {1}
    # re-running the same request reuses cached results
    ctx.run(["top"])
    assert set(ctx.run_counts.values()) == {1}


def test_execute_passes_design_only_when_needed():
    seen = {}
    r = registry(Analysis("with", lambda i: seen.setdefault("with", i.design)),
                 Analysis("without", lambda i: seen.setdefault("without", i.design), needs_design=False))
    d = design_of("module m; endmodule")
    AnalysisContext(r, d).run(["with", "without"])
    assert seen == {"with": d, "without": None}


def test_execute_passes_options():
    r = registry(Analysis("opt", lambda i: i.options.get("k"), needs_design=False))
    assert AnalysisContext(r, None, {"k": "v"}).run(["opt"]).result("opt") == "v"


def test_execute_failure_names_analysis_and_stops():
    def boom(inp):
        raise ValueError("bad input")

    r = registry(const("a"), Analysis("b", boom, ("a",), needs_design=False), const("c", ["b"]))
    ctx = AnalysisContext(r)
    with pytest.raises(AnalysisFailure) as e:
        ctx.run(["c"])
    assert "b" in str(e.value) and "bad input" in str(e.value)
    assert "c" not in ctx.cache and "a" in ctx.cache


def test_execute_rejects_out_of_order_plan():
    r = registry(const("a"), const("b", ["a"]))
    with pytest.raises(Exception, match="dependencies"):
        AnalysisContext(r).execute(["b", "a"])


def test_cache_invariant_holds_after_real_run():
    ctx = AnalysisContext(default_registry(), design_of(fixture("fig5a_xy.v")))
    ctx.run(["x-prop", "deadlock"])
    for name in ctx.cache:
        assert all(d in ctx.cache for d in ctx.registry.get(name).deps)


def test_missing_reset_plan_runs_each_analysis_once():
    r = default_registry()
    plan = r.plan(["missing-reset"])
    assert plan == ["cfg", "branch", "def-use", "hierarchy", "fi-def-chain", "fi-const-prop",
                    "reaching-guards", "clocks", "regs", "resets", "missing-reset"]
    ctx = AnalysisContext(r, design_of(fixture("fig5c_axis_fifo.v"))).execute(plan)
    assert ctx.run_counts == {n: 1 for n in plan}


def test_diagnostics_aggregate_in_emission_order():
    ctx = AnalysisContext(default_registry(), design_of(fixture("fig5a_xy.v")))
    ctx.run(["x-prop"])
    expected = list(itertools.chain.from_iterable(
        ctx.result(n).reports for n in ctx.registry.plan(["x-prop"]) if hasattr(ctx.result(n), "reports")))
    assert ctx.diagnostics == expected and expected


def test_execution_is_deterministic():
    def once():
        ctx = AnalysisContext(default_registry(), design_of(fixture("fig5c_axis_fifo.v")))
        ctx.run(["missing-reset", "x-prop", "unloaded"])
        return [r.text() for r in ctx.diagnostics]

    assert once() == once()
