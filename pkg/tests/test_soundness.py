from __future__ import annotations

import types

import networkx as nx
import pytest

from hdlscope.bitvec import AbsVec
from hdlscope.report import ReportSet, make_report
from support.soundness import check_fixture
from support.util import corpus_files, fixture

SIMULABLE = {"fig5a_xy", "sim_acc4", "sim_counter3", "sim_lfsr4", "sim_shift", "sim_toggle", "sim_traffic"}


@pytest.fixture(scope="module")
def verdicts():
    return {p.stem: check_fixture(p) for p in corpus_files()}


def test_simulable_fixture_set(verdicts):
    assert {n for n, v in verdicts.items() if v.simulable} == SIMULABLE


@pytest.mark.parametrize("name", sorted(SIMULABLE))
def test_fixture_is_sound(verdicts, name):
    v = verdicts[name]
    assert v.const_violations == []  # (a)
    assert v.unreachable_violations == []  # (b)
    assert v.closure_violations == []  # (c)
    assert v.checked_values > 0 and v.cycles > 0


def test_non_simulable_fixtures_say_why(verdicts):
    for v in verdicts.values():
        if not v.simulable:
            assert v.why


def test_checks_are_exercised(verdicts):
    assert sum(v.unreachable_reports for v in verdicts.values() if v.simulable) >= 1
    stuck = {(n, r) for n, v in verdicts.items() for r in v.stuck_registers}
    assert ("sim_toggle", "parity") in stuck and ("sim_toggle", "seen") in stuck


# -- the checks catch wrong analysis results


def test_detects_unsound_constant():
    def narrow(ctx):
        cm = ctx.result("fi-const-prop")
        cm.values["count"] = AbsVec("000")
    v = check_fixture(fixture("sim_counter3.v"), narrow)
    assert v.const_violations and not v.ok


def test_detects_false_unreachable_report():
    def fake(ctx):
        ctx.cache["unreachable-state"] = ReportSet([make_report(
            "unreachable-state", "unreachable-state", "warning", "sim_counter3.v:9",
            "state en == 1 is unreachable", site="en", module="counter3")])
    v = check_fixture(fixture("sim_counter3.v"), fake)
    assert v.unreachable_violations


def test_detects_closure_in_wrong_direction():
    def descendants(ctx):
        mr = ctx.result("missing-reset")

        def closure(self):
            out = set(self.registers)
            for r in self.registers:
                out |= nx.descendants(self.graph.graph, r)
            return out
        mr.closure = types.MethodType(closure, mr)
    v = check_fixture(fixture("sim_toggle.v"), descendants)
    assert v.closure_violations == ["seen"]


def test_detects_missing_report():
    def drop(ctx):
        ctx.result("missing-reset").registers.clear()
    v = check_fixture(fixture("sim_toggle.v"), drop)
    assert sorted(v.closure_violations) == ["parity", "seen"]
