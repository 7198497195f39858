from __future__ import annotations

import json

import pytest

from hdlscope.bitvec import LogicVec
from support.util import CORPUS, analyze, fixture

LABELS = json.loads((CORPUS / "labels.json").read_text())


def infer(src, *names):
    ctx = analyze(src, "clocks", "regs", "resets", *names)
    return ctx.result("clocks"), ctx.result("regs"), ctx.result("resets")


# -- clocks


def test_clocks_demo():
    clocks, _, _ = infer(fixture("demo.v"))
    assert set(clocks.members) == {"clk"}


def test_clocks_none_without_always():
    clocks, regs, _ = infer("module m(input a, output y); assign y = ~a; endmodule")
    assert clocks.members == {} and regs.regs == {}


def test_clocks_through_submodule_port():
    clocks, regs, _ = infer("""
      module leaf(input c, input d, output reg q); always @(posedge c) q <= d; endmodule
      module top(input clk, input d, output q); leaf u(.c(clk), .d(d), .q(q)); endmodule""")
    assert set(clocks.members) == {"clk", "u.c"}
    assert regs.regs["u.q"].clocks == {"u.c"}


def test_clocks_through_buffer_wire():
    clocks, _, _ = infer("""module m(input clk, input d, output reg q);
      wire gclk; assign gclk = clk; always @(posedge gclk) q <= d; endmodule""")
    assert set(clocks.members) == {"clk", "gclk"}


def test_clock_used_in_logic_is_flagged():
    clocks, _, _ = infer("""module m(input clk, input en, input d, output reg q, output y);
      assign y = clk & en; always @(posedge clk) q <= d; endmodule""")
    assert "clk" in clocks.flagged


def test_async_reset_is_not_a_clock():
    clocks, _, _ = infer(fixture("sim_lfsr4.v"))
    assert set(clocks.members) == {"clk"}


# -- registers


def test_regs_demo():
    _, regs, _ = infer(fixture("demo.v"))
    assert set(regs.regs) == {"acc"} and regs.regs["acc"].clocks == {"clk"}


def test_regs_combinational_always_has_none():
    _, regs, _ = infer("module m(input a, input b, output reg y); always @(*) y = a & b; endmodule")
    assert regs.regs == {}


def test_regs_two_guard_proc():
    _, regs, _ = infer("""module m(input clock1, input clock2, output reg x, output reg y);
      always @(posedge clock1) begin x <= 1; @(negedge clock2); y <= 0; end endmodule""")
    assert regs.regs["x"].clocks == {"clock1"}
    assert regs.regs["y"].clocks == {"clock2"}


def test_regs_blocking_under_edge_is_linted_not_classified():
    _, regs, _ = infer("""module m(input clk, input d, output reg q, output reg r);
      always @(posedge clk) begin q = d; r <= q; end endmodule""")
    assert set(regs.regs) == {"r"}
    assert any("q" in r.message for r in regs.reports)


def test_regs_reference_known_clocks():
    for name in LABELS:
        clocks, regs, resets = infer(fixture(name))
        for info in regs.regs.values():
            assert info.clocks and info.clocks <= set(clocks.members)
        for reg in resets.resets:
            assert reg in regs.regs


# -- ground truth


def _scores(predicted: set, truth: set) -> tuple[float, float]:
    tp = len(predicted & truth)
    precision = tp / len(predicted) if predicted else 1.0
    recall = tp / len(truth) if truth else 1.0
    return precision, recall


@pytest.mark.parametrize("name", sorted(LABELS))
def test_labels_precision_recall(name):
    clocks, regs, _ = infer(fixture(name))
    truth = LABELS[name]
    assert _scores(set(clocks.members), set(truth["clocks"])) == (1.0, 1.0)
    predicted = {(r, c) for r, info in regs.regs.items() for c in info.clocks}
    expected = {(r, c) for r, cs in truth["regs"].items() for c in cs}
    assert _scores(predicted, expected) == (1.0, 1.0)


def test_labels_cover_enough_of_the_corpus():
    assert len(LABELS) >= 10
    assert sum(len(v["regs"]) for v in LABELS.values()) >= 70


# -- resets


def test_resets_fig5a():
    _, _, resets = infer(fixture("fig5a_xy.v"))
    x = resets.get("x")
    assert (x.signal, x.active_high, x.value) == ("rst", True, LogicVec("1"))
    assert resets.get("y") is None and "y" in resets.resets


def test_resets_fig4():
    _, _, resets = infer(fixture("fig4_acc.v"))
    acc = resets.get("acc")
    assert (acc.signal, acc.active_high, acc.value.to_uint()) == ("reset", True, 0)


def test_resets_active_low_async():
    _, _, resets = infer(fixture("sim_lfsr4.v"))
    st = resets.get("state")
    assert (st.signal, st.active_high, st.value.bits) == ("rst_n", False, "0001")


def test_resets_unconditional_constant_is_not_a_reset():
    _, _, resets = infer("module m(input clk, output reg q); always @(posedge clk) q <= 1; endmodule")
    assert resets.get("q") is None


def test_resets_case_on_reset():
    _, _, resets = infer("""module m(input clk, input rst, input d, output reg q);
      always @(posedge clk) case (rst) 1'b1: q <= 0; default: q <= d; endcase endmodule""")
    q = resets.get("q")
    assert q is not None and q.signal == "rst" and q.active_high


def test_resets_confidence_rises_with_shared_signal():
    _, _, resets = infer(fixture("seq_multiplier.v"))
    shared = resets.get("busy").confidence
    _, _, single = infer("""module m(input clk, input clr, input d, output reg q);
      always @(posedge clk) if (clr) q <= 0; else q <= d; endmodule""")
    assert shared > single.get("q").confidence
