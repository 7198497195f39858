from __future__ import annotations

import copy
import json

import pytest

from hdlscope.builtin import default_registry
from hdlscope.clients import TaintSpecError
from hdlscope.ir import Assign, Pass
from hdlscope.manager import AnalysisContext, AnalysisFailure
from hdlscope.report import dedup
from support.util import analyze, corpus_files, design_of, fixture, reports

CLIENTS = ["missing-reset", "unreachable-state", "deadlock", "undriven", "unloaded",
           "mis-truncation", "port-mismatch", "x-prop"]


def subjects(src, name, options=None):
    return sorted(r.site for r in reports(src, name, options))


# -- missing reset


def test_missing_reset_fig5a():
    assert subjects(fixture("fig5a_xy.v"), "missing-reset") == ["y"]


def test_missing_reset_fig4_clean():
    assert subjects(fixture("fig4_acc.v"), "missing-reset") == []


def test_missing_reset_fifo():
    assert subjects(fixture("fig5c_axis_fifo.v"), "missing-reset") == ["drop_frame", "wr_ptr_cur"]


def test_missing_reset_hw_dep_graph_edges():
    g = analyze(fixture("fig5a_xy.v"), "missing-reset").result("missing-reset").graph
    assert set(g.edges_of("synchronization")) >= {("x", "clk"), ("y", "clk")}
    assert ("x", "rst") in set(g.edges_of("resetting"))
    assert ("x", "y") in set(g.edges_of("data"))
    assert ("y", "x") in set(g.edges_of("control"))


def test_missing_reset_cycle_bound_skips_long_cycles():
    assert subjects(fixture("fig5a_xy.v"), "missing-reset", {"missing-reset.cycle-bound": "1"}) == []


def test_missing_reset_bad_bound_option():
    with pytest.raises(AnalysisFailure, match="cycle-bound"):
        analyze(fixture("fig5a_xy.v"), "missing-reset", options={"missing-reset.cycle-bound": "lots"})


def test_missing_reset_skips_non_synthesizable():
    src = """module m(input clk, input d, output reg q);
      reg t;
      initial begin t = 0; $display("x"); end
      always @(posedge clk) begin q <= t; t <= q ^ d; end endmodule"""
    assert subjects(src, "missing-reset") == ["q", "t"]


# -- unreachable state


def test_unreachable_crc():
    (r,) = reports(fixture("crc32_serial.v"), "unreachable-state")
    assert "count == 32" in r.message and "(0BBBBB vs 100000)" in r.message


def test_unreachable_one_bit_case_clean():
    src = """module m(input clk, input a, output reg y);
      always @(posedge clk) case (a) 1'b0: y <= 0; 1'b1: y <= 1; endcase endmodule"""
    assert reports(src, "unreachable-state") == []


def _brute_reachable_3bit():
    seen, v = set(), 0
    while v not in seen:
        seen.add(v)
        v = (v + 1) % 8
    return seen


def test_unreachable_three_bit_vs_nine():
    assert 9 not in _brute_reachable_3bit()
    msgs = [r.message for r in reports(fixture("sim_counter3.v"), "unreachable-state")]
    assert msgs == ["state count == 9 is unreachable (0BBB vs 1001)"]


def test_unreachable_case_arm_and_wildcards():
    src = """module m(input clk, input rst, output reg [1:0] s, output reg y);
      always @(posedge clk) if (rst) s <= 0; else s <= {1'b0, ~s[0]};
      always @(posedge clk) begin
        case (s) 2'd0: y <= 0; 2'd3: y <= 1; default: y <= 0; endcase
        casez (s) 2'b1?: y <= 1; default: y <= 0; endcase
        casez (s) 2'b?1: y <= 1; default: y <= 0; endcase
      end endmodule"""
    rs = reports(src, "unreachable-state")
    assert sorted(r.site for r in rs) == ["s=2'b11", "s=2'b1z"]


# -- deadlock


def _independent_cycles(graph) -> set[tuple]:
    """Elementary cycles by brute-force DFS from each node over larger-ordered nodes."""
    order = {n: k for k, n in enumerate(sorted(graph.nodes, key=str))}
    found = set()

    def dfs(start, node, path):
        for nxt in graph.successors(node):
            if nxt == start:
                found.add(tuple(path))
            elif order[nxt] > order[start] and nxt not in path:
                dfs(start, nxt, path + [nxt])

    for s in graph.nodes:
        dfs(s, s, [s])
    return found


def _rotate(cycle, labels):
    k = min(range(len(cycle)), key=lambda i: labels[cycle[i]])
    return tuple(cycle[k:] + cycle[:k])


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_deadlock_matches_independent_enumerator(path):
    ctx = analyze(path, "deadlock")
    pdg = ctx.result("proc-dep-graph")
    expected = {_rotate(list(c), pdg.labels) for c in _independent_cycles(pdg.graph)}
    got = [r for r in ctx.result("deadlock").reports]
    assert len(got) == len(expected)
    shown = {tuple(r.message.split(": ", 1)[1].split(" via ")[0].split(" -> ")[:-1]) for r in got}
    assert shown == {tuple(pdg.labels[p] for p in c) for c in expected}


def test_deadlock_sdspi():
    (r,) = reports(fixture("sdspi_llsdspi.v"), "deadlock")
    assert "Process-147 -> Process-220 -> Process-175 -> Process-147" in r.message
    assert all(s in r.message for s in ("o_sclk", "r_z_counter", "startup_hold"))
    assert len(r.evidence) == 3


def test_deadlock_independent_procs():
    src = """module m(input clk, input a, output reg x, output reg y);
      always @(posedge clk) if (a) x <= 1; always @(posedge clk) if (a) y <= 1; endmodule"""
    assert reports(src, "deadlock") == []


def test_deadlock_two_procs():
    src = """module m(input clk, output reg x, output reg y);
      always @(posedge clk) if (y) x <= ~x;
      always @(posedge clk) if (!x) y <= ~y; endmodule"""
    (r,) = reports(src, "deadlock")
    assert r.message.count("->") == 2 and "via y; x" in r.message


# -- undriven / unloaded


def test_undriven_wire():
    assert subjects("module m(output y); wire w; assign y = w; endmodule", "undriven") == ["w"]


def test_undriven_clock_div():
    assert subjects(fixture("clock_div.v"), "undriven") == ["clock_div"]


def test_undriven_input_port_is_driven_externally():
    assert subjects("module m(input a, output y); assign y = a; endmodule", "undriven") == []


def test_unloaded_aes_rst():
    (r,) = dedup(reports(fixture("aes_1cc.v"), "unloaded"))
    assert r.site.endswith("rst") and "aes_1cc" in r.message


def test_unloaded_all_used():
    assert subjects("module m(input a, output y); wire w; assign w = a; assign y = w; endmodule", "unloaded") == []


def test_unloaded_top_output_is_loaded_externally():
    assert subjects("module m(input a, output y); assign y = a; endmodule", "unloaded") == []


# -- mis-truncation


def test_truncation_reports_nonzero_upper_bits():
    src = "module m(input [7:0] a, output [3:0] y); assign y = a; endmodule"
    (r,) = reports(src, "mis-truncation")
    assert "BBBB" in r.message


def test_truncation_equal_widths():
    assert reports("module m(input [3:0] a, output [3:0] y); assign y = a; endmodule", "mis-truncation") == []


def test_truncation_zero_upper_bits():
    src = "module m(input [3:0] a, output [3:0] y); wire [7:0] w; assign w = {4'h0, a}; assign y = w; endmodule"
    assert reports(src, "mis-truncation") == []


def test_truncation_mmio():
    assert subjects(fixture("mmio_trunc.v"), "mis-truncation") == ["rx_mmio_channel"]


# -- port mismatch


def test_port_mismatch_merged_widths():
    src = """module top(input [7:0] a, input [15:0] b, output [7:0] x, output [15:0] y);
      ip u0(a, x); ip u1(b, y); endmodule"""
    rs = reports(src, "port-mismatch")
    assert rs and all(r.category == "width-mismatch" for r in rs)


def test_port_mismatch_consistent():
    src = "module top(input [7:0] a, input [7:0] b, output [7:0] x, output [7:0] y); ip u0(a, x); ip u1(b, y); endmodule"
    assert reports(src, "port-mismatch") == []


def test_port_mismatch_direction_conflict():
    (r,) = reports(fixture("invert_ports.v"), "port-mismatch")
    assert r.category == "direction-conflict" and "u0" in r.message


# -- x propagation


def test_xprop_fig10_path():
    (r,) = reports(fixture("fig10_trojan.v"), "x-prop")
    assert r.category == "x-literal"
    assert [e.split()[1] for e in r.evidence] == ["dsp.OF", "dsp.OVERFLOW", "signal_x", "condition"]


def test_xprop_clean_design():
    assert reports(fixture("fig4_acc.v"), "x-prop") == []


def test_xprop_out_of_bounds_select():
    src = """module m(input clk, input [2:0] i, output reg y);
      reg [4:0] v;
      always @(posedge clk) begin v <= 5'b10101; if (v[i]) y <= 1; else y <= 0; end endmodule"""
    rs = reports(src, "x-prop")
    assert [r.category for r in rs] == ["out-of-bounds"]


def test_xprop_case_equality_blocks():
    src = """module m(input clk, output reg y);
      wire w; assign w = 1'bx;
      always @(posedge clk) if (w === 1'bx) y <= 1; endmodule"""
    assert reports(src, "x-prop") == []


# -- taint


def taint_reports(src, sources, sinks):
    return reports(src, "taint", {"taint.sources": ",".join(sources), "taint.sinks": ",".join(sinks)})


def test_taint_key_leak():
    (r,) = taint_reports(fixture("key_leak.v"), ["key"], ["debug_out", "status"])
    assert r.site == "debug_out"
    assert "key -> key_mix -> dbg_stage -> debug_out" in r.message
    assert len(r.evidence) == 3


def test_taint_no_path():
    assert taint_reports(fixture("key_leak.v"), ["round"], ["debug_out"]) == []


def test_taint_through_external_module():
    src = """module top(input [3:0] secret, input [3:0] pub, output [3:0] o);
      blackbox u(secret, o); endmodule"""
    (r,) = taint_reports(src, ["secret"], ["o"])
    assert "u." in r.message


def test_taint_bit_granular_selects():
    src = """module m(input [7:0] s, input [7:0] p, output [7:0] y, output [3:0] lo);
      assign y = {s[3:0], p[3:0]}; assign lo = y[3:0]; endmodule"""
    assert taint_reports(src, ["s"], ["lo"]) == []
    (r,) = taint_reports(src, ["s"], ["y"])
    assert "bits 4-7" in r.message


def test_taint_unknown_name():
    with pytest.raises(AnalysisFailure) as e:
        taint_reports(fixture("key_leak.v"), ["nope"], ["debug_out"])
    assert isinstance(e.value.__cause__, TaintSpecError)


def _taint_paths(design, sources, sinks):
    ctx = AnalysisContext(default_registry(), design,
                          {"taint.sources": ",".join(sources), "taint.sinks": ",".join(sinks)})
    return {(r.message.split()[3], r.site) for r in ctx.run(["taint"]).result("taint").reports}


SIGS = ["key", "state", "round", "key_in", "plaintext", "key_mix"]
SINKS = ["ciphertext", "debug_out", "status", "dbg_stage"]


def test_taint_monotone_in_sources():
    d = design_of(fixture("key_leak.v"))
    for k in range(len(SIGS)):
        smaller = _taint_paths(d, SIGS[:k], SINKS)
        larger = _taint_paths(d, SIGS[:k + 1], SINKS)
        assert smaller <= larger


def test_taint_monotone_in_edges():
    d = design_of(fixture("key_leak.v"))
    full = _taint_paths(d, SIGS, SINKS)
    top = d.modules[0]
    for p, proc in enumerate(top.procs):
        for k, s in enumerate(proc.statements):
            if not isinstance(s, Assign):
                continue
            cut = copy.deepcopy(d)
            cut.modules[0].procs[p].statements[k] = Pass()
            assert _taint_paths(cut, SIGS, SINKS) <= full


# -- reports


def _all_reports(path):
    ctx = analyze(path, *CLIENTS)
    return [r for n in CLIENTS for r in ctx.result(n).reports]


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_dedup_idempotent(path):
    rs = _all_reports(path)
    once = dedup(rs)
    assert dedup(once) == once
    keys = {r.key for r in rs}
    assert {r.key for r in once} == keys and len(once) == len(keys)


def test_dedup_collapses_instances():
    src = """module leaf(input clk, input d, output reg q); reg junk;
      always @(posedge clk) begin junk <= d; q <= d; end endmodule
      module top(input clk, input d, output a, output b);
      leaf u0(clk, d, a); leaf u1(clk, d, b); endmodule"""
    rs = reports(src, "unloaded")
    assert sorted(r.site for r in rs) == ["u0.junk", "u1.junk"]
    assert len(dedup(rs)) == 1


def test_report_record_fields():
    (r,) = reports(fixture("fig10_trojan.v"), "x-prop")
    rec = json.loads(r.record())
    assert {"analysis", "category", "severity", "file", "line", "message", "evidence"} <= set(rec)
    assert rec["file"] == "fig10_trojan.v" and rec["line"] == r.location.line
    assert r.text().startswith("fig10_trojan.v:")
