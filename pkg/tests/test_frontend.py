from __future__ import annotations

import pytest

from hdlscope.bitvec import LogicVec
from hdlscope.dataflow import analyze_hierarchy
from hdlscope.frontend import FrontendError, compile_files, compile_source
from hdlscope.ir import Assign, Guard, emit_text, fmt_stmt, validate
from support.irsim import Simulator
from support.util import CORPUS, corpus_files


def body(proc) -> list[str]:
    """Statement text without attribute suffixes."""
    return [fmt_stmt(s).split(" (*")[0] for s in proc.statements]


def module(src: str, name: str | None = None):
    d = compile_source(src).design
    return d.module(name) if name else d.modules[0]


# -- compile


def test_demo_has_four_procs():
    d = compile_files([CORPUS / "demo.v"]).design
    top = d.module("accSqrDouble")
    assert len(top.procs) == 4
    assert [p.attrs["origin"] for p in top.procs] == ["always", "assign", "assign", "assign"]
    assert top.procs[2].attrs["portConn"] == "to:i"
    assert top.procs[3].attrs["portConn"] == "from:i"


def test_empty_module():
    d = compile_source("module m; endmodule").design
    assert [m.name for m in d.modules] == ["m"]
    assert d.modules[0].procs == [] and list(d.modules[0].signals()) == []


def test_conflicting_definitions(tmp_path):
    files = []
    for k, text in enumerate(["module a; endmodule", "module b; endmodule", "module a; endmodule"]):
        f = tmp_path / f"f{k}.v"
        f.write_text(text)
        files.append(f)
    with pytest.raises(FrontendError, match="conflicting definitions of module a"):
        compile_files(files)


def test_every_proc_has_origin_and_port_procs_have_portconn():
    for path in corpus_files():
        d = compile_files([path]).design
        for m in d.modules:
            for p in m.procs:
                assert p.attrs.get("origin") in ("always", "assign")
                conn = p.attrs.get("portConn")
                assert conn is None or conn.split(":")[0] in ("to", "from")


def test_compile_is_deterministic():
    for path in corpus_files():
        a = emit_text(compile_files([path]).design)
        b = emit_text(compile_files([path]).design)
        assert a == b


def test_lowered_designs_validate():
    for path in corpus_files():
        assert validate(compile_files([path]).design) == []


# -- always blocks


def test_lower_always_loop_shape():
    m = module("module m(input clk, input in); reg acc; always @(clk) acc <= acc + in; endmodule")
    (proc,) = m.procs
    assert proc.attrs["origin"] == "always"
    assert body(proc) == ["$L0:", "@(clk);", "$t0 = add acc in;", "acc <= $t0;", "goto $L0;"]


def test_lower_always_empty_body():
    m = module("module m(input clk); always @(clk) begin end endmodule")
    assert body(m.procs[0]) == ["$L0:", "@(clk);", "pass;", "goto $L0;"]


def test_lower_always_two_guards():
    m = module("""module m(input clock1, input clock2, output reg x, output reg y);
      always @(posedge clock1) begin x <= 1; @(negedge clock2); y <= 0; end
    endmodule""")
    (proc,) = m.procs
    guards = [t for s, t in zip(proc.statements, body(proc)) if isinstance(s, Guard)]
    assert guards == ["@(posedge clock1);", "@(negedge clock2);"]
    kinds = [type(s).__name__ for s in proc.statements]
    assert kinds.index("Guard") < kinds.index("Assign")


def test_blocking_and_nonblocking_preserved():
    m = module("""module m(input clk, input a, output reg q);
      reg t; always @(posedge clk) begin t = a; q <= t; end endmodule""")
    ops = [s.op for s in m.procs[0].statements if isinstance(s, Assign)]
    assert ops == ["=", "<="]


def test_star_sensitivity_lists_read_identifiers():
    m = module("module m(input a, input b, output reg y); always @(*) y = a & b; endmodule")
    assert body(m.procs[0])[1] == "@(a or b);"


# -- continuous assignments


def test_lower_assign():
    m = module("module m(input acc, output sqr); assign sqr = acc * acc; endmodule")
    (proc,) = m.procs
    assert proc.attrs["origin"] == "assign"
    assert body(proc) == ["$L0:", "@(acc);", "$t0 = mul acc acc;", "sqr <- $t0;", "goto $L0;"]


def test_lower_constant_assign_has_no_guard_inputs():
    m = module("module m(output w); assign w = 1; endmodule")
    stmts = m.procs[0].statements
    assert not any(isinstance(s, Guard) and s.events for s in stmts)
    assert [s.op for s in stmts if isinstance(s, Assign)] == ["<-"]


def test_two_assigns_to_one_wire():
    m = module("module m(input a, input b, output w); assign w = a; assign w = b; endmodule")
    targets = [s.lhs.name for p in m.procs for s in p.statements if isinstance(s, Assign) and s.op == "<-"]
    assert targets == ["w", "w"]


# -- port connections


def test_port_connection_procs_for_demo():
    top = compile_files([CORPUS / "demo.v"]).design.module("accSqrDouble")
    assert "i.$t1 <- sqr;" in body(top.procs[2])
    assert "out <- i.$t2;" in body(top.procs[3])


def test_instance_without_ports():
    d = compile_source("module leaf; endmodule\nmodule top; leaf u(); endmodule").design
    assert d.module("top").procs == []


def test_named_connections_follow_declaration_order():
    d = compile_source("""
      module leaf(input a, input b, output y); assign y = a & b; endmodule
      module top(input p, input q, output r); leaf u(.y(r), .b(q), .a(p)); endmodule
    """).design
    top = d.module("top")
    conns = [(p.attrs["portConn"], body(p)[2]) for p in top.procs]
    assert conns == [("to:u", "u.a <- p;"), ("to:u", "u.b <- q;"), ("from:u", "r <- u.y;")]


def test_arity_mismatch_against_known_module():
    with pytest.raises(FrontendError, match="3 connections"):
        compile_source("module leaf(input a, output y); endmodule\n"
                       "module top(input p, output r, input s); leaf u(p, r, s); endmodule")


# -- signature inference


def test_infer_signature_demo():
    d = compile_files([CORPUS / "demo.v"]).design
    ext = d.module("doubler")
    assert ext.attrs["external"] == "true"
    ports = [(p.id, p.direction, p.ty.width) for p in ext.ports()]
    assert ports == [("$t1", "input", 1), ("$t2", "output", 1)]


def test_infer_signature_no_connections():
    d = compile_source("module top; blackbox u(); endmodule").design
    ext = d.module("blackbox")
    assert ext.attrs["external"] == "true" and ext.ports() == []


def test_infer_signature_merges_widths_with_warning():
    res = compile_source("""module top(input [7:0] a, input [15:0] b, output [7:0] x, output [15:0] y);
      ip u0(a, x);
      ip u1(b, y);
    endmodule""")
    ext = res.design.module("ip")
    assert [(p.id, p.ty.width) for p in ext.ports()] == [("$t1", 16), ("$t2", 16)]
    assert any("conversion" in w.message for w in res.warnings)


# -- rejected constructs


@pytest.mark.parametrize("src, what", [
    ("module m(inout a); endmodule", "inout"),
    ("module m; genvar i; endmodule", "genvar"),
    ("module m; generate endgenerate endmodule", "generate"),
    ("module m; function f; input a; f = a; endfunction endmodule", "function"),
    ("module m; task t; endtask endmodule", "task"),
])
def test_unsupported_constructs(src, what):
    with pytest.raises(FrontendError, match="unsupported construct"):
        compile_source(src)


def test_syntax_error_cites_location():
    with pytest.raises(FrontendError) as e:
        compile_source("module m(input a);\n  assign = a;\nendmodule\n")
    assert "input.v:2" in str(e.value)


def test_parameters_fold_into_constants():
    d = compile_source("""
      module leaf #(parameter W = 4) (input [W-1:0] a, output [W-1:0] y); assign y = a; endmodule
      module top(input [7:0] p, output [7:0] r); leaf #(.W(8)) u(.a(p), .y(r)); endmodule
    """).design
    leaves = [m for m in d.modules if m.name.startswith("leaf")]
    assert len(leaves) == 1
    assert {p.id: p.ty.width for p in leaves[0].ports()} == {"a": 8, "y": 8}


def test_define_substitution():
    res = compile_source("`define WIDTH 3\nmodule m(input [`WIDTH-1:0] a); endmodule")
    assert res.design.modules[0].ports()[0].ty.width == 3


# -- semantics spot check


def test_fig4_accumulator_interpretation():
    d = compile_files([CORPUS / "fig4_acc.v"]).design
    sim = Simulator(analyze_hierarchy(d))
    seen = []
    for reset, value in [(1, 1), (0, 2), (0, 3), (0, 4)]:
        seen.append(sim.state["acc"].v)
        sim.cycle({"clk": LogicVec("1"), "reset": LogicVec.from_int(reset, 1),
                   "in": LogicVec.from_int(value, 8)})
    assert [v.to_uint() for v in seen] == [None, 0, 2, 5]
    assert seen[0].bits == "xxxxxxxx"
