from __future__ import annotations

import pytest

from hdlscope.bitvec import LogicVec
from hdlscope.frontend import compile_files
from hdlscope.ir import (Access, Assign, Case, CaseArm, Compute, ConstDecl, Design, Goto, IRError,
                         Label, ModuleDef, Pass, Proc, VarDecl, BitType, emit_text, parse_text,
                         parse_text_unchecked, resolve, validate)
from hdlscope.ir.validate import is_three_address
from support.util import CORPUS, corpus_files

GOLDEN = CORPUS / "golden" / "demo.qh"


def test_empty_design_header():
    text = emit_text(Design("demo"))
    assert text.startswith("design demo;")
    assert "module" not in text
    assert parse_text(text).modules == []


def test_demo_text_matches_golden():
    text = emit_text(compile_files([CORPUS / "demo.v"]).design)
    assert text == GOLDEN.read_text(encoding="utf-8")
    assert "inst i : doubler;" in text
    assert text.count("proc ") == 4


def test_golden_parses_to_demo_structure():
    d = parse_text(GOLDEN.read_text(encoding="utf-8"))
    assert [m.name for m in d.modules] == ["accSqrDouble", "doubler"]
    top, ext = d.modules
    assert len(top.procs) == 4
    assert [p.attrs.get("portConn") for p in top.procs] == [None, None, "to:i", "from:i"]
    assert ext.attrs.get("external") == "true" and ext.procs == []
    assert [(p.id, p.direction) for p in ext.ports()] == [("$t1", "input"), ("$t2", "output")]


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_round_trip_over_corpus(path):
    d = compile_files([path]).design
    text = emit_text(d)
    again = parse_text(text)
    assert again == d
    assert emit_text(again) == text


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_lowered_corpus_is_three_address_and_valid(path):
    d = compile_files([path]).design
    assert validate(d) == []
    for m in d.modules:
        for p in m.procs:
            assert all(is_three_address(s) for s in p.statements)


def test_single_module_text():
    d = parse_text("design t;\nmodule m {\n  var a : u1;\n}\n")
    assert len(d.modules) == 1 and d.modules[0].name == "m"


def test_unresolved_goto_is_an_error():
    text = "design t;\nmodule m {\n  proc {\n    goto L1;\n  }\n}\n"
    with pytest.raises(IRError, match="L1"):
        parse_text(text)


def test_syntax_error_has_position():
    with pytest.raises(IRError, match=r"\d+:\d+"):
        parse_text("design t;\nmodule m {\n  var : u1;\n}\n")


def test_validate_duplicate_modules():
    d = Design("t", [ModuleDef("m"), ModuleDef("m")])
    diags = validate(d)
    assert len(diags) == 1 and "duplicate" in diags[0]


def test_validate_case_arm_missing_label():
    m = ModuleDef("m", vars=[VarDecl("s", BitType(1))])
    m.procs.append(Proc([Case("case", "s", (CaseArm(LogicVec("0"), "nowhere"),)), Pass()]))
    diags = validate(Design("t", [m]))
    assert any("nowhere" in d for d in diags)


def test_validate_nested_expression_rejected():
    m = ModuleDef("m", vars=[VarDecl("a", BitType(1)), VarDecl("b", BitType(1))],
                  consts=[ConstDecl("c", LogicVec("1"))])
    m.procs.append(Proc([Label("top"), Assign("=", Access("a"), Compute("and", ("b", "c"))),
                         Goto("top")]))
    assert validate(Design("t", [m])) == []
    m.procs[0].statements[1] = Assign("=", Access("a"), Compute("and", ("b", "missing")))
    assert validate(Design("t", [m])) == ["module m proc 0: undeclared identifier 'missing'"]


def test_resolve_instance_port():
    d = parse_text(GOLDEN.read_text(encoding="utf-8"))
    r = resolve(d, "i.$t1", "accSqrDouble")
    assert r.module.name == "doubler" and r.decl.id == "$t1" and r.decl.direction == "input"
    assert r.instance_path == ("i",) and r.kind == "net"


def test_resolve_local_and_unknown():
    d = parse_text(GOLDEN.read_text(encoding="utf-8"))
    assert resolve(d, "acc", "accSqrDouble").decl.id == "acc"
    with pytest.raises(IRError):
        resolve(d, "i.nope", "accSqrDouble")
    with pytest.raises(IRError):
        resolve(d, "j.$t1", "accSqrDouble")


def test_emit_is_deterministic():
    d = compile_files([CORPUS / "uart.v"]).design
    assert emit_text(d) == emit_text(compile_files([CORPUS / "uart.v"]).design)


def test_unchecked_parse_keeps_invalid_design():
    text = "design t;\nmodule m {\n  proc {\n    goto L1;\n  }\n}\n"
    d = parse_text_unchecked(text)
    assert validate(d)
