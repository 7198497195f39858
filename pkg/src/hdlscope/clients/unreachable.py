"""Unreachable states: equality tests and case arms that can never match."""

from __future__ import annotations

from ..bitvec import AbsVec, LogicVec, may_equal
from ..dataflow import ConstMap, DefUse, Hierarchy, ProcId, qualify
from ..ir import Assign, Case, Compute, If, stmt_loc
from ..report import Report, ReportSet, make_report
from .common import synth_procs

WILDCARDS = {"casex": "xz?", "casez": "z?"}


def _fit(v: AbsVec, width: int) -> AbsVec:
    if v.width >= width:
        return AbsVec(v.bits[v.width - width:], v.signed)
    pad = v.bits[0] if v.signed else "0"
    return AbsVec(pad * (width - v.width) + v.bits, v.signed)


class _Module:
    def __init__(self, h: Hierarchy, du: DefUse, cm: ConstMap, pid: ProcId):
        self.h, self.du, self.cm, self.pid = h, du, cm, pid
        self.consts = h.consts(pid.module)

    def const(self, name: str) -> LogicVec | None:
        c = self.consts.get(name)
        return c.value if c is not None and isinstance(c.value, LogicVec) else None

    def value(self, name: str) -> AbsVec | None:
        c = self.const(name)
        if c is not None:
            return AbsVec.from_logic(c)
        return self.cm.get(qualify(self.pid.path, name))

    def compare_of(self, cond: str) -> tuple[str, LogicVec, str] | None:
        """If ``cond`` is a temp ``eq x c`` / ``equiv x c``, return (x, c, op)."""
        refs = self.du.defs_of.get((self.pid.module, cond), [])
        if len(refs) != 1:
            return None
        stmt = self.du.statement(refs[0])
        if not isinstance(stmt, Assign) or not isinstance(stmt.rhs, Compute):
            return None
        rhs = stmt.rhs
        if rhs.op not in ("eq", "equiv") or len(rhs.args) != 2:
            return None
        a, b = rhs.args
        if self.const(a) is not None and self.const(b) is None:
            a, b = b, a
        c = self.const(b)
        if c is None or self.const(a) is not None:
            return None
        return a, c, rhs.op


def _describe(h: Hierarchy, pid: ProcId, name: str, m: _Module) -> str:
    """Readable operand name: an extension temp is shown as its source signal.

    Concatenations with constants (``{1'b0, count}``) count as extensions.
    """
    refs = m.du.defs_of.get((pid.module, name), [])
    if len(refs) == 1:
        stmt = m.du.statement(refs[0])
        if isinstance(stmt, Assign) and isinstance(stmt.rhs, Compute):
            if stmt.rhs.op in ("zext", "sext", "cast"):
                return _describe(h, pid, stmt.rhs.args[0], m)
            if stmt.rhs.op == "concat":
                consts = h.consts(pid.module)
                rest = [a for a in stmt.rhs.args if a not in consts]
                if len(rest) == 1:
                    return _describe(h, pid, rest[0], m)
    return qualify(pid.path, name)


def detect_unreachable_state(h: Hierarchy, du: DefUse, cm: ConstMap) -> ReportSet:
    reports: list[Report] = []
    for pid, proc in synth_procs(h):
        m = _Module(h, du, cm, pid)
        for k, stmt in enumerate(proc.statements):
            if isinstance(stmt, If):
                found = m.compare_of(stmt.cond)
                if found is None:
                    continue
                x, c, _ = found
                v = m.value(x)
                if v is None or v.is_bottom():
                    continue
                cv = AbsVec.from_logic(c)
                width = max(v.width, cv.width)
                v, cv = _fit(v, width), _fit(cv, width)
                if not may_equal(v, cv):
                    name = _describe(h, pid, x, m)
                    reports.append(make_report(
                        "unreachable-state", "unreachable-state", "warning", stmt_loc(stmt),
                        f"state {name} == {c.to_uint() if c.is_defined() else c} is unreachable "
                        f"({v.bits} vs {cv.bits})",
                        site=name, module=pid.module))
            elif isinstance(stmt, Case):
                v = m.value(stmt.subject)
                if v is None or v.is_bottom():
                    continue
                wild = WILDCARDS.get(stmt.kind, "")
                name = _describe(h, pid, stmt.subject, m)
                for arm in stmt.arms:
                    p = arm.pattern
                    width = max(v.width, p.width)
                    pv = _fit(AbsVec.from_logic(p), width)
                    sv = _fit(v, width)
                    pbits = p.bits.rjust(width, "0") if not p.signed else p.bits.rjust(width, p.bits[0])
                    mask = [b in wild for b in pbits]
                    pv = AbsVec("".join("T" if w else b for w, b in zip(mask, pv.bits)))
                    sv = AbsVec("".join("T" if w else b for w, b in zip(mask, sv.bits)))
                    if not may_equal(sv, pv):
                        reports.append(make_report(
                            "unreachable-state", "unreachable-arm", "warning", stmt_loc(stmt),
                            f"case arm {p} of {name} is unreachable ({sv.bits} vs {pv.bits})",
                            site=f"{name}={p}", module=pid.module, subject=f"{pid.module}.{name.rsplit('.', 1)[-1]}={p}"))
    return ReportSet(reports)
