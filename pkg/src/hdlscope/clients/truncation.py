"""Mis-truncation: assignments that drop possibly non-zero high bits."""

from __future__ import annotations

from ..bitvec import AbsVec
from ..dataflow import ConstMap, Hierarchy, ProcId, qualify
from ..ir import Access, Assign, IndexedSel, Range, bit_width, stmt_loc
from ..report import ReportSet, make_report
from .common import synth_procs


def _access_width(h: Hierarchy, pid: ProcId, acc: Access) -> int | None:
    if acc.sel is not None:
        return acc.sel.width
    c = h.consts(pid.module).get(acc.name)
    if c is not None:
        return bit_width(c.ty)
    info = h.signals.get(qualify(pid.path, acc.name))
    return None if info is None else info.width


def _access_value(h: Hierarchy, cm: ConstMap, pid: ProcId, acc: Access) -> AbsVec | None:
    c = h.consts(pid.module).get(acc.name)
    v = AbsVec.from_logic(c.value) if c is not None and hasattr(c.value, "bits") else cm.get(qualify(pid.path, acc.name))
    if v is None or acc.index is not None:
        return v
    if isinstance(acc.sel, Range):
        w = v.width
        return AbsVec("".join(v.bits[w - 1 - k] if k < w else "X" for k in range(acc.sel.high, acc.sel.low - 1, -1)))
    if isinstance(acc.sel, IndexedSel):
        return AbsVec.uniform("T", acc.sel.width)
    return v


def _extension_only(v: AbsVec, keep: int) -> bool:
    """Constant whose dropped bits merely extend the kept value (zero or sign)."""
    if not v.is_fixed():
        return False
    dropped, kept = v.bits[:v.width - keep], v.bits[v.width - keep:]
    return set(dropped) <= {"0"} or set(dropped) == {kept[0]}


def detect_mis_truncation(h: Hierarchy, cm: ConstMap) -> ReportSet:
    reports = []
    for pid, proc in synth_procs(h):
        consts = h.consts(pid.module)
        for stmt in proc.statements:
            if not isinstance(stmt, Assign) or not isinstance(stmt.rhs, Access):
                continue
            lw = _access_width(h, pid, stmt.lhs)
            rw = _access_width(h, pid, stmt.rhs)
            if lw is None or rw is None or rw <= lw:
                continue
            v = _access_value(h, cm, pid, stmt.rhs)
            if v is None:
                continue
            dropped = v.bits[:rw - lw]
            if all(b in "0U" for b in dropped):
                continue
            if stmt.rhs.name in consts and _extension_only(v, lw):
                continue
            target = qualify(pid.path, stmt.lhs.name)
            reports.append(make_report(
                "mis-truncation", "mis-truncation", "warning", stmt_loc(stmt),
                f"assignment to {target} truncates {rw} bits to {lw}; dropped bits {dropped} may be non-zero",
                site=target, module=pid.module))
    return ReportSet(reports)
