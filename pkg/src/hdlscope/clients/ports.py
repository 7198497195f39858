"""Port mismatches: merged widths on inferred modules and conflicting output connections."""

from __future__ import annotations

from ..dataflow import DefChain, Hierarchy, qualify
from ..ir import Access, Assign, Range
from ..report import ReportSet, make_report
from .common import stmt_location


def _written_bits(stmt, width: int | None) -> frozenset[int] | None:
    """Bit offsets a definition writes; None when unknown (whole signal assumed)."""
    if isinstance(stmt, Assign) and isinstance(stmt.lhs.sel, Range) and stmt.lhs.index is None:
        return frozenset(range(stmt.lhs.sel.low, stmt.lhs.sel.high + 1))
    return None if width is None else frozenset(range(width))


def _overlaps(a: frozenset[int] | None, b: frozenset[int] | None) -> bool:
    return a is None or b is None or bool(a & b)


def _port_name(proc, stmt) -> str:
    """The instance port feeding ``stmt``, looking through one temporary copy."""
    rhs = stmt.rhs
    if isinstance(rhs, Access) and rhs.name.startswith("$t"):
        for s in proc.statements:
            if isinstance(s, Assign) and s.lhs.name == rhs.name and isinstance(s.rhs, Access):
                return s.rhs.name
    return getattr(rhs, "name", "?")


def detect_port_mismatch(h: Hierarchy, dc: DefChain) -> ReportSet:
    reports = []
    inst_locs: dict[str, list[str]] = {}
    for m in h.design.modules:
        for inst in m.instances:
            inst_locs.setdefault(inst.module, []).append(inst.attrs.get("loc", ""))
    for m in h.design.modules:
        if not m.external:
            continue
        for d in m.ports():
            merged = d.attrs.get("mergedWidths")
            if merged and "explained" not in d.attrs:
                locs = sorted(inst_locs.get(m.name, [""]))
                reports.append(make_report(
                    "port-mismatch", "width-mismatch", "warning", locs[0],
                    f"port {d.id} of inferred module {m.name} is connected with widths {merged}",
                    site=f"{m.name}.{d.id}", evidence=locs, module=m.name, subject=d.id))
    for pid, proc in h.procs:
        conn = proc.attrs.get("portConn", "")
        if not conn.startswith("from:"):
            continue
        for k, stmt in enumerate(proc.statements):
            if not isinstance(stmt, Assign):
                continue
            dst = qualify(pid.path, stmt.lhs.name)
            info = h.signals.get(dst)
            mine = _written_bits(stmt, info.width if info else None)
            others = [(p, r) for p, r in dc.defs.get(dst, []) if p != pid and _overlaps(
                mine, _written_bits(h.modules[p.module].procs[p.index].statements[r.index],
                                    info.width if info else None))]
            is_input = info is not None and info.direction == "input"
            if not others and not is_input:
                continue
            why = "an input port of its module" if is_input else "driven elsewhere"
            evidence = [stmt_location(h, p, r.index) or "" for p, r in others]
            reports.append(make_report(
                "port-mismatch", "direction-conflict", "warning", stmt_location(h, pid, k),
                f"output port {_port_name(proc, stmt).removeprefix(conn[5:] + '.')} of instance {conn[5:]} drives {dst}, which is {why}; "
                "ports may be connected in the wrong order",
                site=dst, evidence=evidence, module=pid.module))
    return ReportSet(reports)
