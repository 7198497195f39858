"""Undriven and unloaded signals."""

from __future__ import annotations

from ..dataflow import DefChain, Hierarchy
from ..report import ReportSet, make_report
from .common import signal_location, stmt_location


def _skip(h: Hierarchy, name: str) -> bool:
    info = h.signals[name]
    return info.temp or h.modules[info.module].external


def detect_undriven(h: Hierarchy, dc: DefChain) -> ReportSet:
    reports = []
    for name in sorted(dc.uses):
        if name not in h.signals or name in dc.defs or _skip(h, name) or h.signals[name].top_input:
            continue
        pid, ref = dc.uses[name][0]
        info = h.signals[name]
        reports.append(make_report(
            "undriven", "undriven", "warning", stmt_location(h, pid, ref.index),
            f"signal {name} is used but never driven", site=name, module=info.module,
            evidence=[f"{signal_location(h, name) or ''} declared".strip()]))
    return ReportSet(reports)


def detect_unloaded(h: Hierarchy, dc: DefChain) -> ReportSet:
    reports = []
    for name in sorted(dc.defs):
        if name not in h.signals or name in dc.uses or _skip(h, name) or h.signals[name].top_output:
            continue
        info = h.signals[name]
        loc = signal_location(h, name)
        if loc is None:
            pid, ref = dc.defs[name][0]
            loc = stmt_location(h, pid, ref.index)
        reports.append(make_report(
            "unloaded", "unloaded", "warning", loc,
            f"signal {name} of module {info.module} is driven but never used",
            site=name, module=info.module))
    return ReportSet(reports)
