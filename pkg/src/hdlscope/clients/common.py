"""Helpers shared by the client analyses."""

from __future__ import annotations

from ..dataflow import BranchInfo, Hierarchy, ProcId
from ..ir import Proc, Syscall, stmt_loc


def synthesizable(proc: Proc) -> bool:
    if proc.attrs.get("synthesizable") == "false":
        return False
    return not any(isinstance(s, Syscall) for s in proc.statements)


def synth_procs(h: Hierarchy):
    return [(pid, proc) for pid, proc in h.procs if synthesizable(proc)]


def control_closure(branches: BranchInfo, pid: ProcId, k: int) -> list[int]:
    """Branch statements that transitively govern statement ``k`` of a Proc."""
    out: list[int] = []
    work = list(branches.of(pid.module, pid.index, k))
    while work:
        b = work.pop()
        if b in out:
            continue
        out.append(b)
        work.extend(branches.of(pid.module, pid.index, b))
    return sorted(out)


def stmt_location(h: Hierarchy, pid: ProcId, k: int) -> str | None:
    proc = h.modules[pid.module].procs[pid.index]
    return stmt_loc(proc.statements[k]) or proc.attrs.get("loc")


def signal_location(h: Hierarchy, name: str) -> str | None:
    info = h.signals.get(name)
    return info.loc if info is not None else None


def signal_module(h: Hierarchy, name: str) -> str:
    info = h.signals.get(name)
    return info.module if info is not None else ""
