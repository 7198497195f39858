"""Cycle-based concrete simulator for elaborated IR, used as a test oracle.

Only the concrete operator semantics of ``hdlscope.bitvec`` are shared with
the package; no analysis result is consulted. Every value carries a
*poison* flag meaning "derived from a power-up unknown". Poisoned values are
excluded from the constant-propagation check because the analysis models
values produced by assignments, not the power-up state.

One cycle: settle the level-sensitive procs, run every edge-triggered proc
once (blocking writes land immediately, non-blocking writes are collected),
apply the collected writes in order, then settle again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from hdlscope.bitvec import LogicVec, eval_compute
from hdlscope.dataflow import Hierarchy, qualify
from hdlscope.ir import (Access, Assign, Case, Goto, Guard, If, Label, Pass, Range, Return,
                         bit_width, is_signed)

STEP_LIMIT = 10_000
SETTLE_LIMIT = 64


class SimError(Exception):
    pass


@dataclass(frozen=True)
class Val:
    v: LogicVec
    poison: bool = False


def _fit(v: LogicVec, width: int) -> LogicVec:
    """Truncate to the LSBs or zero-extend, as an assignment does."""
    if v.width >= width:
        return LogicVec(v.bits[v.width - width:], v.signed)
    return LogicVec("0" * (width - v.width) + v.bits, v.signed)


def _resolve_wire(a: str, b: str) -> str:
    if a == b or b == "z":
        return a
    if a == "z":
        return b
    return "x"


def _case_match(kind: str, subject: str, pattern: str) -> bool:
    wild = {"case": "", "casez": "z", "casex": "xz"}[kind]
    return all(s == p or s in wild or p in wild for s, p in zip(subject, pattern))


@dataclass
class Observer:
    """Collects what the checks need while the simulator runs."""

    on_store: object = None  # callable(name, Val) for every completed write
    true_ifs: set = field(default_factory=set)  # (module, loc) of Ifs seen taken, unpoisoned
    case_hits: set = field(default_factory=set)  # (module, loc, pattern) of arms seen matching


class Simulator:
    def __init__(self, h: Hierarchy, observer: Observer | None = None):
        self.h = h
        self.obs = observer or Observer()
        self.inputs = sorted(n for n, s in h.signals.items() if s.top_input)
        self.edge_procs, self.level_procs = [], []
        for pid, proc in h.procs:
            if proc.attrs.get("synthesizable") == "false":
                raise SimError(f"{pid}: non-synthesizable procs are not simulated")
            guards = [k for k, s in enumerate(proc.statements) if isinstance(s, Guard)]
            if guards and proc.statements[guards[0]].edge_sensitive:
                g = proc.statements[guards[0]]
                if not any(e.edge == "posedge" for e in g.events):
                    raise SimError(f"{pid}: only posedge-clocked procs are simulated")
                self.edge_procs.append((pid, proc, guards[0]))
            else:
                self.level_procs.append((pid, proc, guards[0] if guards else -1))
        for name, s in h.signals.items():
            if s.width is None or s.array_len is not None:
                raise SimError(f"{name}: reals and arrays are not simulated")
        self.state: dict[str, Val] = {}
        self.contribs: dict[str, dict] = {}
        for name, s in h.signals.items():
            if s.kind == "var":
                self.state[name] = Val(LogicVec.all_x(s.width, s.signed), True)
            else:
                self.state[name] = Val(LogicVec("z" * s.width, s.signed), True)
                self.contribs[name] = {}

    # -- state snapshots
    def snapshot(self):
        # Inputs are excluded: every cycle overwrites them and settle re-runs
        # every level-sensitive proc, so nothing else can observe old inputs.
        inputs = set(self.inputs)
        return (tuple(sorted((kv for kv in self.state.items() if kv[0] not in inputs),
                             key=lambda kv: kv[0])),
                tuple(sorted((n, tuple(sorted(c.items(), key=str))) for n, c in self.contribs.items())))

    def restore(self, snap):
        self.state.update(snap[0])
        self.contribs = {n: dict(c) for n, c in snap[1]}

    # -- operands
    def operand(self, pid, name: str) -> Val:
        consts = self.h.consts(pid.module)
        if name in consts:
            return Val(consts[name].value)
        return self.state[qualify(pid.path, name)]

    def load(self, pid, acc: Access) -> Val:
        base = self.operand(pid, acc.name)
        if acc.sel is None:
            return base
        w = base.v.width
        if isinstance(acc.sel, Range):
            lo, width, poison = acc.sel.low, acc.sel.width, base.poison
        else:
            idx = self.operand(pid, acc.sel.base)
            width = acc.sel.width
            poison = base.poison or idx.poison
            p = idx.v.to_uint()
            if p is None:
                return Val(LogicVec.all_x(width), poison)
            lo = p - width + 1 if acc.sel.descending else p
        bits = "".join(base.v.bits[w - 1 - k] if 0 <= k < w else "x"
                       for k in range(lo + width - 1, lo - 1, -1))
        return Val(LogicVec(bits), poison)

    def rhs(self, pid, stmt: Assign, width: int, signed: bool) -> Val:
        if isinstance(stmt.rhs, Access):
            return self.load(pid, stmt.rhs)
        c = stmt.rhs
        args = [self.operand(pid, a) for a in c.args]
        if c.ty is not None:
            width, signed = bit_width(c.ty), is_signed(c.ty)
        v = eval_compute(c.op, [a.v for a in args], width, signed)
        return Val(v, any(a.poison for a in args))

    # -- stores
    def offsets(self, pid, acc: Access, width: int) -> tuple[list[int] | None, bool]:
        """Bit offsets (MSB first) written by ``acc``; None for the whole signal."""
        if acc.sel is None:
            return None, False
        if isinstance(acc.sel, Range):
            return list(range(acc.sel.high, acc.sel.low - 1, -1)), False
        idx = self.operand(pid, acc.sel.base)
        p = idx.v.to_uint()
        if p is None:
            return [], idx.poison  # an unknown index writes nothing
        lo = p - acc.sel.width + 1 if acc.sel.descending else p
        return list(range(lo + acc.sel.width - 1, lo - 1, -1)), idx.poison

    def write(self, name: str, key, op: str, offs: list[int] | None, val: Val, poison: bool):
        info = self.h.signals[name]
        old = self.state[name]
        width = info.width
        if offs is None:
            bits = list(_fit(val.v, width).bits)
            placed = None
        else:
            src = _fit(val.v, len(offs)).bits if offs else ""
            placed = {off: b for off, b in zip(offs, src) if 0 <= off < width}
        if op == "<-" and info.kind != "var":
            cur = ["z"] * width if placed is not None else bits
            if placed is not None:
                for off, b in placed.items():
                    cur[width - 1 - off] = b
            self.contribs[name][key] = Val(LogicVec("".join(cur)), val.poison or poison)
            merged = None
            for c in self.contribs[name].values():
                merged = c.v.bits if merged is None else "".join(
                    _resolve_wire(a, b) for a, b in zip(merged, c.v.bits))
            new = Val(LogicVec(merged, info.signed),
                      any(c.poison for c in self.contribs[name].values()))
        else:
            if placed is None:
                new = Val(LogicVec("".join(bits), info.signed), val.poison or poison)
            else:
                cur = list(old.v.bits)
                for off, b in placed.items():
                    cur[width - 1 - off] = b
                new = Val(LogicVec("".join(cur), info.signed), old.poison or val.poison or poison)
        self.state[name] = new
        if self.obs.on_store is not None:
            self.obs.on_store(name, new)
        return new != old

    # -- proc execution
    def run_body(self, pid, proc, start: int, nba: list | None) -> bool:
        stmts = proc.statements
        labels = {s.name: k for k, s in enumerate(stmts) if isinstance(s, Label)}
        changed = False
        k = start
        for _ in range(STEP_LIMIT):
            if k >= len(stmts):
                return changed
            s = stmts[k]
            if isinstance(s, Guard):
                return changed
            if isinstance(s, Return):
                return changed
            if isinstance(s, Goto):
                k = labels[s.target]
                continue
            if isinstance(s, If):
                c = self.operand(pid, s.cond)
                taken = c.v.to_uint() not in (None, 0) if c.v.is_defined() else "1" in c.v.bits
                if taken and not c.poison:
                    self.obs.true_ifs.add((pid.module, s.attrs.get("loc")))
                k = labels[s.target] if taken else k + 1
                continue
            if isinstance(s, Case):
                subj = self.operand(pid, s.subject)
                target = s.default
                for arm in s.arms:
                    w = max(arm.pattern.width, subj.v.width)
                    if _case_match(s.kind, _fit(subj.v, w).bits, _fit(arm.pattern, w).bits):
                        target = arm.target
                        if not subj.poison:
                            self.obs.case_hits.add((pid.module, s.attrs.get("loc"), str(arm.pattern)))
                        break
                k = labels[target] if target is not None else k + 1
                continue
            if isinstance(s, Assign):
                name = qualify(pid.path, s.lhs.name)
                info = self.h.signals[name]
                val = self.rhs(pid, s, info.width, info.signed)
                offs, ipoison = self.offsets(pid, s.lhs, info.width)
                if s.op == "<=" and nba is not None:
                    nba.append((name, (pid, k), s.op, offs, val, ipoison))
                else:
                    changed |= self.write(name, (pid, k), s.op, offs, val, ipoison)
                k += 1
                continue
            if isinstance(s, (Label, Pass)):
                k += 1
                continue
            raise SimError(f"{pid}: cannot simulate {type(s).__name__}")
        raise SimError(f"{pid}: step limit exceeded")

    def settle(self):
        for _ in range(SETTLE_LIMIT):
            changed = False
            for pid, proc, g in self.level_procs:
                changed |= self.run_body(pid, proc, g + 1, None)
            if not changed:
                return
        raise SimError("combinational logic did not settle")

    def cycle(self, inputs: dict[str, LogicVec]):
        for name, v in inputs.items():
            self.state[name] = Val(v)
        self.settle()
        nba: list = []
        for pid, proc, g in self.edge_procs:
            self.run_body(pid, proc, g + 1, nba)
        for name, key, op, offs, val, ipoison in nba:
            self.write(name, key, op, offs, val, ipoison)
        self.settle()


# ------------------------------------------------------------ exploration


def registers(h: Hierarchy) -> list[str]:
    """Signals written by ``<=`` inside an edge-triggered proc."""
    out = set()
    for pid, proc in h.procs:
        guards = [s for s in proc.statements if isinstance(s, Guard)]
        if not guards or not guards[0].edge_sensitive:
            continue
        for s in proc.statements:
            if isinstance(s, Assign) and s.op == "<=":
                out.add(qualify(pid.path, s.lhs.name))
    return sorted(out)


def state_bits(h: Hierarchy) -> int:
    return sum(h.signals[r].width for r in registers(h))


def input_space(h: Hierarchy, fixed: dict[str, str]):
    """All assignments to the top inputs not pinned in ``fixed``."""
    free = [n for n, s in sorted(h.signals.items()) if s.top_input and n not in fixed]
    widths = [h.signals[n].width for n in free]
    for combo in product(*(range(1 << w) for w in widths)):
        vec = {n: LogicVec(v) for n, v in fixed.items()}
        for n, w, v in zip(free, widths, combo):
            vec[n] = LogicVec.from_int(v, w)
        yield vec


def free_input_bits(h: Hierarchy, pinned: set[str]) -> int:
    return sum(s.width for n, s in h.signals.items() if s.top_input and n not in pinned)


@dataclass
class Exploration:
    layers: list[set]  # reachable snapshots after the reset cycle, then after each cycle
    cycles: int


def explore(sim: Simulator, clock: str, reset: str, active: str, depth: int = 8) -> Exploration:
    """Breadth-first over all input sequences: one reset cycle, then ``depth`` cycles."""
    inactive = "0" if active == "1" else "1"
    start = sim.snapshot()
    memo: dict = {}
    cycles = 0

    def successors(snap, fixed):
        nonlocal cycles
        out = set()
        for vec in input_space(sim.h, fixed):
            key = (snap, tuple(sorted((n, v.bits) for n, v in vec.items())))
            if key not in memo:
                sim.restore(snap)
                sim.cycle(vec)
                cycles += 1
                memo[key] = sim.snapshot()
            out.add(memo[key])
        return out

    layer = successors(start, {clock: "1", reset: active})
    layers = [layer]
    for _ in range(depth):
        nxt = set()
        for snap in layer:
            nxt |= successors(snap, {clock: "1", reset: inactive})
        layers.append(nxt)
        layer = nxt
    return Exploration(layers, cycles)
