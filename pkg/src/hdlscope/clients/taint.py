"""Explicit information-flow (taint) tracking at bit granularity."""

from __future__ import annotations

from dataclasses import dataclass

from ..bitvec import ARITH_OPS
from ..dataflow import DefUse, Hierarchy, ProcId, qualify
from ..ir import Access, Assign, Compute, IndexedSel, Range, Syscall, stmt_loc
from ..report import ReportSet, make_report

POSITIONAL_OPS = frozenset({"buf", "not", "and", "or", "xor", "xnor", "nand", "nor", "zext", "cast"})
UPWARD_OPS = frozenset(ARITH_OPS | {"neg"})


def bit_ranges(bits) -> str:
    """``{0,1,2,5}`` -> ``"0-2,5"``."""
    out, run = [], []
    for b in sorted(bits):
        if run and b == run[-1] + 1:
            run.append(b)
            continue
        if run:
            out.append(f"{run[0]}-{run[-1]}" if len(run) > 1 else str(run[0]))
        run = [b]
    if run:
        out.append(f"{run[0]}-{run[-1]}" if len(run) > 1 else str(run[0]))
    return ",".join(out)


class TaintSpecError(ValueError):
    pass


@dataclass(frozen=True)
class TaintSpec:
    sources: tuple[str, ...]
    sinks: tuple[str, ...]

    @classmethod
    def from_options(cls, options: dict[str, str]) -> "TaintSpec":
        def names(key):
            return tuple(n.strip() for n in options.get(key, "").split(",") if n.strip())
        return cls(names("taint.sources"), names("taint.sinks"))

    def check(self, h: Hierarchy):
        for n in self.sources + self.sinks:
            if n not in h.signals:
                raise TaintSpecError(f"taint signal {n!r} does not name a signal of the design")


Taint = dict  # qualified signal -> frozenset of tainted bit offsets (LSB = 0)


class _Engine:
    def __init__(self, h: Hierarchy, du: DefUse):
        self.h, self.du = h, du
        self.stmts: list[tuple[ProcId, Assign | Syscall]] = [
            (pid, s) for pid, proc in h.procs for s in proc.statements if isinstance(s, (Assign, Syscall))]
        self.externals = [i.path for i in h.instances if h.modules[i.module].external]

    def width(self, name: str) -> int:
        return self.h.signals[name].width or 1

    def operand(self, t: Taint, pid: ProcId, name: str) -> tuple[frozenset, int]:
        if name in self.h.consts(pid.module):
            return frozenset(), 1
        q = qualify(pid.path, name)
        return t.get(q, frozenset()), self.width(q)

    def access_bits(self, t: Taint, pid: ProcId, acc: Access) -> tuple[frozenset, int]:
        bits, w = self.operand(t, pid, acc.name)
        for u in acc.used_ids():
            if self.operand(t, pid, u)[0]:
                bits = frozenset(range(w))
        if isinstance(acc.sel, Range):
            return frozenset(b - acc.sel.low for b in bits if acc.sel.low <= b <= acc.sel.high), acc.sel.width
        if isinstance(acc.sel, IndexedSel):
            return (frozenset(range(acc.sel.width)) if bits else frozenset()), acc.sel.width
        return bits, w

    def rhs_bits(self, t: Taint, pid: ProcId, rhs, width: int) -> tuple[frozenset, str | None]:
        """Tainted result bits, plus one tainted operand for path reconstruction."""
        if isinstance(rhs, Access):
            bits, _ = self.access_bits(t, pid, rhs)
            return frozenset(b for b in bits if b < width), qualify(pid.path, rhs.name) if bits else None
        c: Compute = rhs
        args = [self.operand(t, pid, a) for a in c.args]
        cause = next((qualify(pid.path, a) for a, (b, _) in zip(c.args, args) if b), None)
        if cause is None:
            return frozenset(), None
        full = frozenset(range(width))
        if c.op in POSITIONAL_OPS:
            return frozenset(b for bits, _ in args for b in bits if b < width), cause
        if c.op == "sext":
            bits, w = args[0]
            out = {b for b in bits if b < width}
            if w - 1 in bits:
                out |= set(range(w, width))
            return frozenset(out), cause
        if c.op == "concat":  # arguments run MSB first
            out, offset = set(), 0
            for bits, w in reversed(args):
                out |= {b + offset for b in bits if b + offset < width}
                offset += w
            return frozenset(out), cause
        if c.op == "mux":
            if args[0][0]:
                return full, cause
            return frozenset(b for bits, _ in args[1:] for b in bits if b < width), cause
        if c.op in UPWARD_OPS:
            low = min(b for bits, _ in args for b in bits)
            return frozenset(range(low, width)), cause
        return full, cause

    def place(self, t: Taint, pid: ProcId, lhs: Access, bits: frozenset, dst: str) -> frozenset:
        w = self.width(dst)
        if not bits:
            return frozenset()
        if isinstance(lhs.sel, Range):
            return frozenset(b + lhs.sel.low for b in bits if b + lhs.sel.low < w)
        if lhs.sel is not None or (lhs.index is not None and self.h.signals[dst].array_len is None):
            return frozenset(range(w))
        return bits

    def run(self, sources: list[str]):
        t: Taint = {s: frozenset(range(self.width(s))) for s in sources}
        pred: dict[str, tuple[str, str]] = {}
        changed = True
        while changed:
            changed = False
            for pid, s in self.stmts:
                if isinstance(s, Syscall):
                    ins = [qualify(pid.path, n) for n in s.ins if t.get(qualify(pid.path, n))]
                    for o in s.outs:
                        q = qualify(pid.path, o)
                        if ins and q in self.h.signals:
                            changed |= self._add(t, pred, q, frozenset(range(self.width(q))), ins[0], stmt_loc(s))
                    continue
                dst = qualify(pid.path, s.lhs.name)
                if dst not in self.h.signals:
                    continue
                w = self.h.signals[dst].width or 1
                width = w if s.lhs.sel is None else s.lhs.sel.width
                bits, cause = self.rhs_bits(t, pid, s.rhs, width)
                for u in s.lhs.used_ids():
                    if self.operand(t, pid, u)[0]:
                        bits, cause = frozenset(range(width)), cause or qualify(pid.path, u)
                placed = self.place(t, pid, s.lhs, bits, dst)
                if placed:
                    changed |= self._add(t, pred, dst, placed, cause, stmt_loc(s))
            for path in self.externals:
                m = self.h.module_of(path)
                tainted_in = [qualify(path, p.id) for p in m.ports()
                              if p.direction == "input" and t.get(qualify(path, p.id))]
                if not tainted_in:
                    continue
                for p in m.ports():
                    q = qualify(path, p.id)
                    if p.direction == "output":
                        changed |= self._add(t, pred, q, frozenset(range(self.width(q))), tainted_in[0],
                                             m.attrs.get("loc") or f"external {m.name}")
        return t, pred

    @staticmethod
    def _add(t, pred, dst, bits, cause, loc) -> bool:
        old = t.get(dst, frozenset())
        new = old | bits
        if new == old:
            return False
        t[dst] = new
        if dst not in pred and cause is not None and cause != dst:
            pred[dst] = (cause, loc or "")
        return True


@dataclass
class TaintResult:
    spec: TaintSpec
    taint: dict[str, Taint]  # per source
    reports: list

    def dump(self):
        for src in sorted(self.taint):
            for name in sorted(self.taint[src]):
                if not name.rsplit(".", 1)[-1].startswith("$t"):
                    yield f"{src} taints {name} bits {bit_ranges(self.taint[src][name])}"
        for r in self.reports:
            yield r.text()


def detect_taint(h: Hierarchy, du: DefUse, spec: TaintSpec) -> TaintResult:
    spec.check(h)
    engine = _Engine(h, du)
    per_source, reports = {}, []
    for src in spec.sources:
        t, pred = engine.run([src])
        per_source[src] = t
        for sink in spec.sinks:
            if not t.get(sink) or sink == src:
                continue
            path, n, locs = [sink], sink, []
            while n in pred and n != src:
                n, loc = pred[n]
                locs.append(loc)
                path.append(n)
            path.reverse()
            locs.reverse()
            shown = [p for p in path if not h.signals[p].temp]
            evidence = [f"{loc} {p}" for loc, p in zip(locs, path[1:]) if not h.signals[p].temp]
            bits = bit_ranges(t[sink])
            info = h.signals[sink]
            reports.append(make_report(
                "taint", "leak", "error", locs[-1] if locs else info.loc,
                f"tainted data from {src} reaches {sink} (bits {bits}) via " + " -> ".join(shown),
                site=sink, evidence=evidence, module=info.module,
                subject=f"{src.rsplit('.', 1)[-1]}->{sink.rsplit('.', 1)[-1]}"))
    return TaintResult(spec, per_source, reports)
