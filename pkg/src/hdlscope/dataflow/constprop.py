"""Flow-insensitive bit-level constant propagation over the flattened design."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from ..bitvec import GAMMA, AbsVec, BitVecError, abs_join, abs_transfer, alpha_bit, join_bit
from ..ir import Access, Assign, Compute, IndexedSel, Range, Syscall, bit_width, is_signed
from .hierarchy import Hierarchy, ProcId, SigInfo, qualify

SHIFT_ENUM = 64


class ConstPropError(Exception):
    pass


def _wire_res(x: str, y: str) -> str:
    if x == y:
        return x
    if x == "z":
        return y
    if y == "z":
        return x
    return "x"


def _wand_res(x: str, y: str) -> str:
    if x == "z":
        return y
    if y == "z":
        return x
    if "0" in (x, y):
        return "0"
    return "1" if x == y == "1" else "x"


def _wor_res(x: str, y: str) -> str:
    if x == "z":
        return y
    if y == "z":
        return x
    if "1" in (x, y):
        return "1"
    return "0" if x == y == "0" else "x"


RESOLVERS = {"wand": _wand_res, "triand": _wand_res, "wor": _wor_res, "trior": _wor_res}


@lru_cache(maxsize=None)
def resolve_bit(kind: str, p: str, q: str) -> str:
    fn = RESOLVERS.get(kind, _wire_res)
    return alpha_bit(frozenset(fn(x, y) for x in GAMMA[p] for y in GAMMA[q]))


def resolve_drivers(kind: str, contribs: list[AbsVec], width: int, signed: bool) -> AbsVec:
    bits = contribs[0].bits
    for c in contribs[1:]:
        bits = "".join(resolve_bit(kind, p, q) for p, q in zip(bits, c.bits))
    return AbsVec(bits, signed)


def _fit(v: AbsVec, width: int, signed: bool) -> AbsVec:
    """Truncate (keep LSBs) or zero-extend an abstract value to ``width``."""
    if v.width >= width:
        return AbsVec(v.bits[v.width - width:], signed)
    return AbsVec("0" * (width - v.width) + v.bits, signed)


def _positions(v: AbsVec) -> list[int | None] | None:
    """Possible integer values of an index; None entries stand for x/z indices.

    Returns None when there are too many to enumerate.
    """
    if v.is_bottom():
        return []
    if v.gamma_size() > SHIFT_ENUM:
        return None
    out: list[int | None] = []
    for c in v.concretize():
        out.append(int(c.bits, 2) if c.is_defined() else None)
    return list(dict.fromkeys(out))


def index_may_exceed(idx: AbsVec, length: int) -> bool:
    """True when some concretization of ``idx`` is unknown or at least ``length``."""
    if idx.is_bottom():
        return False
    if any(b in "XZT" for b in idx.bits):
        return True
    hi = int("".join("0" if b == "0" else "1" for b in idx.bits), 2)
    return hi >= length


@dataclass
class ConstMap:
    values: dict[str, AbsVec | None]
    iterations: int
    total_bits: int
    signals: dict[str, SigInfo] = field(default_factory=dict)
    contribs: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, name: str) -> AbsVec | None:
        return self.values[name]

    def get(self, name: str):
        return self.values.get(name)

    def dump(self):
        for name in sorted(self.values):
            info = self.signals.get(name)
            if info is not None and info.temp:
                continue
            v = self.values[name]
            yield f"{name} = {'real' if v is None else v.bits}"


class _Evaluator:
    def __init__(self, h: Hierarchy):
        self.h = h
        self.values: dict[str, AbsVec | None] = {}
        self.contribs: dict[str, dict[tuple, AbsVec]] = {}
        self.total_bits = 0
        for name, info in h.signals.items():
            if info.width is None:
                self.values[name] = None
                continue
            if info.top_input:
                bit = "B"
            elif info.external_port and info.direction == "output":
                bit = "T"
            else:
                bit = "U"
            self.values[name] = AbsVec.uniform(bit, info.width, info.signed)
            self.total_bits += info.width

    # -- operand lookup
    def operand(self, pid: ProcId, name: str) -> AbsVec | None:
        consts = self.h.consts(pid.module)
        if name in consts:
            c = consts[name]
            if c.value is None or not hasattr(c.value, "bits"):
                return None
            return AbsVec.from_logic(c.value)
        return self.values.get(qualify(pid.path, name))

    def width_of(self, pid: ProcId, name: str) -> tuple[int | None, bool]:
        consts = self.h.consts(pid.module)
        if name in consts:
            return bit_width(consts[name].ty), is_signed(consts[name].ty)
        info = self.h.signals[qualify(pid.path, name)]
        return info.width, info.signed

    def load(self, pid: ProcId, acc: Access) -> AbsVec | None:
        base = self.operand(pid, acc.name)
        if base is None:
            return None
        q = qualify(pid.path, acc.name)
        info = self.h.signals.get(q)
        if acc.index is not None and info is not None and info.array_len is not None:
            idx = self.operand(pid, acc.index)
            if idx is None:
                return None
            if index_may_exceed(idx, info.array_len):
                base = abs_join(base, AbsVec.uniform("X", base.width, base.signed))
        if acc.sel is None:
            return base
        return self.select(pid, base, acc.sel)

    def select(self, pid, base: AbsVec, sel) -> AbsVec:
        w = base.width
        if isinstance(sel, Range):
            return AbsVec("".join(base.bits[w - 1 - k] if k < w else "X"
                                  for k in range(sel.high, sel.low - 1, -1)))
        idx = self.operand(pid, sel.base)
        if idx is None:
            return AbsVec.uniform("T", sel.width)
        pos = _positions(idx)
        if pos == []:
            return AbsVec.uniform("U", sel.width)
        if pos is None:
            # any position: every bit of the vector or out of range
            b = "U"
            for c in base.bits:
                b = join_bit(b, c)
            return AbsVec.uniform(join_bit(b, "X"), sel.width)
        result = None
        for p in pos:
            if p is None:
                r = AbsVec.uniform("X", sel.width)
            else:
                lo = p - sel.width + 1 if sel.descending else p
                r = AbsVec("".join(base.bits[w - 1 - k] if 0 <= k < w else "X"
                                   for k in range(lo + sel.width - 1, lo - 1, -1)))
            result = r if result is None else abs_join(result, r)
        return result

    def rhs(self, pid: ProcId, stmt: Assign, target_width: int, target_signed: bool) -> AbsVec | None:
        if isinstance(stmt.rhs, Access):
            return self.load(pid, stmt.rhs)
        c: Compute = stmt.rhs
        args = [self.operand(pid, a) for a in c.args]
        if any(a is None for a in args):
            return None
        if c.ty is not None:
            width, signed = bit_width(c.ty), is_signed(c.ty)
        else:
            width, signed = target_width, target_signed
        try:
            return abs_transfer(c.op, args, width, signed)
        except BitVecError:
            return AbsVec.uniform("T", target_width, target_signed)

    # -- stores
    def placements(self, pid, info: SigInfo, acc: Access, v: AbsVec, width: int):
        """Yield (bit offsets from LSB, value bits MSB-first) for each possible write."""
        if acc.sel is None:
            yield list(range(width - 1, -1, -1)), _fit(v, width, info.signed).bits, True
            return
        if isinstance(acc.sel, Range):
            sw = acc.sel.width
            yield list(range(acc.sel.high, acc.sel.low - 1, -1)), _fit(v, sw, False).bits, True
            return
        sw = acc.sel.width
        bits = _fit(v, sw, False).bits
        idx = self.operand(pid, acc.sel.base)
        pos = None if idx is None else _positions(idx)
        if pos is None:
            starts = [k for k in range(width)]
        else:
            starts = [p for p in pos if p is not None]
        for p in starts:
            lo = p - sw + 1 if acc.sel.descending else p
            yield list(range(lo + sw - 1, lo - 1, -1)), bits, len(starts) == 1

    def store(self, pid: ProcId, key, stmt_op: str, acc: Access, v: AbsVec | None) -> bool:
        q = qualify(pid.path, acc.name)
        info = self.h.signals.get(q)
        if info is None or info.width is None:
            return False
        old = self.values[q]
        width = info.width
        if v is None:
            v = AbsVec.uniform("T", width, info.signed)
        driver = stmt_op == "<-" and info.kind != "var" and info.array_len is None
        if driver:
            contribs = self.contribs.setdefault(q, {})
            cur = contribs.get(key)
            placed = ["Z"] * width
            for offs, bits, certain in self.placements(pid, info, acc, v, width):
                for off, b in zip(offs, bits):
                    if 0 <= off < width:
                        i = width - 1 - off
                        placed[i] = b if certain else join_bit(placed[i], join_bit(b, "Z"))
            new = AbsVec("".join(placed), info.signed)
            if cur is not None:
                new = abs_join(cur, new)
            if cur == new:
                return False
            contribs[key] = new
            merged = resolve_drivers(info.kind, list(contribs.values()), width, info.signed)
            if merged == old:
                return False
            self.values[q] = merged
            return True
        placed = list(old.bits)
        for offs, bits, _ in self.placements(pid, info, acc, v, width):
            for off, b in zip(offs, bits):
                if 0 <= off < width:
                    i = width - 1 - off
                    placed[i] = join_bit(placed[i], b)
        new = AbsVec("".join(placed), info.signed)
        if new == old:
            return False
        self.values[q] = new
        return True

    def step(self, pid: ProcId, k: int, stmt) -> bool:
        if isinstance(stmt, Assign):
            q = qualify(pid.path, stmt.lhs.name)
            info = self.h.signals.get(q)
            if info is None or info.width is None:
                return False
            v = self.rhs(pid, stmt, info.width, info.signed)
            return self.store(pid, (pid, k), stmt.op, stmt.lhs, v)
        if isinstance(stmt, Syscall):
            changed = False
            for o in stmt.outs:
                info = self.h.signals.get(qualify(pid.path, o))
                if info is not None and info.width is not None:
                    changed |= self.store(pid, (pid, k), "=", Access(o),
                                          AbsVec.uniform("T", info.width, info.signed))
            return changed
        return False


def analyze_const_prop(h: Hierarchy) -> ConstMap:
    ev = _Evaluator(h)
    bound = 7 * max(1, ev.total_bits)
    rounds = 0
    stmts = [(pid, k, s) for pid, proc in h.procs for k, s in enumerate(proc.statements)
             if isinstance(s, (Assign, Syscall))]
    while True:
        rounds += 1
        changed = False
        for pid, k, s in stmts:
            changed |= ev.step(pid, k, s)
        if not changed:
            break
        if rounds > bound:
            raise ConstPropError(f"constant propagation did not converge in {bound} rounds")
    return ConstMap(ev.values, rounds, ev.total_bits, h.signals, ev.contribs)


def check_fixpoint(h: Hierarchy, cm: ConstMap) -> bool:
    """Re-apply every transfer once on a copy of the result; True when nothing changes."""
    ev = _Evaluator(h)
    ev.values = dict(cm.values)
    ev.contribs = {q: dict(c) for q, c in cm.contribs.items()}
    changed = False
    for pid, proc in h.procs:
        for k, s in enumerate(proc.statements):
            changed |= ev.step(pid, k, s)
    return not changed
