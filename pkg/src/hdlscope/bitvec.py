"""Four-valued bit vectors and the abstract bit lattice.

Concrete vectors (:class:`LogicVec`) hold bits drawn from ``0 1 x z``.
Abstract vectors (:class:`AbsVec`) hold bits drawn from the lattice::

          T
       /  |  \\  \\
      B   X   Z  |
     / \\          |
    0   1 --------+
     \\  |  /  /
          U

``U`` is bottom (no value yet), ``B`` is "either 0 or 1" and ``T`` is any
of the four concrete values. Both kinds print most-significant bit first.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Sequence, Union

LOGIC_BITS = "01xz"
ABS_BITS = "U01XZBT"

# Enumerating abstract operands costs the product of their concretization
# sizes; above this bound arithmetic transfers fall back to all-B / all-T.
ENUM_LIMIT = 256


class BitVecError(ValueError):
    """Raised for width mismatches, bad indices and malformed literals."""


# ---------------------------------------------------------------------------
# concrete vectors


@dataclass(frozen=True)
class LogicVec:
    bits: str
    signed: bool = False

    def __post_init__(self):
        if not self.bits:
            raise BitVecError("bit vectors need at least one bit")
        if any(b not in LOGIC_BITS for b in self.bits):
            raise BitVecError(f"invalid logic bits {self.bits!r}")

    @property
    def width(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, value: int, width: int, signed: bool = False) -> "LogicVec":
        if width < 1:
            raise BitVecError("width must be positive")
        value &= (1 << width) - 1
        return cls(format(value, f"0{width}b"), signed)

    @classmethod
    def all_x(cls, width: int, signed: bool = False) -> "LogicVec":
        return cls("x" * width, signed)

    @classmethod
    def parse(cls, text: str) -> "LogicVec":
        return parse_literal(text)

    def is_defined(self) -> bool:
        return "x" not in self.bits and "z" not in self.bits

    def to_uint(self) -> int | None:
        if not self.is_defined():
            return None
        return int(self.bits, 2)

    def to_int(self) -> int | None:
        """Integer value honoring the signed flag, or None if not fully defined."""
        u = self.to_uint()
        if u is None:
            return None
        if self.signed and self.bits[0] == "1":
            return u - (1 << self.width)
        return u

    def with_signed(self, signed: bool) -> "LogicVec":
        return LogicVec(self.bits, signed)

    def bit(self, index: int) -> str:
        """Bit at little-endian position ``index`` (0 is the LSB)."""
        return self.bits[self.width - 1 - index]

    def __str__(self) -> str:
        return f"{self.width}'{'s' if self.signed else ''}b{self.bits}"


_LITERAL_RE = re.compile(
    r"^(?P<width>\d+)?'(?P<signed>[sS])?(?P<base>[bBoOdDhH])(?P<digits>[0-9a-fA-FxXzZ?_]+)$"
)
_DIGIT_BITS = {"b": 1, "o": 3, "h": 4}


def parse_literal(text: str, default_width: int | None = None) -> LogicVec:
    """Parse ``<width>'<base><digits>`` (``4'b10x0``, ``6'h2A``, ``8'sd5``).

    A bare decimal parses to the narrowest unsigned vector holding it unless
    ``default_width`` is given.
    """
    text = text.strip().replace("_", "") if "'" not in text else text.strip()
    if re.fullmatch(r"\d+", text):
        value = int(text)
        width = default_width or max(1, value.bit_length())
        return LogicVec.from_int(value, width)
    m = _LITERAL_RE.match(text)
    if not m:
        raise BitVecError(f"malformed literal {text!r}")
    base = m.group("base").lower()
    digits = m.group("digits").replace("_", "").lower().replace("?", "z")
    signed = m.group("signed") is not None
    if base == "d":
        if digits in ("x", "z"):
            raw = digits
        elif not digits.isdigit():
            raise BitVecError(f"bad decimal digits in {text!r}")
        else:
            raw = None
        width = int(m.group("width")) if m.group("width") else default_width
        if raw is not None:
            return LogicVec(raw * (width or 32), signed)
        value = int(digits)
        width = width or max(1, value.bit_length())
        return LogicVec.from_int(value, width, signed)
    per = _DIGIT_BITS[base]
    bits = []
    for d in digits:
        if d in "xz":
            bits.append(d * per)
        else:
            v = int(d, 16)
            if v >= 1 << per:
                raise BitVecError(f"digit {d!r} out of range in {text!r}")
            bits.append(format(v, f"0{per}b"))
    raw = "".join(bits) or "0"
    if m.group("width"):
        width = int(m.group("width"))
    else:
        width = default_width or len(raw)
    if width < 1:
        raise BitVecError("width must be positive")
    if len(raw) >= width:
        raw = raw[len(raw) - width:]
    else:
        fill = raw[0] if raw[0] in "xz" else "0"
        raw = fill * (width - len(raw)) + raw
    return LogicVec(raw, signed)


# ---------------------------------------------------------------------------
# concrete evaluation

_AND = {("0", "0"): "0", ("0", "1"): "0", ("1", "0"): "0", ("1", "1"): "1"}
_OR = {("0", "0"): "0", ("0", "1"): "1", ("1", "0"): "1", ("1", "1"): "1"}
_XOR = {("0", "0"): "0", ("0", "1"): "1", ("1", "0"): "1", ("1", "1"): "0"}


def _gate_in(b: str) -> str:
    return "x" if b == "z" else b


def and_bit(a: str, b: str) -> str:
    a, b = _gate_in(a), _gate_in(b)
    if a == "0" or b == "0":
        return "0"
    if a == "x" or b == "x":
        return "x"
    return "1"


def or_bit(a: str, b: str) -> str:
    a, b = _gate_in(a), _gate_in(b)
    if a == "1" or b == "1":
        return "1"
    if a == "x" or b == "x":
        return "x"
    return "0"


def xor_bit(a: str, b: str) -> str:
    a, b = _gate_in(a), _gate_in(b)
    if a == "x" or b == "x":
        return "x"
    return _XOR[a, b]


def not_bit(a: str) -> str:
    a = _gate_in(a)
    return {"0": "1", "1": "0"}.get(a, "x")


BITWISE = {"and": and_bit, "or": or_bit, "xor": xor_bit}
ARITH_OPS = {"add", "sub", "mul", "udiv", "sdiv", "urem", "srem", "pow", "upow"}
COMPARE_OPS = {"ult", "ugt", "ule", "uge", "slt", "sgt", "sle", "sge"}
EQUALITY_OPS = {"eq", "neq", "equiv", "nequiv"}
SHIFT_OPS = {"shl", "ashr", "lshr"}
BINARY_OPS = (
    ARITH_OPS | COMPARE_OPS | EQUALITY_OPS | SHIFT_OPS | set(BITWISE) | {"concat"}
)
UNARY_OPS = {"neg", "not", "rand", "ror", "rxor", "buf"}
# operators whose operands must share a width
_EQUAL_WIDTH = (ARITH_OPS - {"pow", "upow"}) | COMPARE_OPS | EQUALITY_OPS | set(BITWISE)


def _signed_val(u: int, width: int) -> int:
    return u - (1 << width) if u >> (width - 1) & 1 else u


def _check_widths(op: str, a_width: int, b_width: int):
    if op in _EQUAL_WIDTH and a_width != b_width:
        raise BitVecError(f"{op}: operand widths differ ({a_width} vs {b_width})")


def _arith(op: str, a: int, b: int, w: int, b_width: int) -> int | None:
    """Defined-operand arithmetic on raw unsigned encodings; None means all-x."""
    mask = (1 << w) - 1
    if op == "add":
        return (a + b) & mask
    if op == "sub":
        return (a - b) & mask
    if op == "mul":
        return (a * b) & mask
    if op == "udiv":
        return None if b == 0 else a // b
    if op == "urem":
        return None if b == 0 else a % b
    if op in ("sdiv", "srem"):
        if b == 0:
            return None
        sa, sb = _signed_val(a, w), _signed_val(b, w)
        q = abs(sa) // abs(sb)
        if (sa < 0) != (sb < 0):
            q = -q
        r = sa - q * sb
        return (q if op == "sdiv" else r) & mask
    if op == "upow":
        return pow(a, b, 1 << w)
    if op == "pow":
        sa, sb = _signed_val(a, w), _signed_val(b, b_width)
        if sb >= 0:
            return pow(sa, sb, 1 << w) & mask
        if sa == 0:
            return None
        if sa == 1:
            return 1
        if sa == -1:
            return (1 if sb % 2 == 0 else -1) & mask
        return 0
    raise BitVecError(f"unknown arithmetic op {op}")


def _compare(op: str, a: int, b: int, w: int) -> bool:
    if op[0] == "s":
        a, b = _signed_val(a, w), _signed_val(b, w)
    rel = op[1:]
    return {"lt": a < b, "gt": a > b, "le": a <= b, "ge": a >= b}[rel]


def _shift(op: str, a: LogicVec, amount: int) -> LogicVec:
    w = a.width
    if op == "shl":
        if amount >= w:
            return LogicVec("0" * w, a.signed)
        return LogicVec(a.bits[amount:] + "0" * amount, a.signed)
    fill = a.bits[0] if op == "ashr" else "0"
    if amount >= w:
        return LogicVec(fill * w, a.signed)
    return LogicVec(fill * amount + a.bits[: w - amount], a.signed)


def eval_binop(op: str, a: LogicVec, b: LogicVec) -> LogicVec:
    """Evaluate a binary IR operator on concrete four-valued operands."""
    if op not in BINARY_OPS:
        raise BitVecError(f"unknown binary operator {op!r}")
    _check_widths(op, a.width, b.width)
    signed = a.signed and b.signed
    w = a.width
    if op == "concat":
        return LogicVec(a.bits + b.bits, False)
    if op in BITWISE:
        fn = BITWISE[op]
        return LogicVec("".join(fn(p, q) for p, q in zip(a.bits, b.bits)), signed)
    if op == "equiv":
        return LogicVec("1" if a.bits == b.bits else "0")
    if op == "nequiv":
        return LogicVec("0" if a.bits == b.bits else "1")
    defined = a.is_defined() and b.is_defined()
    if op in SHIFT_OPS:
        if not b.is_defined():
            return LogicVec.all_x(w, a.signed)
        return _shift(op, a, int(b.bits, 2))
    if op in EQUALITY_OPS or op in COMPARE_OPS:
        if not defined:
            return LogicVec("x")
        ua, ub = int(a.bits, 2), int(b.bits, 2)
        if op == "eq":
            return LogicVec("1" if ua == ub else "0")
        if op == "neq":
            return LogicVec("0" if ua == ub else "1")
        return LogicVec("1" if _compare(op, ua, ub, w) else "0")
    if not defined:
        return LogicVec.all_x(w, signed)
    r = _arith(op, int(a.bits, 2), int(b.bits, 2), w, b.width)
    if r is None:
        return LogicVec.all_x(w, signed)
    return LogicVec.from_int(r, w, signed)


def _reduce_bits(op: str, bits: str) -> str:
    fn = {"rand": and_bit, "ror": or_bit, "rxor": xor_bit}[op]
    if len(bits) == 1:
        return _gate_in(bits)
    return reduce(fn, bits)


def eval_unop(op: str, a: LogicVec) -> LogicVec:
    """Evaluate a unary IR operator on a concrete operand."""
    if op == "buf":
        return a
    if op == "not":
        return LogicVec("".join(not_bit(b) for b in a.bits), a.signed)
    if op in ("rand", "ror", "rxor"):
        return LogicVec(_reduce_bits(op, a.bits))
    if op == "neg":
        if not a.is_defined():
            return LogicVec.all_x(a.width, a.signed)
        return LogicVec.from_int(-int(a.bits, 2), a.width, a.signed)
    raise BitVecError(f"unknown unary operator {op!r}")


def _combine_bit(p: str, q: str) -> str:
    return p if p == q and p in "01" else "x"


def eval_mux(cond: LogicVec, a: LogicVec, b: LogicVec) -> LogicVec:
    """``cond ? a : b`` with the X-merge rule for an ambiguous condition."""
    if a.width != b.width:
        raise BitVecError("mux: branch widths differ")
    truth = _reduce_bits("ror", cond.bits)
    signed = a.signed and b.signed
    if truth == "1":
        return LogicVec(a.bits, signed)
    if truth == "0":
        return LogicVec(b.bits, signed)
    return LogicVec("".join(_combine_bit(p, q) for p, q in zip(a.bits, b.bits)), signed)


def resize(a: LogicVec, width: int, sign_extend: bool | None = None) -> LogicVec:
    """Truncate (keeping LSBs) or extend to ``width``."""
    if width < 1:
        raise BitVecError("width must be positive")
    if width <= a.width:
        return LogicVec(a.bits[a.width - width:], a.signed)
    ext = a.signed if sign_extend is None else sign_extend
    fill = a.bits[0] if ext else "0"
    return LogicVec(fill * (width - a.width) + a.bits, a.signed)


def eval_ext(op: str, a: LogicVec, width: int, signed: bool) -> LogicVec:
    """``zext``/``sext``/``cast`` of a concrete vector to a target type."""
    if op in ("zext", "sext"):
        if width < a.width:
            raise BitVecError(f"{op}: target width {width} narrower than {a.width}")
        return resize(a, width, op == "sext").with_signed(signed)
    if op == "cast":
        return resize(a, width).with_signed(signed)
    raise BitVecError(f"unknown extension {op!r}")


def select(v, high: int, low: int):
    """Bits ``high..low`` (inclusive) of a concrete or abstract vector."""
    if not (v.width > high >= low >= 0):
        raise BitVecError(f"select [{high}:{low}] out of range for width {v.width}")
    bits = v.bits[v.width - 1 - high: v.width - low]
    return type(v)(bits, False)


# ---------------------------------------------------------------------------
# abstract bits

GAMMA: dict[str, frozenset[str]] = {
    "U": frozenset(),
    "0": frozenset("0"),
    "1": frozenset("1"),
    "X": frozenset("x"),
    "Z": frozenset("z"),
    "B": frozenset("01"),
    "T": frozenset("01xz"),
}


@lru_cache(maxsize=None)
def alpha_bit(values: frozenset) -> str:
    """Least abstract bit whose concretization covers ``values``."""
    for b in "U01XZBT":
        if values <= GAMMA[b]:
            return b
    raise BitVecError(f"not a set of logic bits: {values!r}")


def leq_bit(a: str, b: str) -> bool:
    return GAMMA[a] <= GAMMA[b]


def join_bit(a: str, b: str) -> str:
    return alpha_bit(GAMMA[a] | GAMMA[b])


@dataclass(frozen=True)
class AbsVec:
    bits: str
    signed: bool = False

    def __post_init__(self):
        if not self.bits:
            raise BitVecError("bit vectors need at least one bit")
        if any(b not in ABS_BITS for b in self.bits):
            raise BitVecError(f"invalid abstract bits {self.bits!r}")

    @property
    def width(self) -> int:
        return len(self.bits)

    @classmethod
    def uniform(cls, bit: str, width: int, signed: bool = False) -> "AbsVec":
        return cls(bit * width, signed)

    @classmethod
    def from_logic(cls, v: LogicVec) -> "AbsVec":
        return cls(v.bits.upper(), v.signed)

    def is_bottom(self) -> bool:
        return "U" in self.bits

    def is_fixed(self) -> bool:
        """Every bit is a single concrete value (0, 1, X or Z)."""
        return all(b in "01XZ" for b in self.bits)

    def may_be_xz(self) -> bool:
        return any(b in "XZT" for b in self.bits)

    def to_logic(self) -> LogicVec:
        if not self.is_fixed():
            raise BitVecError(f"{self.bits} is not a fixed vector")
        return LogicVec(self.bits.lower(), self.signed)

    def concretize(self) -> Iterator[LogicVec]:
        """Enumerate every concrete vector this abstract vector stands for."""
        pools = [sorted(GAMMA[b]) for b in self.bits]
        for combo in itertools.product(*pools):
            yield LogicVec("".join(combo), self.signed)

    def gamma_size(self) -> int:
        n = 1
        for b in self.bits:
            n *= len(GAMMA[b])
        return n

    def contains(self, v: LogicVec) -> bool:
        return v.width == self.width and all(
            c in GAMMA[a] for a, c in zip(self.bits, v.bits)
        )

    def leq(self, other: "AbsVec") -> bool:
        return self.width == other.width and all(
            leq_bit(a, b) for a, b in zip(self.bits, other.bits)
        )

    def with_signed(self, signed: bool) -> "AbsVec":
        return AbsVec(self.bits, signed)

    def __str__(self) -> str:
        return self.bits


def alpha(values: Iterable[LogicVec], width: int, signed: bool = False) -> AbsVec:
    """Best abstraction of a set of concrete vectors of a common width."""
    sets = [set() for _ in range(width)]
    for v in values:
        for i, b in enumerate(v.bits):
            sets[i].add(b)
    return AbsVec("".join(alpha_bit(frozenset(s)) for s in sets), signed)


def abs_join(a: AbsVec, b: AbsVec) -> AbsVec:
    if a.width != b.width:
        raise BitVecError(f"join: widths differ ({a.width} vs {b.width})")
    return AbsVec("".join(join_bit(p, q) for p, q in zip(a.bits, b.bits)), a.signed)


def may_equal(a: AbsVec, b: AbsVec) -> bool:
    """False only when no concrete pair from the two vectors is bitwise equal."""
    if a.width != b.width:
        raise BitVecError(f"may_equal: widths differ ({a.width} vs {b.width})")
    return all(GAMMA[p] & GAMMA[q] for p, q in zip(a.bits, b.bits))


@lru_cache(maxsize=None)
def _bit_table(fn_name: str, p: str, q: str) -> str:
    fn = {"and": and_bit, "or": or_bit, "xor": xor_bit, "combine": _combine_bit}[fn_name]
    return alpha_bit(frozenset(fn(x, y) for x in GAMMA[p] for y in GAMMA[q]))


@lru_cache(maxsize=None)
def _not_table(p: str) -> str:
    return alpha_bit(frozenset(not_bit(x) for x in GAMMA[p]))


@lru_cache(maxsize=None)
def _reduce_abs(op: str, bits: str) -> str:
    fn = {"rand": and_bit, "ror": or_bit, "rxor": xor_bit}[op]
    acc = {_gate_in(x) for x in GAMMA[bits[0]]}
    for b in bits[1:]:
        acc = {fn(x, y) for x in acc for y in GAMMA[b]}
    return alpha_bit(frozenset(acc))


def _abs_resize(a: AbsVec, width: int, sign_extend: bool) -> AbsVec:
    if width <= a.width:
        return AbsVec(a.bits[a.width - width:], a.signed)
    fill = a.bits[0] if sign_extend else "0"
    return AbsVec(fill * (width - a.width) + a.bits, a.signed)


def _abs_shift(op: str, a: AbsVec, amount: int) -> AbsVec:
    w = a.width
    if op == "shl":
        bits = a.bits[amount:] + "0" * amount if amount < w else "0" * w
    else:
        fill = a.bits[0] if op == "ashr" else "0"
        bits = fill * amount + a.bits[: w - amount] if amount < w else fill * w
    return AbsVec(bits, a.signed)


def _fallback(width: int, args: Sequence[AbsVec], signed: bool) -> AbsVec:
    return AbsVec.uniform("T" if any(x.may_be_xz() for x in args) else "B", width, signed)


def _enumerate(fn, args: Sequence[AbsVec], width: int, signed: bool) -> AbsVec:
    results = (fn(*combo) for combo in itertools.product(*(x.concretize() for x in args)))
    return alpha(results, width, signed)


def _abs_equality(op: str, a: AbsVec, b: AbsVec) -> AbsVec:
    literal = op in ("equiv", "nequiv")
    possible = set()
    if literal:
        if all(GAMMA[p] & GAMMA[q] for p, q in zip(a.bits, b.bits)):
            possible.add("1")
        if any(len(GAMMA[p] | GAMMA[q]) > 1 for p, q in zip(a.bits, b.bits)):
            possible.add("0")
    else:
        defined = [(GAMMA[p] & frozenset("01"), GAMMA[q] & frozenset("01"))
                   for p, q in zip(a.bits, b.bits)]
        if a.may_be_xz() or b.may_be_xz():
            possible.add("x")
        if all(dp and dq for dp, dq in defined):
            if all(dp & dq for dp, dq in defined):
                possible.add("1")
            if any(len(dp | dq) > 1 for dp, dq in defined):
                possible.add("0")
    if op in ("neq", "nequiv"):
        possible = {{"0": "1", "1": "0"}.get(v, v) for v in possible}
    return AbsVec(alpha_bit(frozenset(possible)))


def _abs_compare(op: str, a: AbsVec, b: AbsVec) -> AbsVec:
    xz = a.may_be_xz() or b.may_be_xz()
    if op[0] == "u":
        lo_a, hi_a = _bounds(a)
        lo_b, hi_b = _bounds(b)
        definite = {
            "ult": (hi_a < lo_b, lo_a >= hi_b),
            "ugt": (lo_a > hi_b, hi_a <= lo_b),
            "ule": (hi_a <= lo_b, lo_a > hi_b),
            "uge": (lo_a >= hi_b, hi_a < lo_b),
        }[op]
        possible = set()
        if not definite[1]:
            possible.add("1")
        if not definite[0]:
            possible.add("0")
    else:
        possible = {"0", "1"}
    if xz:
        possible.add("x")
        if all(bit in "XZ" for bit in a.bits + b.bits):
            possible = {"x"}
    return AbsVec(alpha_bit(frozenset(possible)))


def _bounds(a: AbsVec) -> tuple[int, int]:
    lo = int("".join("1" if b == "1" else "0" for b in a.bits), 2)
    hi = int("".join("0" if b == "0" else "1" for b in a.bits), 2)
    return lo, hi


def abs_transfer(op: str, args: Sequence[AbsVec], width: int | None = None,
                 signed: bool = False) -> AbsVec:
    """Sound abstract counterpart of :func:`eval_binop`/:func:`eval_unop`.

    ``op`` may also be ``mux`` (three operands) or one of the extensions
    ``zext``/``sext``/``cast``, which take the target ``width``/``signed``.
    """
    if op in UNARY_OPS:
        if len(args) != 1:
            raise BitVecError(f"{op} takes one operand")
        (a,) = args
        if op == "buf":
            return a
        if op == "not":
            return AbsVec("".join(_not_table(p) for p in a.bits), a.signed)
        if op in ("rand", "ror", "rxor"):
            return AbsVec(_reduce_abs(op, a.bits))
        if a.is_bottom():
            return AbsVec.uniform("U", a.width, a.signed)
        if a.is_fixed():
            return AbsVec.from_logic(eval_unop(op, a.to_logic()))
        if a.gamma_size() <= ENUM_LIMIT:
            return _enumerate(lambda v: eval_unop(op, v), args, a.width, a.signed)
        return _fallback(a.width, args, a.signed)

    if op in ("zext", "sext", "cast"):
        (a,) = args
        if width is None:
            raise BitVecError(f"{op} needs a target width")
        if op != "cast" and width < a.width:
            raise BitVecError(f"{op}: target width {width} narrower than {a.width}")
        ext = op == "sext" or (op == "cast" and a.signed)
        return _abs_resize(a, width, ext).with_signed(signed)

    if op == "mux":
        if len(args) != 3:
            raise BitVecError("mux takes three operands")
        c, a, b = args
        if a.width != b.width:
            raise BitVecError("mux: branch widths differ")
        truth = _reduce_abs("ror", c.bits)
        sgn = a.signed and b.signed
        out = []
        for p, q in zip(a.bits, b.bits):
            vals = set()
            for t in GAMMA[truth]:
                if t == "1":
                    vals |= GAMMA[p]
                elif t == "0":
                    vals |= GAMMA[q]
                else:
                    vals |= {_combine_bit(x, y) for x in GAMMA[p] for y in GAMMA[q]}
            out.append(alpha_bit(frozenset(vals)))
        return AbsVec("".join(out), sgn)

    if op not in BINARY_OPS:
        raise BitVecError(f"unknown operator {op!r}")
    if len(args) != 2:
        raise BitVecError(f"{op} takes two operands")
    a, b = args
    _check_widths(op, a.width, b.width)
    sgn = a.signed and b.signed
    if op == "concat":
        return AbsVec(a.bits + b.bits)
    if op in BITWISE:
        return AbsVec("".join(_bit_table(op, p, q) for p, q in zip(a.bits, b.bits)), sgn)
    if op in SHIFT_OPS:
        if b.is_bottom() or a.is_bottom():
            return AbsVec.uniform("U", a.width, a.signed)
        if b.gamma_size() > 64:
            return _fallback(a.width, args, a.signed)
        result = None
        for amount in b.concretize():
            if amount.is_defined():
                r = _abs_shift(op, a, min(int(amount.bits, 2), a.width))
            else:
                r = AbsVec.uniform("X", a.width, a.signed)
            result = r if result is None else abs_join(result, r)
        return result
    res_width = 1 if op in EQUALITY_OPS | COMPARE_OPS else a.width
    if a.is_bottom() or b.is_bottom():
        return AbsVec.uniform("U", res_width, sgn and res_width > 1)
    if a.is_fixed() and b.is_fixed():
        return AbsVec.from_logic(eval_binop(op, a.to_logic(), b.to_logic()))
    if a.gamma_size() * b.gamma_size() <= ENUM_LIMIT:
        return _enumerate(lambda x, y: eval_binop(op, x, y), args, res_width,
                          sgn if res_width > 1 else False)
    if op in EQUALITY_OPS:
        return _abs_equality(op, a, b)
    if op in COMPARE_OPS:
        return _abs_compare(op, a, b)
    return _fallback(res_width, args, sgn)


def eval_compute(op: str, args: Sequence[LogicVec], width: int | None = None,
                 signed: bool = False) -> LogicVec:
    """Concrete dispatcher mirroring :func:`abs_transfer`'s operator set."""
    if op in UNARY_OPS:
        return eval_unop(op, args[0])
    if op in ("zext", "sext", "cast"):
        return eval_ext(op, args[0], width, signed)
    if op == "mux":
        return eval_mux(*args)
    return eval_binop(op, *args)


AnyVec = Union[LogicVec, AbsVec]
