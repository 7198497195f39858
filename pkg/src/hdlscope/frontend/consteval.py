"""Elaboration-time evaluation of constant expressions (parameters, ranges)."""

from __future__ import annotations

from ..bitvec import LogicVec
from . import ast as A
from .lexer import FrontendError


def clog2(n: int) -> int:
    return max(0, (n - 1).bit_length())


class ConstEnv:
    """Name -> LogicVec bindings for parameters and unrolled loop variables."""

    def __init__(self, values: dict[str, LogicVec] | None = None):
        self.values = dict(values or {})

    def child(self, **extra: LogicVec) -> "ConstEnv":
        env = ConstEnv(self.values)
        env.values.update(extra)
        return env

    def is_const(self, e: A.Expr) -> bool:
        if isinstance(e, A.Number):
            return True
        if isinstance(e, A.Ident):
            return e.name in self.values
        if isinstance(e, A.Unary):
            return self.is_const(e.operand)
        if isinstance(e, A.Binary):
            return self.is_const(e.left) and self.is_const(e.right)
        if isinstance(e, A.Ternary):
            return all(self.is_const(x) for x in (e.cond, e.then, e.other))
        if isinstance(e, A.SysCallExpr):
            return e.name in ("$clog2", "$signed", "$unsigned") and all(self.is_const(a) for a in e.args)
        if isinstance(e, (A.Concat,)):
            return all(self.is_const(p) for p in e.parts)
        if isinstance(e, A.Replicate):
            return self.is_const(e.count) and all(self.is_const(p) for p in e.parts)
        return False

    def int_value(self, e: A.Expr) -> int:
        """Integer value of a constant expression; x/z bits are an error."""
        v = self._eval(e)
        if isinstance(v, LogicVec):
            if not v.is_defined():
                raise FrontendError("constant expression has unknown bits", _loc(e))
            return v.to_int()
        return v

    def vec_value(self, e: A.Expr) -> LogicVec:
        """Constant as a bit vector, keeping the width of sized literals."""
        v = self._eval(e)
        if isinstance(v, LogicVec):
            return v
        if v < 0:
            return LogicVec.from_int(v, max(32, v.bit_length() + 1), True)
        return LogicVec.from_int(v, max(1, v.bit_length()))

    def _eval(self, e: A.Expr):
        if isinstance(e, A.Number):
            return e.value
        if isinstance(e, A.Ident):
            if e.name not in self.values:
                raise FrontendError(f"{e.name} is not a constant", e.loc)
            return self.values[e.name]
        if isinstance(e, A.SysCallExpr):
            if e.name == "$clog2" and len(e.args) == 1:
                return clog2(self.int_value(e.args[0]))
            if e.name in ("$signed", "$unsigned") and len(e.args) == 1:
                return self._eval(e.args[0])
            raise FrontendError(f"{e.name} is not a constant function", e.loc)
        if isinstance(e, (A.Concat, A.Replicate)):
            parts = [self.vec_value(p) for p in e.parts]
            bits = "".join(p.bits for p in parts)
            if isinstance(e, A.Replicate):
                bits *= self.int_value(e.count)
            return LogicVec(bits)
        if isinstance(e, A.Ternary):
            return self._eval(e.then) if self.int_value(e.cond) else self._eval(e.other)
        if isinstance(e, A.Unary):
            x = self.int_value(e.operand)
            ops = {"+": x, "-": -x, "!": int(not x), "~": ~x}
            if e.op not in ops:
                raise FrontendError(f"operator {e.op} not allowed in constant expressions", e.loc)
            return ops[e.op]
        if isinstance(e, A.Binary):
            a, b = self.int_value(e.left), self.int_value(e.right)
            try:
                return {
                    "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
                    "/": lambda: int(a / b), "%": lambda: a - int(a / b) * b,
                    "**": lambda: a ** b, "<<": lambda: a << b, ">>": lambda: a >> b,
                    "<<<": lambda: a << b, ">>>": lambda: a >> b,
                    "<": lambda: int(a < b), "<=": lambda: int(a <= b),
                    ">": lambda: int(a > b), ">=": lambda: int(a >= b),
                    "==": lambda: int(a == b), "!=": lambda: int(a != b),
                    "===": lambda: int(a == b), "!==": lambda: int(a != b),
                    "&&": lambda: int(bool(a) and bool(b)), "||": lambda: int(bool(a) or bool(b)),
                    "&": lambda: a & b, "|": lambda: a | b, "^": lambda: a ^ b,
                }[e.op]()
            except ZeroDivisionError:
                raise FrontendError("division by zero in constant expression", e.loc) from None
            except KeyError:
                raise FrontendError(f"operator {e.op} not allowed in constant expressions", e.loc) from None
        raise FrontendError("expected a constant expression", _loc(e))


def _loc(e):
    return getattr(e, "loc", None)
