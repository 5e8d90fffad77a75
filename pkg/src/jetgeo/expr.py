"""Immutable expression trees with exact symbolic differentiation.

Nodes are frozen dataclasses, so trees are hashable, comparable and safe to
share between threads. The module-level constructors (``add``, ``mul``, ...)
perform the only simplification the package does: constant folding and
neutral-element elimination. There is deliberately no canonical ordering of
terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

FUNCTIONS = ("sin", "cos", "exp")

# binding strength used by the printer
_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


class Expression:
    """Base class of all expression nodes."""

    __slots__ = ()

    def diff(self, j: int) -> "Expression":
        """Partial derivative with respect to the variable ``x<j>``."""
        raise NotImplementedError

    def evaluate(self, x: Sequence[float], params: Mapping[str, float] | None = None) -> float:
        """Evaluate at a single point; ``x[0]`` is the value of ``x1``."""
        return compile_expressions([self])(list(map(float, x)), dict(params or {}))[0]

    def variables(self) -> frozenset[int]:
        return frozenset().union(*(c.variables() for c in self.children()))

    def parameters(self) -> frozenset[str]:
        return frozenset().union(*(c.parameters() for c in self.children()))

    def children(self) -> tuple["Expression", ...]:
        return ()

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0.0

    def __str__(self) -> str:
        return _fmt(self)


@dataclass(frozen=True)
class Const(Expression):
    value: float

    def diff(self, j):
        return ZERO


@dataclass(frozen=True)
class Var(Expression):
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"variable index must be >= 1, got {self.index}")

    def diff(self, j):
        return ONE if j == self.index else ZERO

    def variables(self):
        return frozenset((self.index,))


@dataclass(frozen=True)
class Param(Expression):
    name: str

    def diff(self, j):
        return ZERO

    def parameters(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression

    def diff(self, j):
        return neg(self.arg.diff(j))

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class BinOp(Expression):
    op: str  # one of + - * /
    left: Expression
    right: Expression

    def diff(self, j):
        a, b = self.left, self.right
        da, db = a.diff(j), b.diff(j)
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        # quotient rule
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: int

    def diff(self, j):
        return mul(mul(Const(float(self.exponent)), power(self.base, self.exponent - 1)),
                   self.base.diff(j))

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class Func(Expression):
    name: str
    arg: Expression

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def diff(self, j):
        da = self.arg.diff(j)
        if self.name == "sin":
            return mul(func("cos", self.arg), da)
        if self.name == "cos":
            return neg(mul(func("sin", self.arg), da))
        return mul(self, da)

    def children(self):
        return (self.arg,)


ZERO = Const(0.0)
ONE = Const(1.0)


# --- simplifying constructors -------------------------------------------------

def _num(e: Expression) -> float | None:
    return e.value if isinstance(e, Const) else None


def _c(v: float) -> Const:
    # + 0.0 maps -0.0 to 0.0 so folded zeros print and compare as plain 0
    return Const(float(v) + 0.0)


def neg(a: Expression) -> Expression:
    if isinstance(a, Const):
        return _c(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expression, b: Expression) -> Expression:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return _c(va + vb)
    if va == 0.0:
        return b
    if vb == 0.0:
        return a
    return BinOp("+", a, b)


def sub(a: Expression, b: Expression) -> Expression:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return _c(va - vb)
    if vb == 0.0:
        return a
    if va == 0.0:
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expression, b: Expression) -> Expression:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return _c(va * vb)
    if va == 0.0 or vb == 0.0:
        return ZERO
    if va == 1.0:
        return b
    if vb == 1.0:
        return a
    if va == -1.0:
        return neg(b)
    if vb == -1.0:
        return neg(a)
    return BinOp("*", a, b)


def div(a: Expression, b: Expression) -> Expression:
    va, vb = _num(a), _num(b)
    # x/0 is left in the tree so evaluation reports it
    if vb == 0.0:
        return BinOp("/", a, b)
    if va is not None and vb is not None:
        return _c(va / vb)
    if va == 0.0:
        return ZERO
    if vb == 1.0:
        return a
    return BinOp("/", a, b)


def power(base: Expression, k: int) -> Expression:
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    vb = _num(base)
    if vb is not None and not (vb == 0.0 and k < 0):
        return _c(vb ** k)
    return Pow(base, k)


def func(name: str, arg: Expression) -> Expression:
    v = _num(arg)
    if v is not None:
        return _c(getattr(math, name)(v))
    return Func(name, arg)


def simplify(e: Expression) -> Expression:
    """Rebuild ``e`` bottom-up through the simplifying constructors."""
    if isinstance(e, Neg):
        return neg(simplify(e.arg))
    if isinstance(e, BinOp):
        a, b = simplify(e.left), simplify(e.right)
        return {"+": add, "-": sub, "*": mul, "/": div}[e.op](a, b)
    if isinstance(e, Pow):
        return power(simplify(e.base), e.exponent)
    if isinstance(e, Func):
        return func(e.name, simplify(e.arg))
    return e


# --- printing -----------------------------------------------------------------

def _const_text(v: float) -> str:
    if math.isfinite(v) and v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e: Expression) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Const):
        return _PREC_NEG if (e.value < 0 or math.copysign(1.0, e.value) < 0) else _PREC_ATOM
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e: Expression, need: int) -> str:
    s = _fmt(e)
    return f"({s})" if _prec(e) < need else s


def _fmt(e: Expression) -> str:
    if isinstance(e, Const):
        v = e.value
        if math.copysign(1.0, v) < 0:
            return "-" + _const_text(-v)
        return _const_text(v)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _PREC_NEG)
    if isinstance(e, Func):
        return f"{e.name}({_fmt(e.arg)})"
    if isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{_wrap(e.base, _PREC_ATOM)}^{exp}"
    p = _prec(e)
    # the parser is left-associative; parenthesizing every same-precedence
    # right operand keeps the evaluation order (and rounding) unchanged
    return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"


# --- compilation to Python callables -----------------------------------------

def _div(a, b):
    if np.any(np.asarray(b) == 0):
        raise ZeroDivisionError("division by zero")
    return a / b


def _ipow(a, k):
    if k < 0 and np.any(np.asarray(a) == 0):
        raise ZeroDivisionError("zero to a negative power")
    if isinstance(a, float):
        return a ** k
    return np.asarray(a, dtype=float) ** float(k)


_NAMESPACE = {"_div": _div, "_ipow": _ipow, "sin": np.sin, "cos": np.cos, "exp": np.exp}


def to_source(e: Expression) -> str:
    """Python source evaluating ``e`` given a sequence ``x`` and mapping ``p``."""
    if isinstance(e, Const):
        return f"({e.value!r})"
    if isinstance(e, Var):
        return f"x[{e.index - 1}]"
    if isinstance(e, Param):
        return f"p[{e.name!r}]"
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Func):
        return f"{e.name}({to_source(e.arg)})"
    if isinstance(e, Pow):
        if e.exponent > 0:
            return f"({to_source(e.base)}**{e.exponent})"
        return f"_ipow({to_source(e.base)}, {e.exponent})"
    if e.op == "/":
        return f"_div({to_source(e.left)}, {to_source(e.right)})"
    return f"({to_source(e.left)} {e.op} {to_source(e.right)})"


def compile_expressions(exprs: Sequence[Expression]) -> Callable:
    """Compile expressions into one ``f(x, p) -> tuple`` callable.

    ``x`` may be a list of floats (one point) or a sequence of equally
    shaped arrays (a batch of points, one array per coordinate).
    Constant entries come back as plain floats; callers broadcast.
    """
    body = ", ".join(to_source(e) for e in exprs)
    src = f"lambda x, p: ({body}{',' if exprs else ''})"
    return eval(compile(src, "<jetgeo-expr>", "eval"), dict(_NAMESPACE))
