"""Field-file parsing and the :class:`VectorField` container.

Field files hold one component per line::

    # Lorenz five-component model
    X1 = -x2*x3 + eps*x2*x5
    X2 = x1*x3 - eps*x1*x5
    ...

Variables are ``x1 .. xn``; any other identifier except the function names
``sin``, ``cos``, ``exp`` and the reserved time symbol ``t`` is a parameter.
``^`` binds tightest, is right-associative and takes integer exponents only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import expr as E
from .expr import Expression

__all__ = [
    "FieldParseError",
    "EvaluationError",
    "UnboundParameterError",
    "VectorField",
    "parse_expression",
    "parse_field",
    "load_field",
    "eval_field",
    "partial",
    "second_partial",
]


class FieldParseError(ValueError):
    """Malformed field text. ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class EvaluationError(ArithmeticError):
    """Raised when a component cannot be evaluated (e.g. division by zero)."""

    def __init__(self, component: int, reason: str):
        self.component = component
        super().__init__(f"component X{component}: {reason}")


class UnboundParameterError(KeyError):
    def __init__(self, names: Iterable[str]):
        self.names = tuple(sorted(names))
        super().__init__("unbound parameter(s): " + ", ".join(self.names))

    def __str__(self):
        return self.args[0]


# --- tokenizer / recursive-descent parser -------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_VAR = re.compile(r"x(\d+)$")


class _Parser:
    def __init__(self, text: str, line: int = 1, col0: int = 0):
        self.text = text
        self.line = line
        self.col0 = col0
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                self.fail(f"unexpected character {text[bad]!r}", bad)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text.rstrip())))
        self.i = 0

    def fail(self, msg: str, pos: int):
        raise FieldParseError(msg, self.line, self.col0 + pos + 1)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            self.fail(f"expected {value!r}, found {text or 'end of line'!r}", pos)

    def parse(self) -> Expression:
        if self.peek()[0] == "end":
            self.fail("empty expression", self.peek()[2])
        e = self.sum()
        kind, text, pos = self.peek()
        if kind != "end":
            self.fail(f"unexpected token {text!r}", pos)
        return e

    def sum(self) -> Expression:
        e = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = E.BinOp(op, e, self.product())
        return e

    def product(self) -> Expression:
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = E.BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expression:
        kind, text, _ = self.peek()
        if kind == "op" and text in ("+", "-"):
            self.take()
            arg = self.unary()
            if text == "+":
                return arg
            return E.Neg(arg)
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            pos = self.peek()[2]
            # exponent: a signed power-level expression that must fold to an integer
            sign = 1
            while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
                if self.take()[1] == "-":
                    sign = -sign
            k = E.simplify(self.power())
            if not isinstance(k, E.Const):
                self.fail("exponent must be an integer constant", pos)
            value = sign * k.value
            if not float(value).is_integer():
                self.fail(f"exponent must be an integer, got {value!r}", pos)
            return E.Pow(base, int(value))
        return base

    def atom(self) -> Expression:
        kind, text, pos = self.take()
        if kind == "num":
            return E.Const(float(text))
        if kind == "name":
            if text in E.FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return E.Func(text, arg)
            if text == "t":
                self.fail("fields must be autonomous; 't' is not allowed", pos)
            m = _VAR.match(text)
            if m:
                idx = int(m.group(1))
                if idx < 1:
                    self.fail(f"variable indices start at 1, got {text!r}", pos)
                return E.Var(idx)
            return E.Param(text)
        if kind == "op" and text == "(":
            e = self.sum()
            self.expect(")")
            return e
        self.fail(f"unexpected {text or 'end of line'!r}", pos)


def parse_expression(text: str) -> Expression:
    """Parse a single right-hand-side expression."""
    return _Parser(text).parse()


# --- vector field -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VectorField:
    """An autonomous first-order system ``dx/dt = X(x)`` on R^n.

    Symbolic derivative tables and compiled evaluators are built lazily and
    cached on the instance; they never change after construction.
    """

    components: tuple[Expression, ...]
    params: Mapping[str, float] = dc_field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "params",
                           MappingProxyType({k: float(v) for k, v in self.params.items()}))
        n = len(self.components)
        if n < 1:
            raise ValueError("a vector field needs at least one component")
        for i, c in enumerate(self.components, 1):
            bad = [v for v in c.variables() if v > n]
            if bad:
                raise ValueError(f"component X{i} references x{max(bad)} but n = {n}")

    @property
    def n(self) -> int:
        return len(self.components)

    @cached_property
    def parameter_names(self) -> frozenset[str]:
        return frozenset().union(*(c.parameters() for c in self.components))

    @property
    def unbound(self) -> frozenset[str]:
        return self.parameter_names - set(self.params)

    def with_params(self, **values: float) -> "VectorField":
        return VectorField(self.components, {**self.params, **values})

    def check_bound(self):
        if self.unbound:
            raise UnboundParameterError(self.unbound)

    # symbolic tables -----------------------------------------------------

    @cached_property
    def jacobian_exprs(self) -> tuple[tuple[Expression, ...], ...]:
        return tuple(tuple(c.diff(j) for j in range(1, self.n + 1)) for c in self.components)

    def hessian_expr(self, i: int, j: int, k: int) -> Expression:
        """Symbolic second partial of ``X_i`` w.r.t. ``x_j, x_k`` (1-based)."""
        return self._hessian_exprs[i - 1][min(j, k) - 1][max(j, k) - 1]

    @cached_property
    def _hessian_exprs(self):
        # differentiate in ascending variable order so H[i][j][k] and
        # H[i][k][j] are the very same tree
        n = self.n
        table = []
        for row in self.jacobian_exprs:
            block = [[E.ZERO] * n for _ in range(n)]
            for j in range(n):
                for k in range(j, n):
                    block[j][k] = row[j].diff(k + 1)
            table.append(block)
        return table

    # compiled evaluators ---------------------------------------------------

    @cached_property
    def _f_values(self):
        return E.compile_expressions(self.components)

    @cached_property
    def _f_jacobian(self):
        return E.compile_expressions([e for row in self.jacobian_exprs for e in row])

    @cached_property
    def _f_hessian(self):
        n = self.n
        flat = [self.hessian_expr(i, j, k)
                for i in range(1, n + 1) for j in range(1, n + 1) for k in range(1, n + 1)]
        return E.compile_expressions(flat)

    def _run(self, fn, exprs_for_blame, x, shape):
        """Evaluate a compiled table at one point or a batch of points.

        ``x`` has shape ``(n,)`` or ``(..., n)``; the result has shape
        ``batch + shape``.
        """
        self.check_bound()
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.n,):
            raise ValueError(f"expected points of dimension {self.n}, got shape {x.shape}")
        batch = x.shape[:-1]
        args = x.tolist() if not batch else list(np.moveaxis(x, -1, 0))
        params = dict(self.params)
        try:
            with np.errstate(divide="raise", invalid="raise"):
                vals = fn(args, params)
        except (ZeroDivisionError, FloatingPointError) as exc:
            self._blame(exprs_for_blame, args, params, exc)
        if not batch:
            return np.array(vals, dtype=float).reshape(shape)
        out = np.empty(batch + (len(vals),))
        for idx, v in enumerate(vals):
            out[..., idx] = v
        return out.reshape(batch + shape)

    def _blame(self, groups, args, params, exc):
        for comp, exprs in groups():
            try:
                with np.errstate(divide="raise", invalid="raise"):
                    E.compile_expressions(list(exprs))(args, params)
            except (ZeroDivisionError, FloatingPointError) as inner:
                raise EvaluationError(comp, str(inner)) from exc
        raise EvaluationError(0, str(exc)) from exc

    def __call__(self, x) -> np.ndarray:
        """Field value(s) ``X(x)``."""
        return self._run(self._f_values,
                         lambda: ((i, [c]) for i, c in enumerate(self.components, 1)),
                         x, (self.n,))

    def jacobian(self, x) -> np.ndarray:
        n = self.n
        return self._run(self._f_jacobian,
                         lambda: enumerate(self.jacobian_exprs, 1),
                         x, (n, n))

    def hessian(self, x) -> np.ndarray:
        """``H[..., i, j, k] = d^2 X_i / dx_j dx_k`` (0-based array indices)."""
        n = self.n
        rows = lambda: ((i, [self.hessian_expr(i, j, k) for j in range(1, n + 1)
                             for k in range(1, n + 1)]) for i in range(1, n + 1))
        return self._run(self._f_hessian, rows, x, (n, n, n))

    def to_text(self) -> str:
        return "".join(f"X{i} = {c}\n" for i, c in enumerate(self.components, 1))


def parse_field(text: str, params: Mapping[str, float] | None = None) -> VectorField:
    """Parse field-file text into a :class:`VectorField`.

    Unbound parameter names are allowed here; they must be supplied through
    :meth:`VectorField.with_params` before evaluation.
    """
    found: dict[int, tuple[Expression, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = re.match(r"\s*X(\d+)\s*=", line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise FieldParseError("expected a component definition 'X<i> = <expression>'",
                                  lineno, col)
        label = int(m.group(1))
        if label in found:
            raise FieldParseError(f"duplicate component X{label} (first defined on line "
                                  f"{found[label][1]})", lineno, m.start(1) + 1)
        if label < 1:
            raise FieldParseError("component labels start at X1", lineno, m.start(1) + 1)
        e = _Parser(line[m.end():], lineno, m.end()).parse()
        found[label] = (e, lineno)
    if not found:
        raise FieldParseError("no components defined")
    n = max(found)
    missing = sorted(set(range(1, n + 1)) - set(found))
    if missing:
        raise FieldParseError("missing component(s) " + ", ".join(f"X{i}" for i in missing))
    for label, (e, lineno) in found.items():
        over = [v for v in e.variables() if v > n]
        if over:
            raise FieldParseError(f"X{label} references x{max(over)} but the field has "
                                  f"only {n} components", lineno)
    comps = tuple(found[i][0] for i in range(1, n + 1))
    return VectorField(comps, dict(params or {}))


def load_field(path, params: Mapping[str, float] | None = None) -> VectorField:
    with open(path, encoding="utf-8") as fh:
        return parse_field(fh.read(), params)


def eval_field(field: VectorField, x) -> np.ndarray:
    return field(x)


def partial(field: VectorField, i: int, j: int) -> Expression:
    """Symbolic ``dX_i/dx_j`` (1-based indices)."""
    _check_index(field, i, j)
    return field.jacobian_exprs[i - 1][j - 1]


def second_partial(field: VectorField, i: int, j: int, k: int) -> Expression:
    """Symbolic ``d^2 X_i / dx_k dx_j``; identical trees for swapped j, k."""
    _check_index(field, i, j, k)
    return field.hessian_expr(i, j, k)


def _check_index(field: VectorField, *idx: int):
    for v in idx:
        if not 1 <= v <= field.n:
            raise IndexError(f"index {v} outside 1..{field.n}")
