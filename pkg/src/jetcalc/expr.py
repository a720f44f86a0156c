"""Scalar fields on the jet space J^1(T, M).

Expressions are immutable, hash-consed trees over the jet coordinates
``t^a``, ``x^i`` and ``x^i_a``.  Because identical subtrees are shared,
an expression behaves like a DAG: derivatives are memoised per node and
batch evaluation visits every distinct node once.

Coordinates are written ``t1..tp``, ``x1..xn`` and ``v{i}_{a}`` (so
``v2_1`` is the fibre coordinate x^2_1).
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Coord",
    "Expr",
    "Point",
    "PointBatch",
    "ParseError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "IndexOutOfRangeError",
    "EvaluationError",
    "EvalCache",
    "const",
    "var",
    "t",
    "x",
    "v",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "sinh",
    "cosh",
    "ZERO",
    "ONE",
    "parse",
    "differentiate",
    "evaluate",
    "evaluate_batch",
    "to_text",
]

TEMPORAL = "temporal"
SPATIAL = "spatial"
FIBER = "fiber"

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")


@dataclass(frozen=True, order=True)
class Coord:
    """A jet coordinate; indices are 1-based.

    ``a`` is the temporal index (temporal and fibre kinds), ``i`` the
    spatial index (spatial and fibre kinds).
    """

    kind: str
    a: int | None = None
    i: int | None = None

    def __post_init__(self):
        if self.kind == TEMPORAL:
            ok = self.a is not None and self.i is None and self.a >= 1
        elif self.kind == SPATIAL:
            ok = self.i is not None and self.a is None and self.i >= 1
        elif self.kind == FIBER:
            ok = self.a is not None and self.i is not None and self.a >= 1 and self.i >= 1
        else:
            ok = False
        if not ok:
            raise ValueError(f"invalid coordinate {self.kind!r} a={self.a} i={self.i}")
        object.__setattr__(self, "_hash", hash((self.kind, self.a, self.i)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Coord):
            return NotImplemented
        return self.kind == other.kind and self.a == other.a and self.i == other.i

    @property
    def name(self) -> str:
        if self.kind == TEMPORAL:
            return f"t{self.a}"
        if self.kind == SPATIAL:
            return f"x{self.i}"
        return f"v{self.i}_{self.a}"

    def check(self, dims: tuple[int, int]) -> None:
        p, n = dims
        if (self.a is not None and self.a > p) or (self.i is not None and self.i > n):
            raise IndexError(f"coordinate {self.name} out of range for dims (p, n) = {dims}")

    def __str__(self) -> str:
        return self.name


def t(a: int) -> "Expr":
    return var(Coord(TEMPORAL, a=a))


def x(i: int) -> "Expr":
    return var(Coord(SPATIAL, i=i))


def v(i: int, a: int) -> "Expr":
    return var(Coord(FIBER, a=a, i=i))


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------

_TABLE: dict = {}
_LOCK = threading.Lock()


class Expr:
    """Immutable expression node.

    Nodes are interned, so structural equality coincides with identity and
    ``is`` comparisons are exact.  Use :func:`const`, :func:`var`, the
    arithmetic operators and the elementary functions to build them.
    """

    __slots__ = ("op", "args", "value", "free", "_dcache", "__weakref__")

    op: str
    args: tuple["Expr", ...]
    value: object
    free: frozenset

    def __new__(cls, op, args=(), value=None):
        key = (op, tuple(id(a) for a in args), value)
        node = _TABLE.get(key)
        if node is not None:
            return node
        node = object.__new__(cls)
        setter = object.__setattr__
        setter(node, "op", op)
        setter(node, "args", tuple(args))
        setter(node, "value", value)
        if op == "var":
            free = frozenset((value,))
        elif len(args) == 1:
            free = args[0].free
        elif args:
            a, b = args[0].free, args[1].free
            free = a if b <= a else (b if a <= b else a | b)
        else:
            free = frozenset()
        setter(node, "free", free)
        setter(node, "_dcache", {})
        with _LOCK:
            return _TABLE.setdefault(key, node)

    def __setattr__(self, name, value):
        if hasattr(self, "_dcache") and name != "_dcache":
            raise AttributeError("Expr is immutable")
        object.__setattr__(self, name, value)

    def __reduce__(self):
        return (_rebuild, (to_text(self),))

    # -- predicates ---------------------------------------------------------

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    def is_number(self, c: float) -> bool:
        return self.op == "const" and self.value == c

    # -- operators ----------------------------------------------------------

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, k):
        if isinstance(k, Expr):
            if not (k.is_const and float(k.value).is_integer()):
                raise ValueError("only integer powers are supported")
            k = int(k.value)
        if not isinstance(k, (int, np.integer)):
            raise ValueError("only integer powers are supported")
        return power(self, int(k))

    def __neg__(self):
        return mul(MINUS_ONE, self)

    def __pos__(self):
        return self

    def __repr__(self) -> str:
        return f"Expr({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    def diff(self, c: Coord) -> "Expr":
        return differentiate(self, c)


def _lift(obj) -> Expr:
    if isinstance(obj, Expr):
        return obj
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return const(obj)
    raise TypeError(f"cannot convert {type(obj).__name__} to Expr")


def const(c: float) -> Expr:
    c = float(c)
    if c == 0.0:
        c = 0.0  # fold -0.0
    return Expr("const", (), c)


def var(c: Coord) -> Expr:
    return Expr("var", (), c)


ZERO = const(0)
ONE = const(1)
MINUS_ONE = const(-1)


def add(a: Expr, b: Expr) -> Expr:
    if a.is_const and b.is_const:
        return const(a.value + b.value)
    if a.is_number(0.0):
        return b
    if b.is_number(0.0):
        return a
    return Expr("add", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if a.is_const and b.is_const:
        return const(a.value - b.value)
    if b.is_number(0.0):
        return a
    if a is b:
        return ZERO
    if a.is_number(0.0):
        return mul(MINUS_ONE, b)
    return Expr("sub", (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if a.is_const and b.is_const:
        return const(a.value * b.value)
    if b.is_const:
        a, b = b, a
    if a.is_const:
        if a.value == 0.0:
            return ZERO
        if a.value == 1.0:
            return b
        # c1 * (c2 * e) -> (c1 c2) * e
        if b.op == "mul" and b.args[0].is_const:
            return mul(const(a.value * b.args[0].value), b.args[1])
    return Expr("mul", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if b.is_number(1.0):
        return a
    if a.is_number(0.0) and not b.is_number(0.0):
        return ZERO
    if a.is_const and b.is_const and b.value != 0.0:
        return const(a.value / b.value)
    return Expr("div", (a, b))


def power(a: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return a
    if a.is_const and not (a.value == 0.0 and k < 0):
        return const(a.value**k)
    return Expr("pow", (a,), k)


_NUMPY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
}


def func(name: str, a: Expr) -> Expr:
    if name not in _NUMPY_FUNCS:
        raise ValueError(f"unknown function {name!r}")
    if a.is_const:
        c = a.value
        if not ((name == "log" and c <= 0) or (name == "sqrt" and c < 0)):
            return const(getattr(math, name)(c))
    return Expr("func", (a,), name)


def sin(a) -> Expr:
    return func("sin", _lift(a))


def cos(a) -> Expr:
    return func("cos", _lift(a))


def tan(a) -> Expr:
    return func("tan", _lift(a))


def exp(a) -> Expr:
    return func("exp", _lift(a))


def log(a) -> Expr:
    return func("log", _lift(a))


def sqrt(a) -> Expr:
    return func("sqrt", _lift(a))


def sinh(a) -> Expr:
    return func("sinh", _lift(a))


def cosh(a) -> Expr:
    return func("cosh", _lift(a))


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------


def _func_derivative(name: str, a: Expr) -> Expr:
    if name == "sin":
        return cos(a)
    if name == "cos":
        return -sin(a)
    if name == "tan":
        return ONE / power(cos(a), 2)
    if name == "exp":
        return exp(a)
    if name == "log":
        return ONE / a
    if name == "sqrt":
        return ONE / (const(2) * sqrt(a))
    if name == "sinh":
        return cosh(a)
    if name == "cosh":
        return sinh(a)
    raise ValueError(name)


def differentiate(e: Expr, c: Coord) -> Expr:
    """Exact partial derivative of ``e`` with respect to coordinate ``c``.

    All jet coordinates are independent variables.  Results are memoised
    on the nodes, so repeated and higher derivatives of shared subtrees
    cost one pass each.
    """
    if c not in e.free:
        return ZERO
    # Iterative post-order so deep trees do not hit the recursion limit.
    stack = [e]
    while stack:
        node = stack[-1]
        if c in node._dcache:
            stack.pop()
            continue
        pending = [a for a in node.args if c in a.free and c not in a._dcache]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        node._dcache[c] = _diff_node(node, c)
    return e._dcache[c]


def _d(a: Expr, c: Coord) -> Expr:
    if c not in a.free:
        return ZERO
    return a._dcache[c]


def _diff_node(node: Expr, c: Coord) -> Expr:
    op = node.op
    if op == "var":
        return ONE if node.value == c else ZERO
    if op == "const":
        return ZERO
    if op == "add":
        a, b = node.args
        return add(_d(a, c), _d(b, c))
    if op == "sub":
        a, b = node.args
        return sub(_d(a, c), _d(b, c))
    if op == "mul":
        a, b = node.args
        return add(mul(_d(a, c), b), mul(a, _d(b, c)))
    if op == "div":
        a, b = node.args
        da, db = _d(a, c), _d(b, c)
        if db is ZERO:
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if op == "pow":
        (a,) = node.args
        k = node.value
        return mul(mul(const(k), power(a, k - 1)), _d(a, c))
    if op == "func":
        (a,) = node.args
        return mul(_func_derivative(node.value, a), _d(a, c))
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# Points and evaluation
# ---------------------------------------------------------------------------


def _frozen_array(values, shape, name):
    arr = np.array(values, dtype=float).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite entry in {name}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Point:
    """A point of J^1(T, M): ``t`` (p,), ``x`` (n,), ``v`` (n, p) with ``v[i, a]`` = x^i_a."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray

    def __init__(self, t, x, v):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        p, n = t_arr.size, x_arr.size
        object.__setattr__(self, "t", _frozen_array(t_arr, (p,), "t"))
        object.__setattr__(self, "x", _frozen_array(x_arr, (n,), "x"))
        object.__setattr__(self, "v", _frozen_array(v, (n, p), "v"))

    @property
    def dims(self) -> tuple[int, int]:
        return self.t.size, self.x.size

    def value(self, c: Coord) -> float:
        if c.kind == TEMPORAL:
            return float(self.t[c.a - 1])
        if c.kind == SPATIAL:
            return float(self.x[c.i - 1])
        return float(self.v[c.i - 1, c.a - 1])

    def to_dict(self) -> dict:
        return {"t": self.t.tolist(), "x": self.x.tolist(), "v": self.v.tolist()}


@dataclass(frozen=True)
class PointBatch:
    """Stacked points: ``t`` (N, p), ``x`` (N, n), ``v`` (N, n, p)."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    _points: tuple = field(default=(), repr=False, compare=False)

    @classmethod
    def from_points(cls, points: Sequence[Point]) -> "PointBatch":
        points = tuple(points)
        if not points:
            raise ValueError("empty point set")
        if len({q.dims for q in points}) != 1:
            raise ValueError("points have different dimensions")
        return cls(
            np.stack([q.t for q in points]),
            np.stack([q.x for q in points]),
            np.stack([q.v for q in points]),
            points,
        )

    @property
    def dims(self) -> tuple[int, int]:
        return self.t.shape[1], self.x.shape[1]

    def __len__(self) -> int:
        return self.t.shape[0]

    def __getitem__(self, k: int) -> Point:
        if self._points:
            return self._points[k]
        return Point(self.t[k], self.x[k], self.v[k])

    def column(self, c: Coord) -> np.ndarray:
        if c.kind == TEMPORAL:
            return self.t[:, c.a - 1]
        if c.kind == SPATIAL:
            return self.x[:, c.i - 1]
        return self.v[:, c.i - 1, c.a - 1]


class EvaluationError(ArithmeticError):
    """Domain error during evaluation; ``subtree`` is the offending node."""

    def __init__(self, message: str, subtree: Expr):
        super().__init__(f"{message} in {to_text(subtree)}")
        self.subtree = subtree


def _as_batch(points) -> PointBatch:
    if isinstance(points, PointBatch):
        return points
    if isinstance(points, Point):
        return PointBatch.from_points([points])
    return PointBatch.from_points(points)


class EvalCache:
    """Node values at one point batch, shared across ``evaluate_batch`` calls."""

    def __init__(self, points):
        self.batch = _as_batch(points)
        self.values: dict[int, np.ndarray] = {}
        self._alive: list[Expr] = []  # keeps ids in ``values`` valid


def evaluate_batch(exprs: Iterable[Expr] | np.ndarray, points, cache: EvalCache | None = None) -> np.ndarray:
    """Evaluate an array of expressions at a batch of points.

    Returns a float array of shape ``(N,) + shape(exprs)``.  Shared
    subtrees across all expressions are evaluated once; pass an
    :class:`EvalCache` built on the same points to share them across calls.
    """
    if cache is not None:
        batch = cache.batch
        if points is not None and points is not batch and _as_batch(points) is not batch:
            raise ValueError("cache was built on a different point batch")
        memo, alive = cache.values, cache._alive
    else:
        batch = _as_batch(points)
        memo, alive = {}, None
    arr = np.asarray(exprs, dtype=object)
    flat = arr.ravel()
    size = len(batch)
    out = np.empty((size, flat.size))
    with np.errstate(all="ignore"):
        for k, e in enumerate(flat):
            out[:, k] = _eval_node(_lift(e), batch, memo, size, alive)
    return out.reshape((size,) + arr.shape)


def evaluate(e: Expr, q: Point) -> float:
    """Value of ``e`` at a single point (IEEE double precision)."""
    return float(evaluate_batch(np.array([e], dtype=object), [q])[0, 0])


def _eval_node(root: Expr, batch: PointBatch, memo: dict, size: int, alive: list | None) -> np.ndarray:
    got = memo.get(id(root))
    if got is not None:
        return got
    stack = [root]
    while stack:
        node = stack[-1]
        key = id(node)
        if key in memo:
            stack.pop()
            continue
        args = node.args
        pending = False
        for a in args:
            if id(a) not in memo:
                stack.append(a)
                pending = True
        if pending:
            continue
        stack.pop()
        memo[key] = _apply(node, [memo[id(a)] for a in args], batch, size)
        if alive is not None:
            alive.append(node)
    return memo[id(root)]


def _apply(node: Expr, vals, batch: PointBatch, size: int) -> np.ndarray:
    op = node.op
    if op == "const":
        return np.full(size, node.value)
    if op == "var":
        node.value.check(batch.dims)
        return batch.column(node.value)
    if op == "add":
        return vals[0] + vals[1]
    if op == "sub":
        return vals[0] - vals[1]
    if op == "mul":
        return vals[0] * vals[1]
    if op == "div":
        if np.any(vals[1] == 0.0):
            raise EvaluationError("division by zero", node)
        return vals[0] / vals[1]
    if op == "pow":
        k = node.value
        if k < 0:
            if np.any(vals[0] == 0.0):
                raise EvaluationError("division by zero", node)
            return 1.0 / vals[0] ** (-k)
        return vals[0] ** k
    if op == "func":
        a = vals[0]
        name = node.value
        if name == "log" and np.any(a <= 0.0):
            raise EvaluationError("log of non-positive value", node)
        if name == "sqrt" and np.any(a < 0.0):
            raise EvaluationError("sqrt of negative value", node)
        return _NUMPY_FUNCS[name](a)
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def to_text(e: Expr) -> str:
    """Fully parenthesised infix text; ``parse(to_text(e))`` rebuilds ``e``."""
    memo: dict[int, str] = {}
    stack = [e]
    while stack:
        node = stack[-1]
        if id(node) in memo:
            stack.pop()
            continue
        pending = [a for a in node.args if id(a) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        memo[id(node)] = _print_node(node, [memo[id(a)] for a in node.args])
    return memo[id(e)]


def _print_node(node: Expr, parts: list[str]) -> str:
    op = node.op
    if op == "const":
        c = node.value
        text = repr(c)
        if c.is_integer() and abs(c) < 1e15:
            text = str(int(c))
        return f"({text})" if c < 0 else text
    if op == "var":
        return node.value.name
    if op in _SYMBOL:
        return f"({parts[0]} {_SYMBOL[op]} {parts[1]})"
    if op == "pow":
        k = node.value
        base = f"({parts[0]})" if node.args[0].op == "pow" else parts[0]
        return f"{base}^{k}" if k > 0 else f"{base}^({k})"
    if op == "func":
        return f"{node.value}({parts[0]})"
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    """Base class for expression parse failures; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class ExprSyntaxError(ParseError):
    pass


class UnknownIdentifierError(ParseError):
    pass


class IndexOutOfRangeError(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)

_VAR = re.compile(r"^(?:t(\d+)|x(\d+)|v(\d+)_(\d+))$")

# binding powers for binary operators: (left, right)
_BINARY = {"+": (10, 11), "-": (10, 11), "*": (20, 21), "/": (20, 21), "^": (41, 40)}
_UNARY_BP = 30


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dims: tuple[int, int]):
        self.text = text
        self.dims = dims
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos, self.text)

    def parse(self) -> Expr:
        e = self.expression(0)
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", pos, self.text)
        return e

    def expression(self, min_bp: int) -> Expr:
        lhs = self.prefix()
        while True:
            kind, val, pos = self.peek()
            if kind != "op" or val not in _BINARY:
                break
            lbp, rbp = _BINARY[val]
            if lbp < min_bp:
                break
            self.advance()
            if val == "^":
                rhs_pos = self.peek()[2]
                rhs = self.expression(rbp)
                if not (rhs.is_const and float(rhs.value).is_integer()):
                    raise ExprSyntaxError("exponent must be an integer constant", rhs_pos, self.text)
                lhs = power(lhs, int(rhs.value))
                continue
            rhs = self.expression(rbp)
            lhs = {"+": add, "-": sub, "*": mul, "/": div}[val](lhs, rhs)
        return lhs

    def prefix(self) -> Expr:
        kind, val, pos = self.advance()
        if kind == "num":
            return const(float(val))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if val not in FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {val!r}", pos, self.text)
                self.advance()
                arg = self.expression(0)
                self.expect(")")
                return func(val, arg)
            return self.variable(val, pos)
        if kind == "op" and val == "(":
            e = self.expression(0)
            self.expect(")")
            return e
        if kind == "op" and val in "+-":
            operand = self.expression(_UNARY_BP)
            return operand if val == "+" else mul(MINUS_ONE, operand)
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", pos, self.text)

    def variable(self, name: str, pos: int) -> Expr:
        m = _VAR.match(name)
        if m is None:
            raise UnknownIdentifierError(f"unknown identifier {name!r}", pos, self.text)
        p, n = self.dims
        ta, xi, vi, va = m.groups()
        if ta is not None:
            c = Coord(TEMPORAL, a=int(ta)) if int(ta) >= 1 else None
            ok = c is not None and c.a <= p
        elif xi is not None:
            c = Coord(SPATIAL, i=int(xi)) if int(xi) >= 1 else None
            ok = c is not None and c.i <= n
        else:
            c = Coord(FIBER, a=int(va), i=int(vi)) if int(va) >= 1 and int(vi) >= 1 else None
            ok = c is not None and c.i <= n and c.a <= p
        if not ok:
            raise IndexOutOfRangeError(
                f"variable {name!r} out of range for (p, n) = ({p}, {n})", pos, self.text
            )
        return var(c)


def parse(text: str, dims: tuple[int, int]) -> Expr:
    """Parse infix text into an expression over J^1 with dimensions ``(p, n)``.

    >>> to_text(parse("sin(x1)^2", (1, 2)))
    'sin(x1)^2'
    """
    return _Parser(text, tuple(dims)).parse()


# Pickling goes through text; variables carry their own indices so generous
# bounds are safe.
def _rebuild(text):
    return parse(text, (64, 64))
