"""Scalar expression trees: parse, evaluate, differentiate, render.

Expressions describe Lagrangian densities, closed-form fields and symmetry
generators. Nodes are immutable dataclasses; evaluation is vectorised with
numpy so one call evaluates an expression on a whole grid of points.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' factor)?
    base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base

Unary minus sits in ``base``, so ``-x^2`` reads as ``(-x)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import (
    ConfigurationError,
    DomainViolationError,
    ExprSyntaxError,
    UnboundVariableError,
    UnknownIdentifierError,
)

Number = Union[int, float]
ArrayLike = Union[float, np.ndarray]

FUNCTIONS: Tuple[str, ...] = ("sin", "cos", "exp", "log", "sqrt", "abs")
BINARY_OPS: Tuple[str, ...] = ("add", "sub", "mul", "div", "pow")
FIELD_SYMBOL = "phi"


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------
class Expr:
    """Base class of all expression nodes.

    Arithmetic operators build simplified nodes, so generator and field
    expressions can be written directly in Python.
    """

    def __add__(self, other: Union["Expr", Number]) -> "Expr":
        return add(self, as_expr(other))

    def __radd__(self, other: Number) -> "Expr":
        return add(as_expr(other), self)

    def __sub__(self, other: Union["Expr", Number]) -> "Expr":
        return sub(self, as_expr(other))

    def __rsub__(self, other: Number) -> "Expr":
        return sub(as_expr(other), self)

    def __mul__(self, other: Union["Expr", Number]) -> "Expr":
        return mul(self, as_expr(other))

    def __rmul__(self, other: Number) -> "Expr":
        return mul(as_expr(other), self)

    def __truediv__(self, other: Union["Expr", Number]) -> "Expr":
        return div(self, as_expr(other))

    def __rtruediv__(self, other: Number) -> "Expr":
        return div(as_expr(other), self)

    def __pow__(self, other: Union["Expr", Number]) -> "Expr":
        return power(self, as_expr(other))

    def __rpow__(self, other: Number) -> "Expr":
        return power(as_expr(other), self)

    def __neg__(self) -> "Expr":
        return neg(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Unary(Expr):
    op: str  # "neg" or one of FUNCTIONS
    arg: Expr


@dataclass(frozen=True, eq=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(value: Union[Expr, Number]) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Const(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def const(value: Number) -> Const:
    return Const(float(value))


def var(name: str) -> Var:
    return Var(name)


def _is_const(e: Expr, value: Optional[float] = None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# ---------------------------------------------------------------------------
# Smart constructors (constant folding + identity elimination only)
# ---------------------------------------------------------------------------
def _fold(fn: Callable[..., float], *values: float) -> Optional[float]:
    with np.errstate(all="ignore"):
        try:
            out = float(fn(*values))
        except (ValueError, ZeroDivisionError, OverflowError):
            return None
    return out if math.isfinite(out) else None


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _fold(lambda x, y: x + y, a.value, b.value)
        if folded is not None:
            return Const(folded)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Binary("add", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _fold(lambda x, y: x - y, a.value, b.value)
        if folded is not None:
            return Const(folded)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Binary("sub", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        folded = _fold(lambda x, y: x * y, a.value, b.value)
        if folded is not None:
            return Const(folded)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Binary) and b.op == "mul" and isinstance(b.left, Const):
        folded = _fold(lambda x, y: x * y, a.value, b.left.value)
        if folded is not None:
            return mul(Const(folded), b.right)
    return Binary("mul", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        folded = _fold(lambda x, y: x / y, a.value, b.value)
        if folded is not None:
            return Const(folded)
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    return Binary("div", a, b)


def power(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        base, exponent = a.value, b.value
        if base > 0 or (float(exponent).is_integer() and not (base == 0 and exponent < 0)):
            folded = _fold(lambda x, y: x**y, base, exponent)
            if folded is not None:
                return Const(folded)
    if _is_const(b, 0.0):
        return ONE
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 1.0):
        return ONE
    return Binary("pow", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


_FOLDERS: Dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": lambda v: math.log(v) if v > 0 else math.nan,
    "sqrt": lambda v: math.sqrt(v) if v >= 0 else math.nan,
    "abs": abs,
}


def func(name: str, a: Expr) -> Expr:
    if name not in _FOLDERS:
        raise UnknownIdentifierError(name, "function position")
    if isinstance(a, Const):
        folded = _fold(_FOLDERS[name], a.value)
        if folded is not None:
            return Const(folded)
    return Unary(name, a)


def sin(a: Union[Expr, Number]) -> Expr:
    return func("sin", as_expr(a))


def cos(a: Union[Expr, Number]) -> Expr:
    return func("cos", as_expr(a))


def exp(a: Union[Expr, Number]) -> Expr:
    return func("exp", as_expr(a))


def log(a: Union[Expr, Number]) -> Expr:
    return func("log", as_expr(a))


def sqrt(a: Union[Expr, Number]) -> Expr:
    return func("sqrt", as_expr(a))


def absolute(a: Union[Expr, Number]) -> Expr:
    return func("abs", as_expr(a))


def sum_of(terms: Iterable[Expr]) -> Expr:
    total: Expr = ZERO
    for term in terms:
        total = add(total, term)
    return total


_BUILDERS: Dict[str, Callable[[Expr, Expr], Expr]] = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "pow": power,
}


# ---------------------------------------------------------------------------
# Variable spaces
# ---------------------------------------------------------------------------
class VarRole(str, Enum):
    COORDINATE = "coordinate"
    FIELD = "field"
    ALPHA_DERIVATIVE = "alpha_derivative"


def coordinate_symbol(axis: int) -> str:
    return f"x_{axis + 1}"


def alpha_derivative_symbol(axis: int) -> str:
    return f"g_{axis + 1}"


@dataclass(frozen=True)
class VarSpace:
    """Ordered, role-tagged variable names an expression may reference."""

    names: Tuple[str, ...]
    roles: Tuple[VarRole, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.roles):
            raise ConfigurationError("VarSpace names and roles differ in length")
        if len(set(self.names)) != len(self.names):
            raise ConfigurationError(f"duplicate variable names in {self.names}")
        for name in self.names:
            if not _IDENT.fullmatch(name) or name in FUNCTIONS:
                raise ConfigurationError(f"invalid variable name '{name}'")

    @classmethod
    def for_dimension(cls, dimension: int) -> "VarSpace":
        """Coordinates x_1..x_D, the field symbol phi and α-derivatives g_1..g_D."""
        if dimension < 1:
            raise ConfigurationError(f"dimension must be >= 1, got {dimension}")
        names: List[str] = [coordinate_symbol(i) for i in range(dimension)]
        roles: List[VarRole] = [VarRole.COORDINATE] * dimension
        names.append(FIELD_SYMBOL)
        roles.append(VarRole.FIELD)
        names.extend(alpha_derivative_symbol(i) for i in range(dimension))
        roles.extend([VarRole.ALPHA_DERIVATIVE] * dimension)
        return cls(tuple(names), tuple(roles))

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def role(self, name: str) -> VarRole:
        try:
            return self.roles[self.names.index(name)]
        except ValueError:
            raise UnknownIdentifierError(name) from None

    def with_roles(self, *roles: VarRole) -> "VarSpace":
        keep = [(n, r) for n, r in zip(self.names, self.roles) if r in roles]
        return VarSpace(tuple(n for n, _ in keep), tuple(r for _, r in keep))

    @property
    def dimension(self) -> int:
        return sum(1 for r in self.roles if r is VarRole.COORDINATE)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
_IDENT = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")
_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str, space: Optional[VarSpace]) -> None:
        self.text = text
        self.space = space
        self.pos = 0

    def _offset(self, pos: Optional[int] = None) -> int:
        # 1-based byte offset
        at = self.pos if pos is None else pos
        return len(self.text[:at].encode("utf-8")) + 1

    def _error(self, message: str, pos: Optional[int] = None) -> ExprSyntaxError:
        return ExprSyntaxError(message, self._offset(pos), self.text)

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, char: str) -> None:
        if self._peek() != char:
            found = self._peek() or "end of input"
            raise self._error(f"expected '{char}', found {found!r}")
        self.pos += 1

    def parse(self) -> Expr:
        if not self.text.strip():
            raise self._error("empty expression")
        node = self.expr()
        if self._peek():
            raise self._error(f"unexpected {self._peek()!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self._peek() in ("+", "-"):
            op = "add" if self.text[self.pos] == "+" else "sub"
            self.pos += 1
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self._peek() in ("*", "/"):
            op = "mul" if self.text[self.pos] == "*" else "div"
            self.pos += 1
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.base()
        if self._peek() == "^":
            self.pos += 1
            node = Binary("pow", node, self.factor())
        return node

    def base(self) -> Expr:
        char = self._peek()
        if not char:
            raise self._error("unexpected end of input")
        if char == "-":
            self.pos += 1
            return Unary("neg", self.base())
        if char == "(":
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        number = _NUMBER.match(self.text, self.pos)
        if number:
            self.pos = number.end()
            return Const(float(number.group()))
        ident = _IDENT.match(self.text, self.pos)
        if ident:
            start = self.pos
            name = ident.group()
            self.pos = ident.end()
            if self._peek() == "(":
                if name not in FUNCTIONS:
                    raise UnknownIdentifierError(name, f"function position (offset {self._offset(start)})")
                self.pos += 1
                arg = self.expr()
                self._expect(")")
                return Unary(name, arg)
            if self.space is not None and name not in self.space:
                raise UnknownIdentifierError(name, f"offset {self._offset(start)}")
            return Var(name)
        raise self._error(f"unexpected {char!r}")


def parse(text: str, space: Optional[VarSpace] = None) -> Expr:
    """Parse ``text`` into an unsimplified AST.

    When ``space`` is given every identifier must be declared in it.
    """
    return _Parser(text, space).parse()


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------
def free_variables(e: Expr) -> frozenset:
    memo: Dict[int, frozenset] = {}

    def walk(node: Expr) -> frozenset:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            out = frozenset((node.name,))
        elif isinstance(node, Unary):
            out = walk(node.arg)
        elif isinstance(node, Binary):
            out = walk(node.left) | walk(node.right)
        else:
            out = frozenset()
        memo[key] = out
        return out

    return walk(e)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, re-simplifying on the way up."""
    memo: Dict[int, Expr] = {}

    def walk(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            out = mapping.get(node.name, node)
        elif isinstance(node, Unary):
            arg = walk(node.arg)
            out = neg(arg) if node.op == "neg" else func(node.op, arg)
        elif isinstance(node, Binary):
            out = _BUILDERS[node.op](walk(node.left), walk(node.right))
        else:
            out = node
        memo[key] = out
        return out

    return walk(e)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------
def _is_integral(values: np.ndarray) -> np.ndarray:
    return np.equal(np.floor(values), values)


def evaluate(e: Expr, bindings: Mapping[str, ArrayLike]) -> ArrayLike:
    """Evaluate ``e`` with numpy broadcasting over array bindings.

    Returns a float when every binding is scalar. Domain violations raise
    ``DomainViolationError``; a NaN result is never returned.
    """
    arrays: Dict[str, np.ndarray] = {k: np.asarray(v, dtype=float) for k, v in bindings.items()}
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
    memo: Dict[int, np.ndarray] = {}

    def walk(node: Expr) -> np.ndarray:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = np.asarray(node.value)
        elif isinstance(node, Var):
            if node.name not in arrays:
                raise UnboundVariableError(node.name)
            out = arrays[node.name]
        elif isinstance(node, Unary):
            out = _apply_unary(node.op, walk(node.arg))
        elif isinstance(node, Binary):
            out = _apply_binary(node.op, walk(node.left), walk(node.right))
        else:  # pragma: no cover
            raise TypeError(f"unknown node {node!r}")
        memo[key] = out
        return out

    with np.errstate(all="ignore"):
        result = walk(e)
    if np.isnan(result).any():
        raise DomainViolationError(f"expression is undefined at the given bindings: {_short(e)}")
    if shape == ():
        return float(result)
    return np.array(np.broadcast_to(result, shape), dtype=float)


def _apply_unary(op: str, u: np.ndarray) -> np.ndarray:
    if op == "neg":
        return -u
    if op == "sin":
        return np.sin(u)
    if op == "cos":
        return np.cos(u)
    if op == "exp":
        return np.exp(u)
    if op == "log":
        if np.any(u <= 0):
            raise DomainViolationError(f"log of non-positive value {float(np.min(u))!r}")
        return np.log(u)
    if op == "sqrt":
        if np.any(u < 0):
            raise DomainViolationError(f"sqrt of negative value {float(np.min(u))!r}")
        return np.sqrt(u)
    if op == "abs":
        return np.abs(u)
    raise UnknownIdentifierError(op, "function position")


def _apply_binary(op: str, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    if op == "div":
        if np.any(v == 0):
            raise DomainViolationError("division by zero")
        return u / v
    if op == "pow":
        u, v = np.broadcast_arrays(u, v)
        if np.any((u < 0) & ~_is_integral(v)):
            raise DomainViolationError("non-integer power of a negative base")
        if np.any((u == 0) & (v < 0)):
            raise DomainViolationError("negative power of zero")
        return np.power(u, v)
    raise ConfigurationError(f"unknown operator '{op}'")


def _short(e: Expr, limit: int = 80) -> str:
    try:
        text = render(e)
    except ConfigurationError:
        text = repr(e)
    return text if len(text) <= limit else text[: limit - 3] + "..."


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------
def diff(e: Expr, v: str, space: Optional[VarSpace] = None) -> Expr:
    """Exact partial derivative of ``e`` with respect to the variable ``v``.

    All other variables are held fixed, so ``phi`` and ``g_i`` behave as
    independent arguments.
    """
    if space is not None and v not in space:
        raise UnknownIdentifierError(v)
    memo: Dict[int, Expr] = {}
    free: Dict[int, bool] = {}

    def depends(node: Expr) -> bool:
        key = id(node)
        if key not in free:
            if isinstance(node, Var):
                free[key] = node.name == v
            elif isinstance(node, Unary):
                free[key] = depends(node.arg)
            elif isinstance(node, Binary):
                free[key] = depends(node.left) or depends(node.right)
            else:
                free[key] = False
        return free[key]

    def d(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if not depends(node):
            out: Expr = ZERO
        elif isinstance(node, Var):
            out = ONE
        elif isinstance(node, Unary):
            out = _diff_unary(node, d(node.arg))
        elif isinstance(node, Binary):
            out = _diff_binary(node, d(node.left), d(node.right), depends(node.right))
        else:
            out = ZERO
        memo[key] = out
        return out

    return d(e)


def _diff_unary(node: Unary, du: Expr) -> Expr:
    u = node.arg
    if node.op == "neg":
        return neg(du)
    if node.op == "sin":
        return mul(func("cos", u), du)
    if node.op == "cos":
        return neg(mul(func("sin", u), du))
    if node.op == "exp":
        return mul(node, du)
    if node.op == "log":
        return div(du, u)
    if node.op == "sqrt":
        return div(du, mul(Const(2.0), node))
    if node.op == "abs":
        return mul(du, div(u, node))
    raise UnknownIdentifierError(node.op, "function position")


def _diff_binary(node: Binary, du: Expr, dv: Expr, exponent_varies: bool) -> Expr:
    u, v = node.left, node.right
    if node.op == "add":
        return add(du, dv)
    if node.op == "sub":
        return sub(du, dv)
    if node.op == "mul":
        return add(mul(du, v), mul(u, dv))
    if node.op == "div":
        return div(sub(mul(du, v), mul(u, dv)), power(v, Const(2.0)))
    if node.op == "pow":
        if not exponent_varies:
            return mul(mul(v, power(u, sub(v, ONE))), du)
        # u^v (v' log u + v u'/u)
        return mul(node, add(mul(dv, func("log", u)), div(mul(v, du), u)))
    raise ConfigurationError(f"unknown operator '{node.op}'")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------
_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 4}
_SYMBOLS = {"add": " + ", "sub": " - ", "mul": " * ", "div": " / ", "pow": "^"}
_ATOM = 5


def _precedence(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PRECEDENCE[node.op]
    return _ATOM


def render(e: Expr) -> str:
    """Text that parses back to an expression with identical values."""
    if isinstance(e, Const):
        if not math.isfinite(e.value):
            raise ConfigurationError(f"cannot render non-finite constant {e.value!r}")
        text = repr(float(e.value))
        return f"({text})" if e.value < 0 or text.startswith("-") else text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = render(e.arg)
            if _precedence(e.arg) < _ATOM or (isinstance(e.arg, Unary) and e.arg.op == "neg"):
                inner = f"({inner})"
            return f"-{inner}"
        return f"{e.op}({render(e.arg)})"
    if isinstance(e, Binary):
        prec = _PRECEDENCE[e.op]
        left, right = render(e.left), render(e.right)
        if e.op == "pow":
            if _precedence(e.left) <= prec or (isinstance(e.left, Unary) and e.left.op == "neg"):
                left = f"({left})"
            if _precedence(e.right) < prec:
                right = f"({right})"
        else:
            if _precedence(e.left) < prec:
                left = f"({left})"
            if _precedence(e.right) <= prec:
                right = f"({right})"
        return f"{left}{_SYMBOLS[e.op]}{right}"
    raise TypeError(f"unknown node {e!r}")


__all__ = [
    "FIELD_SYMBOL",
    "FUNCTIONS",
    "Binary",
    "Const",
    "Expr",
    "ONE",
    "Unary",
    "Var",
    "VarRole",
    "VarSpace",
    "ZERO",
    "absolute",
    "add",
    "alpha_derivative_symbol",
    "as_expr",
    "const",
    "coordinate_symbol",
    "cos",
    "diff",
    "div",
    "evaluate",
    "exp",
    "free_variables",
    "func",
    "log",
    "mul",
    "neg",
    "parse",
    "power",
    "render",
    "sin",
    "sqrt",
    "sub",
    "substitute",
    "sum_of",
    "var",
]
