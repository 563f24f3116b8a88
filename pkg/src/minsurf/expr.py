"""Closed-form holomorphic expressions in one complex coordinate.

Expression trees cover constants, the coordinate, field operations,
integer powers, and exp.  Every tree evaluates vectorized over numpy
arrays and differentiates symbolically, which is what the curvature and
winding-number machinery rely on.  Opaque callables are supported through
:class:`HolomorphicFn` with a numerically estimated derivative as fallback.
"""

from __future__ import annotations

import ast
from typing import Callable, Optional, Union

import numpy as np

from .errors import ExpressionError


class Expr:
    """Base node of a closed-form expression tree."""

    def __call__(self, z):
        raise NotImplementedError

    def diff(self) -> "Expr":
        raise NotImplementedError

    def subs(self, inner: "Expr") -> "Expr":
        """Substitute ``inner`` for the coordinate (composition)."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    # operator sugar so tests and scenario code can build trees naturally
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, n):
        return pow_(self, n)

    def __neg__(self):
        return mul(Const(-1.0), self)


class Const(Expr):
    def __init__(self, value):
        self.value = complex(value)

    def __call__(self, z):
        z = np.asarray(z)
        return np.broadcast_to(np.complex128(self.value), z.shape).copy() if z.shape else np.complex128(self.value)

    def diff(self):
        return Const(0.0)

    def subs(self, inner):
        return self

    def to_dict(self):
        return {"op": "const", "re": self.value.real, "im": self.value.imag}

    def __repr__(self):
        return f"Const({self.value})"


class Var(Expr):
    def __call__(self, z):
        return np.asarray(z, dtype=np.complex128)

    def diff(self):
        return Const(1.0)

    def subs(self, inner):
        return inner

    def to_dict(self):
        return {"op": "var"}

    def __repr__(self):
        return "Var()"


class _Binary(Expr):
    op = ""

    def __init__(self, a: Expr, b: Expr):
        self.a = a
        self.b = b

    def subs(self, inner):
        return type(self)(self.a.subs(inner), self.b.subs(inner))

    def to_dict(self):
        return {"op": self.op, "args": [self.a.to_dict(), self.b.to_dict()]}

    def __repr__(self):
        return f"{type(self).__name__}({self.a!r}, {self.b!r})"


class Add(_Binary):
    op = "add"

    def __call__(self, z):
        return self.a(z) + self.b(z)

    def diff(self):
        return add(self.a.diff(), self.b.diff())


class Sub(_Binary):
    op = "sub"

    def __call__(self, z):
        return self.a(z) - self.b(z)

    def diff(self):
        return sub(self.a.diff(), self.b.diff())


class Mul(_Binary):
    op = "mul"

    def __call__(self, z):
        return self.a(z) * self.b(z)

    def diff(self):
        return add(mul(self.a.diff(), self.b), mul(self.a, self.b.diff()))


class Div(_Binary):
    op = "div"

    def __call__(self, z):
        return self.a(z) / self.b(z)

    def diff(self):
        num = sub(mul(self.a.diff(), self.b), mul(self.a, self.b.diff()))
        return div(num, mul(self.b, self.b))


class Pow(Expr):
    """Integer power of a subexpression; negative exponents allowed."""

    def __init__(self, base: Expr, exponent: int):
        if not isinstance(exponent, (int, np.integer)):
            raise ExpressionError(f"power exponent must be an integer, got {exponent!r}")
        self.base = base
        self.exponent = int(exponent)

    def __call__(self, z):
        return self.base(z) ** self.exponent

    def diff(self):
        n = self.exponent
        if n == 0:
            return Const(0.0)
        return mul(mul(Const(n), pow_(self.base, n - 1)), self.base.diff())

    def subs(self, inner):
        return Pow(self.base.subs(inner), self.exponent)

    def to_dict(self):
        return {"op": "pow", "exponent": self.exponent, "args": [self.base.to_dict()]}

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exponent})"


class Exp(Expr):
    def __init__(self, arg: Expr):
        self.arg = arg

    def __call__(self, z):
        return np.exp(self.arg(z))

    def diff(self):
        return mul(self.arg.diff(), self)

    def subs(self, inner):
        return Exp(self.arg.subs(inner))

    def to_dict(self):
        return {"op": "exp", "args": [self.arg.to_dict()]}

    def __repr__(self):
        return f"Exp({self.arg!r})"


def _const_value(e: Expr):
    return e.value if isinstance(e, Const) else None


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex, np.integer, np.floating, np.complexfloating)):
        return Const(complex(x))
    raise ExpressionError(f"cannot coerce {x!r} to an expression")


# Folding constructors keep derivative trees small; they only apply exact
# identities (0, 1 absorption and constant arithmetic).

def add(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return Const(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return Const(ca - cb)
    if cb == 0:
        return a
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return Const(ca * cb)
    if ca == 0 or cb == 0:
        return Const(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if cb == 0:
        raise ExpressionError("division by the zero constant")
    if ca is not None and cb is not None:
        return Const(ca / cb)
    if ca == 0:
        return Const(0.0)
    if cb == 1:
        return a
    return Div(a, b)


def pow_(base: Expr, n: int) -> Expr:
    n = int(n)
    if n == 0:
        return Const(1.0)
    if n == 1:
        return base
    c = _const_value(base)
    if c is not None:
        return Const(c ** n)
    return Pow(base, n)


def exp(arg) -> Expr:
    return Exp(as_expr(arg))


ZETA = Var()


_NODE_TYPES = {
    "const": lambda d: Const(complex(d["re"], d["im"])),
    "var": lambda d: Var(),
}


def expr_from_dict(d: dict) -> Expr:
    op = d.get("op")
    if op in _NODE_TYPES:
        return _NODE_TYPES[op](d)
    args = [expr_from_dict(a) for a in d.get("args", ())]
    if op == "add":
        return Add(*args)
    if op == "sub":
        return Sub(*args)
    if op == "mul":
        return Mul(*args)
    if op == "div":
        return Div(*args)
    if op == "pow":
        return Pow(args[0], d["exponent"])
    if op == "exp":
        return Exp(args[0])
    raise ExpressionError(f"unknown expression node {op!r}")


_ALLOWED_NAMES = {"z", "zeta", "w"}
_ALLOWED_FUNCS = {"exp"}


def parse_expression(text: str) -> Expr:
    """Parse a string like ``"exp(z**2)/(z - 1j)"`` into an expression tree.

    Only arithmetic, integer powers, and exp are accepted; anything else
    raises :class:`ExpressionError`.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ExpressionError(f"cannot parse expression {text!r}: {e}") from None

    def conv(node) -> Expr:
        if isinstance(node, ast.Expression):
            return conv(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, (int, float, complex)):
                return Const(complex(node.value))
            raise ExpressionError(f"unsupported literal {node.value!r}")
        if isinstance(node, ast.Name):
            if node.id in _ALLOWED_NAMES:
                return Var()
            raise ExpressionError(f"unknown symbol {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            inner = conv(node.operand)
            if isinstance(node.op, ast.USub):
                return mul(Const(-1.0), inner)
            if isinstance(node.op, ast.UAdd):
                return inner
            raise ExpressionError("unsupported unary operator")
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = conv(node.left)
                exp_node = node.right
                sign = 1
                if isinstance(exp_node, ast.UnaryOp) and isinstance(exp_node.op, ast.USub):
                    sign = -1
                    exp_node = exp_node.operand
                if not (isinstance(exp_node, ast.Constant) and isinstance(exp_node.value, int)):
                    raise ExpressionError("power exponents must be integer literals")
                return pow_(base, sign * exp_node.value)
            a, b = conv(node.left), conv(node.right)
            if isinstance(node.op, ast.Add):
                return add(a, b)
            if isinstance(node.op, ast.Sub):
                return sub(a, b)
            if isinstance(node.op, ast.Mult):
                return mul(a, b)
            if isinstance(node.op, ast.Div):
                return div(a, b)
            raise ExpressionError("unsupported binary operator")
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_FUNCS and not node.keywords:
                if len(node.args) != 1:
                    raise ExpressionError(f"{node.func.id} takes one argument")
                return Exp(conv(node.args[0]))
            raise ExpressionError("only exp(...) calls are supported")
        raise ExpressionError(f"unsupported syntax node {type(node).__name__}")

    return conv(tree)


ExprLike = Union[Expr, str, complex, float, int]


class HolomorphicFn:
    """A holomorphic function given by an expression tree or an opaque evaluator.

    Expression-backed functions differentiate symbolically; opaque
    evaluators may carry an explicit derivative callable, otherwise
    callers fall back to the Cauchy-integral estimate in
    :func:`minsurf.quadrature.derivative_at`.
    """

    def __init__(
        self,
        expression: Optional[Expr] = None,
        evaluator: Optional[Callable] = None,
        derivative: Optional["HolomorphicFn"] = None,
        label: str = "",
    ):
        if (expression is None) == (evaluator is None):
            raise ExpressionError("exactly one of expression / evaluator must be given")
        self.expression = expression
        self._evaluator = evaluator
        self._derivative = derivative
        self.label = label

    @classmethod
    def from_expression(cls, source: ExprLike, label: str = "") -> "HolomorphicFn":
        if isinstance(source, str):
            return cls(expression=parse_expression(source), label=label or source)
        return cls(expression=as_expr(source), label=label)

    def __call__(self, z):
        if self.expression is not None:
            return self.expression(np.asarray(z, dtype=np.complex128))
        return self._evaluator(np.asarray(z, dtype=np.complex128))

    @property
    def is_closed_form(self) -> bool:
        return self.expression is not None

    @property
    def has_derivative(self) -> bool:
        return self.expression is not None or self._derivative is not None

    def derivative(self) -> "HolomorphicFn":
        if self._derivative is not None:
            return self._derivative
        if self.expression is not None:
            return HolomorphicFn(expression=self.expression.diff(), label=f"d({self.label})" if self.label else "")
        raise ExpressionError("opaque evaluator without a derivative; use derivative_at for a numeric estimate")

    def compose(self, inner: "HolomorphicFn") -> "HolomorphicFn":
        if self.expression is None or inner.expression is None:
            raise ExpressionError("composition requires closed-form operands")
        return HolomorphicFn(expression=self.expression.subs(inner.expression))

    def to_dict(self) -> dict:
        if self.expression is None:
            raise ExpressionError("opaque evaluators do not serialize")
        return self.expression.to_dict()

    @classmethod
    def from_dict(cls, d: dict) -> "HolomorphicFn":
        return cls(expression=expr_from_dict(d))

    def __repr__(self):
        if self.label:
            return f"HolomorphicFn({self.label})"
        return f"HolomorphicFn({'closed-form' if self.is_closed_form else 'opaque'})"


def holomorphy_residual(fn, points, step: float = 1e-6):
    """Wirtinger residual |d f / d conj(z)| estimated by central differences.

    Returns the max over ``points`` of the residual divided by the local
    magnitude scale; holomorphic inputs give values at roundoff level.
    """
    z = np.asarray(points, dtype=np.complex128)
    fx = (fn(z + step) - fn(z - step)) / (2.0 * step)
    fy = (fn(z + 1j * step) - fn(z - 1j * step)) / (2.0 * step)
    dbar = 0.5 * (fx + 1j * fy)
    scale = np.abs(fn(z)) + np.abs(fx) + 1.0
    return float(np.max(np.abs(dbar) / scale))
