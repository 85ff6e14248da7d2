"""Evaluation, constant folding and symbolic differentiation."""

import math
from collections.abc import Callable, Mapping

from .nodes import BinOp, Call, Expr, ExprError, Neg, Num, Var, is_legal_variable

Env = Mapping[str, float]
Compiled = Callable[[Env], float]


class UnboundVariable(ExprError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} is not bound")


class ExprDomainError(ExprError):
    """Division by zero, log of a non-positive number and similar."""


def _divide(a: float, b: float) -> float:
    if b == 0.0:
        raise ExprDomainError(f"division by zero ({a!r}/0)")
    return a / b


def _power(a: float, b: float) -> float:
    try:
        return math.pow(a, b)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise ExprDomainError(f"{a!r}^{b!r} is undefined") from e


def _ln(a: float) -> float:
    if a <= 0.0:
        raise ExprDomainError(f"ln({a!r}) is undefined")
    return math.log(a)


def _sqrt(a: float) -> float:
    if a < 0.0:
        raise ExprDomainError(f"sqrt({a!r}) is undefined")
    return math.sqrt(a)


def _periodic(fn: Callable[[float], float], name: str) -> Callable[[float], float]:
    def apply(a: float) -> float:
        if not math.isfinite(a):
            raise ExprDomainError(f"{name}({a!r}) is undefined")
        return fn(a)

    return apply


def _exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError as e:
        raise ExprDomainError(f"exp({a!r}) overflows") from e


_BINARY: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _divide,
    "^": _power,
}

_UNARY: dict[str, Callable[[float], float]] = {
    "sin": _periodic(math.sin, "sin"),
    "cos": _periodic(math.cos, "cos"),
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
}


def _compile(e: Expr) -> Compiled:
    match e:
        case Num(value):
            return lambda env: value
        case Var(name):
            def lookup(env: Env) -> float:
                try:
                    return env[name]
                except KeyError:
                    raise UnboundVariable(name) from None
            return lookup
        case Neg(arg):
            inner = _compile(arg)
            return lambda env: -inner(env)
        case BinOp(op, left, right):
            fn, lhs, rhs = _BINARY[op], _compile(left), _compile(right)
            return lambda env: fn(lhs(env), rhs(env))
        case Call(name, arg):
            fn, inner = _UNARY[name], _compile(arg)
            return lambda env: fn(inner(env))
    raise TypeError(f"Not an expression: {e!r}")


def compile_expr(e: Expr) -> Compiled:
    """
    Turn ``e`` into a closure over an environment mapping.

    The closure raises :class:`UnboundVariable` for missing names and
    :class:`ExprDomainError` for any non-finite result.
    """
    body = _compile(e)

    def run(env: Env) -> float:
        value = body(env)
        if not math.isfinite(value):
            raise ExprDomainError(f"non-finite result {value!r}")
        return value

    return run


def evaluate(e: Expr, env: Env) -> float:
    return compile_expr(e)(env)


def _literal(op: str, a: float, b: float) -> Num | None:
    try:
        value = _BINARY[op](a, b)
    except ExprDomainError:
        return None
    return Num(value) if math.isfinite(value) else None


def negate(e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(-e.value)
    if isinstance(e, Neg):
        return e.arg
    return Neg(e)


def fold(e: Expr) -> Expr:
    """
    Fold literal subtrees into numbers.

    Only literal arithmetic is performed (plus collapsing double negation);
    ``x1 - x1`` stays as it is. Literal subtrees that would fail to evaluate
    are left alone so evaluation reports them.
    """
    match e:
        case Num() | Var():
            return e
        case Neg(arg):
            return negate(fold(arg))
        case BinOp(op, left, right):
            left, right = fold(left), fold(right)
            if isinstance(left, Num) and isinstance(right, Num):
                folded = _literal(op, left.value, right.value)
                if folded is not None:
                    return folded
            return BinOp(op, left, right)
        case Call(name, arg):
            arg = fold(arg)
            if isinstance(arg, Num):
                try:
                    value = _UNARY[name](arg.value)
                except ExprDomainError:
                    return Call(name, arg)
                if math.isfinite(value):
                    return Num(value)
            return Call(name, arg)
    raise TypeError(f"Not an expression: {e!r}")


# Constructors used while differentiating. They fold literals and drop the
# neutral elements so derivatives stay readable.

def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Num) and e.value == value


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return negate(b)
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return Num(0.0)
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if _is(a, -1.0):
        return negate(b)
    if _is(b, -1.0):
        return negate(a)
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _literal("/", a.value, b.value)
        if folded is not None:
            return folded
    if _is(b, 1.0):
        return a
    if _is(a, 0.0) and not _is(b, 0.0):
        return Num(0.0)
    return BinOp("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _literal("^", a.value, b.value)
        if folded is not None:
            return folded
    if _is(b, 1.0):
        return a
    if _is(b, 0.0):
        return Num(1.0)
    return BinOp("^", a, b)


def _d(e: Expr, var: str) -> Expr:
    match e:
        case Num():
            return Num(0.0)
        case Var(name):
            return Num(1.0 if name == var else 0.0)
        case Neg(arg):
            return negate(_d(arg, var))
        case BinOp("+", u, v):
            return _add(_d(u, var), _d(v, var))
        case BinOp("-", u, v):
            return _sub(_d(u, var), _d(v, var))
        case BinOp("*", u, v):
            return _add(_mul(_d(u, var), v), _mul(u, _d(v, var)))
        case BinOp("/", u, v):
            du, dv = _d(u, var), _d(v, var)
            return _sub(_div(du, v), _div(_mul(u, dv), _pow(v, Num(2.0))))
        case BinOp("^", u, Num(c)):
            return _mul(_mul(Num(c), _pow(u, Num(c - 1.0))), _d(u, var))
        case BinOp("^", Num() as u, v):
            return _mul(_mul(e, Call("ln", u)), _d(v, var))
        case BinOp("^", u, v):
            du, dv = _d(u, var), _d(v, var)
            return _mul(e, _add(_mul(dv, Call("ln", u)), _div(_mul(v, du), u)))
        case Call(name, u):
            du = _d(u, var)
            if _is(du, 0.0):
                return Num(0.0)
            match name:
                case "sin":
                    outer = Call("cos", u)
                case "cos":
                    outer = Neg(Call("sin", u))
                case "exp":
                    outer = e
                case "ln":
                    return _div(du, u)
                case "sqrt":
                    return _div(du, _mul(Num(2.0), e))
            return _mul(outer, du)
    raise TypeError(f"Not an expression: {e!r}")


def diff(e: Expr, var: str) -> Expr:
    """Symbolic partial derivative of ``e`` with respect to ``var``, constant-folded."""
    if not is_legal_variable(var):
        raise ValueError(f"{var!r} is not a variable name")
    return fold(_d(fold(e), var))
