"""
Expression tree nodes and the pretty-printer.

Trees are immutable frozen dataclasses, so two trees compare equal exactly when
they have the same structure. Printing emits the minimal parentheses that make
``parse(to_text(e)) == e`` hold for every parsed tree.
"""

import re
from dataclasses import dataclass


FUNCTIONS: frozenset[str] = frozenset({"sin", "cos", "exp", "ln", "sqrt"})

# x1..xn are base coordinates, y1..yk fiber (or dual fiber) coordinates and z
# the dissipation coordinate.
_VARIABLE_RE = re.compile(r"^(?:x[1-9][0-9]*|y[1-9][0-9]*|z)$")


class ExprError(Exception):
    """Base class for every expression failure."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str  # one of FUNCTIONS
    arg: "Expr"


Expr = Num | Var | Neg | BinOp | Call


def is_legal_variable(name: str) -> bool:
    return bool(_VARIABLE_RE.match(name))


def variable_sort_key(name: str) -> tuple[str, int]:
    """Sort x2 before x10."""
    if name == "z":
        return ("z", 0)
    return (name[0], int(name[1:]))


def variables(e: Expr) -> frozenset[str]:
    """Names of all variables occurring in ``e``."""
    match e:
        case Num():
            return frozenset()
        case Var(name):
            return frozenset({name})
        case Neg(arg) | Call(_, arg):
            return variables(arg)
        case BinOp(_, left, right):
            return variables(left) | variables(right)
    raise TypeError(f"Not an expression: {e!r}")


def is_zero(e: Expr) -> bool:
    """True only for the literal constant 0 (no simplification is attempted)."""
    return isinstance(e, Num) and e.value == 0.0


# Binding power used by the printer. Must mirror the grammar in parser.py.
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _render(e: Expr) -> tuple[str, int]:
    match e:
        case Num(value):
            text = _format_number(abs(value))
            if value < 0 or (value == 0.0 and str(value).startswith("-")):
                return f"-{text}", _NEG
            return text, _ATOM
        case Var(name):
            return name, _ATOM
        case Call(fn, arg):
            return f"{fn}({_render(arg)[0]})", _ATOM
        case Neg(arg):
            return f"-{_wrap(arg, _NEG)}", _NEG
        case BinOp("+" | "-" as op, left, right):
            return f"{_wrap(left, _ADD)} {op} {_wrap(right, _MUL)}", _ADD
        case BinOp("*" | "/" as op, left, right):
            return f"{_wrap(left, _MUL)}{op}{_wrap(right, _NEG)}", _MUL
        case BinOp("^", left, right):
            return f"{_wrap(left, _ATOM)}^{_wrap(right, _NEG)}", _POW
    raise TypeError(f"Not an expression: {e!r}")


def _wrap(e: Expr, min_power: int) -> str:
    text, power = _render(e)
    return text if power >= min_power else f"({text})"


def to_text(e: Expr) -> str:
    """Render ``e`` as text accepted by :func:`exprs.parse`."""
    return _render(e)[0]
