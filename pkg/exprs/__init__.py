"""Arithmetic expressions for anchors, structure functions and energies."""
from .nodes import (
    BinOp,
    Call,
    Expr,
    ExprError,
    FUNCTIONS,
    Neg,
    Num,
    Var,
    is_legal_variable,
    is_zero,
    to_text,
    variables,
)
from .parser import ExprSyntaxError, parse
from .calculus import (
    ExprDomainError,
    UnboundVariable,
    compile_expr,
    diff,
    evaluate,
    fold,
    negate,
)

__all__ = [
    "BinOp",
    "Call",
    "Expr",
    "ExprDomainError",
    "ExprError",
    "ExprSyntaxError",
    "FUNCTIONS",
    "Neg",
    "Num",
    "UnboundVariable",
    "Var",
    "compile_expr",
    "diff",
    "evaluate",
    "fold",
    "is_legal_variable",
    "is_zero",
    "negate",
    "parse",
    "to_text",
    "variables",
]
