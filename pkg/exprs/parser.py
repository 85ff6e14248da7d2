"""
Recursive-descent parser for coefficient expressions.

Grammar, loosest binding first::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | variable | function '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x1^2``
is ``-(x1^2)``.
"""

import re
from dataclasses import dataclass

from .nodes import FUNCTIONS, BinOp, Call, Expr, ExprError, Neg, Num, Var, is_legal_variable


class ExprSyntaxError(ExprError):
    """Raised with the byte offset of the offending token and what was expected there."""

    def __init__(self, text: str, offset: int, expected: frozenset[str], found: str):
        self.text = text
        self.offset = offset
        self.expected = expected
        self.found = found
        wanted = ", ".join(sorted(expected))
        super().__init__(f"at byte {offset}: expected one of [{wanted}], found {found}")


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)

_OPERAND_START = frozenset({"number", "variable", "function", "(", "-"})
_END = "end of input"


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, end
    text: str
    offset: int  # byte offset


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            tokens.append(_Token("end", _END, _byte_offset(text, pos)))
            return tokens
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise ExprSyntaxError(
                text,
                _byte_offset(text, pos),
                _OPERAND_START | {"+", "*", "/", "^", ")"},
                repr(text[pos]),
            )
        kind = match.lastgroup
        tokens.append(_Token(kind, match.group(kind), _byte_offset(text, match.start(kind))))
        pos = match.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0
        self.depth = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _fail(self, expected: frozenset[str]):
        token = self.current
        found = _END if token.kind == "end" else repr(token.text)
        raise ExprSyntaxError(self.text, token.offset, expected, found)

    def _after_operand(self) -> frozenset[str]:
        expected = {"+", "-", "*", "/", "^"}
        expected.add(")" if self.depth else _END)
        return frozenset(expected)

    def _is_op(self, *ops: str) -> bool:
        return self.current.kind == "op" and self.current.text in ops

    def parse(self) -> Expr:
        tree = self.expr()
        if self.current.kind != "end":
            self._fail(self._after_operand())
        return tree

    def expr(self) -> Expr:
        left = self.term()
        while self._is_op("+", "-"):
            op = self._advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self._is_op("*", "/"):
            op = self._advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self._is_op("-"):
            self._advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._is_op("^"):
            self._advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "num":
            self._advance()
            return Num(float(token.text))
        if token.kind == "ident":
            if token.text in FUNCTIONS:
                self._advance()
                if not self._is_op("("):
                    self._fail(frozenset({"("}))
                return Call(token.text, self._group())
            if not is_legal_variable(token.text):
                raise ExprSyntaxError(
                    self.text, token.offset, frozenset({"variable", "function"}), repr(token.text)
                )
            self._advance()
            return Var(token.text)
        if self._is_op("("):
            return self._group()
        self._fail(_OPERAND_START)

    def _group(self) -> Expr:
        self._advance()
        self.depth += 1
        inner = self.expr()
        if not self._is_op(")"):
            self._fail(self._after_operand())
        self._advance()
        self.depth -= 1
        return inner


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree or raise :class:`ExprSyntaxError`."""
    return _Parser(text).parse()
