"""Plain-text grammar for lines of working.

Operators `+ - * / ^` with the usual precedence (`^` binds tighter than unary
minus and is right-associative), parentheses, implicit multiplication for
`3x`, `2(x+1)` and `(x+1)(x+2)`, at most one `=` per line, and a root-list
form `x = 2 or x = 3` (comma also accepted) for multi-root answers.

Exponents must fold to integer constants. Function application, inequalities
and foreign variables (when the question's unknown is given) are rejected as
unsupported rather than malformed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParseError, UnsupportedFeatureError
from . import sets
from .nodes import (
    MAX_EXPONENT,
    Equation,
    Expr,
    Expression,
    MathLine,
    Neg,
    Num,
    Power,
    Product,
    RootsLine,
    Sum,
    Var,
    evaluate,
    normalize,
)

MAX_INPUT_LENGTH = 4096

_NUM, _IDENT, _OP, _OR, _END = "num", "ident", "op", "or", "end"
_PRECEDENCE = {"+": 10, "-": 10, "*": 20, "/": 20}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    out: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            out.append(_Token(_NUM, text[i:j], i))
            i = j
            continue
        if ch.isalpha():
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            out.append(_Token(_OR if word == "or" else _IDENT, word, i))
            i = j
            continue
        if ch in "+-*/^=(),":
            out.append(_Token(_OP, ch, i))
            i += 1
            continue
        if ch in "<>":
            raise UnsupportedFeatureError("inequalities are not supported", i)
        raise ParseError(f"unexpected character {ch!r}", i)
    out.append(_Token(_END, "", n))
    return out


class _Parser:
    def __init__(self, text: str, unknown: str | None):
        self.text = text
        self.unknown = unknown
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != _END:
            self.pos += 1
        return tok

    def expect_op(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != _OP or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.offset)
        return self.advance()

    # -- expression grammar ------------------------------------------------

    def parse_expr(self, min_prec: int = 0) -> Expr:
        lhs = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind == _OP and tok.text in _PRECEDENCE:
                op, explicit = tok.text, True
            elif self._starts_operand(tok):
                prev = self.tokens[self.pos - 1]
                if not self._implicit_mult_ok(prev, tok):
                    raise ParseError("expected an operator", tok.offset)
                op, explicit = "*", False
            else:
                break
            prec = _PRECEDENCE[op]
            if prec < min_prec:
                break
            if explicit:
                self.advance()
            rhs = self.parse_expr(prec + 1)
            lhs = self._combine(op, lhs, rhs)
        return lhs

    @staticmethod
    def _starts_operand(tok: _Token) -> bool:
        return tok.kind in (_NUM, _IDENT) or (tok.kind == _OP and tok.text == "(")

    @staticmethod
    def _implicit_mult_ok(prev: _Token, tok: _Token) -> bool:
        if prev.kind == _NUM:
            return tok.kind == _IDENT or tok.text == "("
        if prev.kind == _OP and prev.text == ")":
            return tok.text == "("
        return False

    @staticmethod
    def _combine(op: str, lhs: Expr, rhs: Expr) -> Expr:
        if op == "+":
            return Sum((lhs, rhs))
        if op == "-":
            return Sum((lhs, Neg(rhs)))
        if op == "*":
            return Product((lhs, rhs))
        return Product((lhs, Power(rhs, -1)))

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == _OP and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == _OP and tok.text == "^":
            self.advance()
            exp_tok = self.peek()
            exponent = self._fold_exponent(self.parse_unary(), exp_tok.offset)
            return Power(base, exponent)
        return base

    @staticmethod
    def _fold_exponent(e: Expr, offset: int) -> int:
        try:
            value = evaluate(normalize(e), {})
        except (KeyError, ZeroDivisionError):
            raise UnsupportedFeatureError("exponents must be integer constants", offset) from None
        if value.denominator != 1:
            raise UnsupportedFeatureError("exponents must be integers", offset)
        if abs(value.numerator) > MAX_EXPONENT:
            raise UnsupportedFeatureError(f"exponent magnitude is capped at {MAX_EXPONENT}", offset)
        return value.numerator

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == _NUM:
            self.advance()
            return Num(Fraction(tok.text))
        if tok.kind == _IDENT:
            nxt = self.peek(1)
            if nxt.kind == _OP and nxt.text == "(":
                raise UnsupportedFeatureError(
                    f"function calls like {tok.text}(...) are not supported", tok.offset
                )
            if self.unknown is not None and tok.text != self.unknown:
                raise UnsupportedFeatureError(
                    f"unexpected variable {tok.text!r}; this question uses {self.unknown!r}",
                    tok.offset,
                )
            self.advance()
            return Var(tok.text)
        if tok.kind == _OP and tok.text == "(":
            self.advance()
            inner = self.parse_expr(0)
            self.expect_op(")")
            return inner
        raise ParseError("expected a number, variable or '('", tok.offset)

    # -- line grammar ------------------------------------------------------

    def parse_line(self) -> MathLine:
        lhs = self.parse_expr(0)
        tok = self.peek()
        if tok.kind == _END:
            return Expression(lhs, source_text=self.text)
        if tok.kind != _OP or tok.text != "=":
            raise ParseError("unexpected input after expression", tok.offset)
        self.advance()
        rhs = self.parse_expr(0)
        tok = self.peek()
        if tok.kind == _END:
            return Equation(lhs, rhs, source_text=self.text)
        if tok.kind == _OP and tok.text == "=":
            raise ParseError("only one '=' is allowed per line", tok.offset)
        if tok.kind == _OR or (tok.kind == _OP and tok.text == ","):
            return self._parse_root_list(lhs, rhs, tok.offset)
        raise ParseError("unexpected input after equation", tok.offset)

    def _parse_root_list(self, lhs: Expr, rhs: Expr, offset: int) -> MathLine:
        if not isinstance(lhs, Var):
            raise ParseError("multiple solutions need the form x = value or x = value", offset)
        name = lhs.name
        values = [self._fold_root(rhs, offset)]
        while True:
            tok = self.peek()
            if tok.kind == _OR:
                self.advance()
                ident = self.peek()
                if ident.kind != _IDENT or ident.text != name:
                    raise ParseError(f"expected {name!r} before '='", ident.offset)
                self.advance()
                self.expect_op("=")
            elif tok.kind == _OP and tok.text == ",":
                self.advance()
                if self.peek().kind == _IDENT and self.peek(1).text == "=":
                    ident = self.advance()
                    if ident.text != name:
                        raise ParseError(f"expected {name!r} before '='", ident.offset)
                    self.expect_op("=")
            elif tok.kind == _END:
                break
            else:
                raise ParseError("unexpected input after solution list", tok.offset)
            clause_tok = self.peek()
            values.append(self._fold_root(self.parse_expr(0), clause_tok.offset))
        return RootsLine(name, sets.finite(values), source_text=self.text)

    @staticmethod
    def _fold_root(e: Expr, offset: int) -> Fraction:
        folded = normalize(e)
        if not isinstance(folded, Num):
            raise ParseError("solution values must be rational constants", offset)
        return folded.value


def parse_line(text: str, unknown: str | None = None) -> MathLine:
    """Parse one line of working. Raises ParseError / UnsupportedFeatureError."""
    if len(text) > MAX_INPUT_LENGTH:
        raise ParseError(f"input longer than {MAX_INPUT_LENGTH} characters", MAX_INPUT_LENGTH)
    parser = _Parser(text, unknown)
    if parser.peek().kind == _END:
        raise ParseError("empty input", 0)
    return parser.parse_line()


def parse_expr(text: str, unknown: str | None = None) -> Expr:
    """Parse a bare expression (no '='); used for rule parameters."""
    line = parse_line(text, unknown)
    if not isinstance(line, Expression):
        raise ParseError("expected an expression without '='", 0)
    return line.expr
