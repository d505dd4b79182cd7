"""Recursive-descent parser for rational-function expressions in z.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" INT)*
    atom   := NUMBER | "z" | "(" expr ")"
    NUMBER := INT ["/" INT] ["i"] | "i"

A literal such as ``3/4i`` is the Gaussian rational (3/4)i; ``^`` binds
tighter than unary minus, so ``-z^2`` is ``-(z^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .rational_core import GaussianRational, MeroTriple, Polynomial, RationalFunction


class ParseError(ValueError):
    """Syntax error; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "z", "op", "end"
    value: object
    pos: int


_NUMBER = re.compile(r"(\d+)(?:\s*/\s*(\d+))?\s*(i)?")
_INT = re.compile(r"\d+")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            after_caret = bool(tokens) and tokens[-1].kind == "op" and tokens[-1].value == "^"
            if after_caret:
                m = _INT.match(text, i)
                tokens.append(Token("int", int(m.group(0)), i))
            else:
                m = _NUMBER.match(text, i)
                num, den, imag = m.group(1), m.group(2), m.group(3)
                if den is not None and int(den) == 0:
                    raise ParseError("zero denominator in literal", i, text)
                val = Fraction(int(num), int(den) if den else 1)
                tokens.append(Token("num", GaussianRational(0, val) if imag else GaussianRational(val), i))
            i = m.end()
            continue
        if ch == "i":
            tokens.append(Token("num", GaussianRational(0, 1), i))
        elif ch == "z":
            tokens.append(Token("z", None, i))
        elif ch in "+-*/^()":
            tokens.append(Token("op", ch, i))
        else:
            raise ParseError(f"unexpected character {ch!r}", i, text)
        i += 1
    tokens.append(Token("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.k = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.k]

    def at_op(self, ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in ops

    def fail(self, msg: str):
        raise ParseError(msg, self.tok.pos, self.text)

    def parse(self) -> RationalFunction:
        if self.tok.kind == "end":
            self.fail("empty expression")
        out = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token")
        return out

    def expr(self) -> RationalFunction:
        acc = self.term()
        while self.at_op("+-"):
            op = self.tok.value
            self.k += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RationalFunction:
        acc = self.unary()
        while self.at_op("*/"):
            op, pos = self.tok.value, self.tok.pos
            self.k += 1
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero polynomial", pos, self.text)
                acc = acc / rhs
        return acc

    def unary(self) -> RationalFunction:
        if self.at_op("-"):
            self.k += 1
            return -self.unary()
        if self.at_op("+"):
            self.k += 1
            return self.unary()
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        while self.at_op("^"):
            self.k += 1
            if self.tok.kind != "int":
                self.fail("exponent must be a nonnegative integer literal")
            exp = self.tok.value
            self.k += 1
            base = base ** exp
        return base

    def atom(self) -> RationalFunction:
        tok = self.tok
        if tok.kind == "num":
            self.k += 1
            return RationalFunction.constant(tok.value)
        if tok.kind == "z":
            self.k += 1
            return RationalFunction.z()
        if self.at_op("("):
            self.k += 1
            inner = self.expr()
            if not self.at_op(")"):
                self.fail("expected ')'")
            self.k += 1
            return inner
        self.fail("expected a number, 'z' or '('")


def parse_rational(text: str) -> RationalFunction:
    """Parse an expression into an exact rational function in lowest terms."""
    return _Parser(text).parse()


def parse_polynomial(text: str) -> Polynomial:
    f = parse_rational(text)
    if f.den.degree != 0:
        raise ValueError(f"not a polynomial: {text!r}")
    return f.num


def parse_mero_triple(a: str, b: str, c: str) -> MeroTriple:
    """Parse three coordinates; raises on nonzero sum, zero coordinate or a constant point."""
    P = MeroTriple(parse_rational(a), parse_rational(b), parse_rational(c))
    if not P.nonconstant:
        raise ValueError("constant point")
    return P


def parse_int_triple(text: str):
    from .nt_abc import IntTriple

    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated integers: {text!r}")
    try:
        a, b, c = (int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"malformed integer in {text!r}") from exc
    return IntTriple(a, b, c)
