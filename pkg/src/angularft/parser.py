"""Recursive-descent parser for the expression syntax used on the command line.

::

    EXPR   := POW ( '*' FACTOR )*
    POW    := ('p' | 'r') '^' INT
    FACTOR := ('phat' | 'xhat' | 'p' | 'x') '[' IDENT ']'
            | 'delta3' | 'delta3p'
            | 'Y' '[' INT ',' INT ']'

Whitespace is ignored, including between a sign and its digits.  Offsets in errors count bytes of the UTF-8 input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import StrEnum

from .errors import ParseError, SemanticError
from .tensor import IndexName, Side, index_key

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>[+-]?\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>\S))")

_SIDE_OF_POWER = {"p": Side.MOMENTUM, "r": Side.POSITION}
_VECTOR_WORDS = {
    "phat": (Side.MOMENTUM, True),
    "p": (Side.MOMENTUM, False),
    "xhat": (Side.POSITION, True),
    "x": (Side.POSITION, False),
}
_DELTA_WORDS = {"delta3": Side.POSITION, "delta3p": Side.MOMENTUM}
_FACTOR_START = (*_VECTOR_WORDS, *_DELTA_WORDS, "Y")


class FactorKind(StrEnum):
    HAT = "hat"
    FULL = "full"
    YLM = "ylm"


@dataclass(frozen=True, slots=True)
class Factor:
    kind: FactorKind
    index: IndexName = ""
    ell: int = 0
    m: int = 0


@dataclass(frozen=True, slots=True)
class ExprAst:
    """``s**power`` times vector or spherical-harmonic factors on one side."""

    side: Side
    power: int
    factors: tuple[Factor, ...] = ()
    delta: bool = False

    @property
    def indices(self) -> tuple[IndexName, ...]:
        return tuple(f.index for f in self.factors if f.kind is not FactorKind.YLM)

    @property
    def full_count(self) -> int:
        return sum(1 for f in self.factors if f.kind is FactorKind.FULL)

    @property
    def ylm(self) -> Factor | None:
        return next((f for f in self.factors if f.kind is FactorKind.YLM), None)


@dataclass(slots=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            break
        kind = match.lastgroup or "punct"
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), len(source[:start].encode("utf-8"))))
        pos = match.end()
    tokens.append(_Token("end", "", len(source.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        return ParseError(f"unexpected {found}", token.offset, expected)

    def take(self, text: str) -> _Token:
        if self.current.text != text or self.current.kind == "end":
            raise self.fail((repr(text),))
        token = self.current
        self.pos += 1
        return token

    def take_int(self) -> int:
        sign = 1
        if self.current.kind == "punct" and self.current.text in "+-":
            nxt = self.tokens[self.pos + 1]
            if nxt.kind == "int" and nxt.text[0] not in "+-":
                sign = -1 if self.current.text == "-" else 1
                self.pos += 1
        if self.current.kind != "int":
            raise self.fail(("INT",))
        value = sign * int(self.current.text)
        self.pos += 1
        return value

    def take_ident(self) -> str:
        if self.current.kind not in ("word", "int"):
            raise self.fail(("IDENT",))
        value = self.current.text
        self.pos += 1
        return value

    def parse(self) -> tuple[_Token, int, list[tuple[_Token, Factor | Side]]]:
        head = self.current
        if head.kind != "word" or head.text not in _SIDE_OF_POWER:
            raise self.fail(("'p'", "'r'"))
        self.pos += 1
        self.take("^")
        power = self.take_int()
        factors: list[tuple[_Token, Factor | Side]] = []
        while self.current.kind != "end":
            self.take("*")
            factors.append(self.factor())
        return head, power, factors

    def factor(self) -> tuple[_Token, Factor | Side]:
        token = self.current
        expected = tuple(repr(word) for word in _FACTOR_START)
        if token.kind != "word" or token.text not in _FACTOR_START:
            raise self.fail(expected)
        self.pos += 1
        if token.text in _DELTA_WORDS:
            return token, _DELTA_WORDS[token.text]
        self.take("[")
        if token.text == "Y":
            ell = self.take_int()
            self.take(",")
            m = self.take_int()
            self.take("]")
            return token, Factor(FactorKind.YLM, ell=ell, m=m)
        index = self.take_ident()
        self.take("]")
        hat = _VECTOR_WORDS[token.text][1]
        return token, Factor(FactorKind.HAT if hat else FactorKind.FULL, index=index)


def _factor_side(token: _Token) -> Side | None:
    if token.text in _VECTOR_WORDS:
        return _VECTOR_WORDS[token.text][0]
    return _DELTA_WORDS.get(token.text)


def parse_expr(source: str) -> ExprAst:
    """Parse and validate an expression; vector factors come back in index order."""
    head, power, items = _Parser(source).parse()
    side = _SIDE_OF_POWER[head.text]
    delta = False
    factors: list[Factor] = []
    seen: set[str] = set()
    for token, item in items:
        factor_side = _factor_side(token)
        if factor_side is not None and factor_side is not side:
            raise SemanticError(
                f"{token.text!r} is a {factor_side} factor in a {side} expression", token.offset
            )
        if isinstance(item, Side):
            if delta:
                raise SemanticError(f"repeated {token.text}", token.offset)
            delta = True
            continue
        if item.kind is not FactorKind.YLM:
            if item.index in seen:
                raise SemanticError(f"duplicate index {item.index!r}", token.offset)
            seen.add(item.index)
        factors.append(item)

    ylm = [f for f in factors if f.kind is FactorKind.YLM]
    if ylm and len(ylm) != len(factors):
        raise SemanticError("Y factors cannot be mixed with vector factors", head.offset)
    if len(ylm) > 1:
        raise SemanticError("at most one Y factor is allowed", head.offset)
    if ylm and not abs(ylm[0].m) <= ylm[0].ell:
        raise SemanticError(f"Y[{ylm[0].ell},{ylm[0].m}] needs |m| <= l", head.offset)
    factors.sort(key=lambda f: (f.kind is FactorKind.FULL, index_key(f.index)))
    return ExprAst(side, power, tuple(factors), delta)


def render(ast: ExprAst) -> str:
    """Canonical text form; ``parse_expr(render(ast)) == ast``."""
    momentum = ast.side is Side.MOMENTUM
    parts = [f"{'p' if momentum else 'r'}^{ast.power}"]
    for factor in ast.factors:
        if factor.kind is FactorKind.YLM:
            parts.append(f"Y[{factor.ell},{factor.m}]")
        elif factor.kind is FactorKind.HAT:
            parts.append(f"{'phat' if momentum else 'xhat'}[{factor.index}]")
        else:
            parts.append(f"{'p' if momentum else 'x'}[{factor.index}]")
    if ast.delta:
        parts.append("delta3p" if momentum else "delta3")
    return " * ".join(parts)


__all__ = ["ExprAst", "Factor", "FactorKind", "parse_expr", "render"]
