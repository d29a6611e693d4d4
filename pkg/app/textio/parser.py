"""Recursive-descent parser for the expression grammar (see grammar.md)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from app.domain import expr as E
from app.domain.errors import ParseError, SourceSpan, UnknownFunctionError
from app.domain.expr import Expr
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm

_TOKEN = re.compile(
    r"\s*(?:(?P<hyp>\d+F\d+)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\^|\*|/|\+|-|\(|\)|,|;))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # hyp, num, name, op, end
    text: str
    start: int  # 0-based offset
    end: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None or match.lastgroup is None:
            col = len(text) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"Unexpected character {text[col - 1]!r}", SourceSpan(line, col, col))
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind), match.end(kind)))
        pos = match.end()
    tokens.append(Token("end", "", len(text), len(text)))
    return tokens


_UNARY = {
    "Gamma": E.gamma,
    "sin": E.sin,
    "cos": E.cos,
    "ln": E.ln,
    "log": E.ln,
    "sqrt": E.sqrt,
    "arctanh": E.arctanh,
    "csc": lambda x: E.div(1, E.sin(x)),
    "cot": lambda x: E.div(E.cos(x), E.sin(x)),
    "tan": lambda x: E.div(E.sin(x), E.cos(x)),
    "harmonic": lambda x: E.add(E.psi(E.add(x, 1)), E.EULER),
}

_BINARY: dict[str, Callable[[Expr, Expr], Expr]] = {
    "binom": E.binom,
    "poch": E.poch,
}


def dixon(m: LinForm, n: LinForm, a: LinForm, b: LinForm, c: LinForm) -> HypSpec:
    return HypSpec.of((a, b, c), (1 + a - b + m, 1 + a - c + n))


def whipple(m: LinForm, n: LinForm, a: LinForm, b: LinForm, c: LinForm) -> HypSpec:
    return HypSpec.of((a, b, 1 - a + m), (c, 1 + b * 2 - c + n))


def watson(m: LinForm, n: LinForm, a: LinForm, b: LinForm, c: LinForm) -> HypSpec:
    half = Fraction(1, 2)
    return HypSpec.of((a, b, c), (c * 2 + n, half + a * half + b * half + m * half))


_ALIASES: dict[str, Callable[..., HypSpec]] = {
    "dixon": dixon,
    "whipple": whipple,
    "watson": watson,
}


class Parser:
    def __init__(self, text: str, line: int = 1) -> None:
        self.text = text
        self.line = line
        self.tokens = tokenize(text, line)
        self.pos = 0

    # Token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def span(self, token: Token) -> SourceSpan:
        return SourceSpan(self.line, token.start + 1, max(token.end, token.start + 1))

    def error(self, message: str, token: Token | None = None) -> ParseError:
        return ParseError(message, self.span(token or self.current))

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.current
        if not self.accept(text):
            found = token.text or "end of input"
            raise self.error(f"Expected {text!r}, found {found!r}", token)
        return token

    # Grammar

    def parse(self) -> Expr:
        result = self.expression()
        if self.current.kind != "end":
            raise self.error(f"Unexpected {self.current.text!r}")
        return result

    def expression(self) -> Expr:
        result = self.term()
        while True:
            if self.accept("+"):
                result = E.add(result, self.term())
            elif self.accept("-"):
                result = E.sub(result, self.term())
            else:
                return result

    def term(self) -> Expr:
        result = self.unary()
        while True:
            if self.accept("*"):
                result = E.mul(result, self.unary())
            elif self.current.kind == "op" and self.current.text == "/":
                token = self.advance()
                den = self.unary()
                if isinstance(den, E.RatLit) and den.value == 0:
                    raise self.error("Division by zero", token)
                result = E.div(result, den)
            else:
                return result

    def unary(self) -> Expr:
        if self.accept("-"):
            return E.neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.accept("^"):
            return E.power(base, self.unary())
        return base

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "num":
            self.advance()
            return E.rat(int(token.text))
        if token.kind == "hyp":
            self.advance()
            return E.hyp(self.series(token))
        if token.kind == "name":
            self.advance()
            if self.current.kind == "op" and self.current.text == "(":
                return self.call(token)
            return self.symbol(token)
        if self.accept("("):
            inner = self.expression()
            self.expect(")")
            return inner
        found = token.text or "end of input"
        raise self.error(f"Unexpected {found!r}", token)

    def symbol(self, token: Token) -> Expr:
        if token.text in E.CONSTANTS:
            return E.CONSTANTS[token.text]
        if token.text in _UNARY or token.text in _BINARY or token.text in ("psi", "sum", "min", "max"):
            raise self.error(f"Function {token.text!r} needs arguments", token)
        return E.sym(token.text)

    def arguments(self) -> list[Expr]:
        self.expect("(")
        args = [self.expression()]
        while self.accept(","):
            args.append(self.expression())
        self.expect(")")
        return args

    def affine(self, value: Expr, token: Token) -> LinForm:
        form = E.linear_form(value)
        if form is None:
            raise self.error(f"Series parameter {value} is not affine", token)
        return form

    def series(self, head: Token) -> HypSpec:
        p, q = (int(part) for part in head.text.split("F"))
        self.expect("(")
        tops: list[LinForm] = []
        bottoms: list[LinForm] = []
        group = tops
        while True:
            token = self.current
            group.append(self.affine(self.expression(), token))
            if self.accept(","):
                continue
            if group is tops and self.accept(";"):
                group = bottoms
                continue
            self.expect(")")
            break
        if len(tops) != p or len(bottoms) != q:
            raise self.error(f"{head.text} needs {p} tops and {q} bottoms", head)
        return HypSpec(tuple(tops), tuple(bottoms))

    def call(self, token: Token) -> Expr:
        name = token.text
        if name == "sum":
            self.expect("(")
            index = self.current
            if index.kind != "name":
                raise self.error("Summation index must be a symbol", index)
            self.advance()
            self.expect(",")
            lower = self.expression()
            self.expect(",")
            if self.current.text == "inf":
                self.advance()
                upper: Expr = E.INFINITY
            else:
                upper = self.expression()
            self.expect(",")
            body = self.expression()
            self.expect(")")
            return E.summation(index.text, lower, upper, body)
        args = self.arguments()
        if name in _UNARY:
            self.arity(token, args, 1)
            return _UNARY[name](args[0])
        if name in _BINARY:
            self.arity(token, args, 2)
            return _BINARY[name](args[0], args[1])
        if name == "psi":
            if len(args) == 1:
                return E.psi(args[0])
            self.arity(token, args, 2)
            order = args[0]
            if not isinstance(order, E.RatLit) or order.value.denominator != 1 or order.value < 0:
                raise self.error("Polygamma order must be a nonnegative integer", token)
            return E.psi(args[1], int(order.value))
        if name in ("min", "max"):
            if len(args) < 2:
                raise self.error(f"{name} needs at least two arguments", token)
            return E.maximum(*args) if name == "max" else E.minimum(*args)
        if name in _ALIASES:
            self.arity(token, args, 5)
            forms = [self.affine(arg, token) for arg in args]
            return E.hyp(_ALIASES[name](*forms))
        raise UnknownFunctionError(f"Unknown function {name!r}", self.span(token))

    def arity(self, token: Token, args: list[Expr], count: int) -> None:
        if len(args) != count:
            raise self.error(f"{token.text} takes {count} argument(s), got {len(args)}", token)


def parse_expr(text: str, line: int = 1) -> Expr:
    return Parser(text, line).parse()


def parse_linform(text: str, line: int = 1) -> LinForm:
    value = parse_expr(text, line)
    form = E.linear_form(value)
    if form is None:
        raise ParseError(f"{text.strip()!r} is not an affine form", SourceSpan(line, 1, max(len(text), 1)))
    return form


def parse_spec(text: str, line: int = 1) -> HypSpec:
    value = parse_expr(text, line)
    if not isinstance(value, E.Hyp):
        raise ParseError(f"{text.strip()!r} is not a pFq", SourceSpan(line, 1, max(len(text), 1)))
    return value.spec
