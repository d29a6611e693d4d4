"""Closed-form expression tree.

Nodes are immutable and always built through the smart constructors at the
bottom of this module (``add``, ``mul``, ``div``, ...). The constructors keep
every tree in one normal form:

* affine sub-expressions collapse into a single ``Sym``/``RatLit`` node;
* sums and products are flattened and their operands sorted by printed text;
* a product carries its rational coefficient separately and its linear
  factors are primitive;
* at most one ``Div`` sits on top of a product, with a coefficient-free
  denominator.

Printing a normal-form tree and parsing it back rebuilds the same tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterator, Mapping, Union

from .errors import EvaluationError, NonIntegerSignError
from .hypspec import HypSpec
from .linform import LinForm, Scalar, as_rat


class Fn(str, Enum):
    """Unary functions with a dedicated node."""

    GAMMA = "Gamma"
    SIN = "sin"
    COS = "cos"
    LN = "ln"
    SQRT = "sqrt"
    ARCTANH = "arctanh"


class Expr:
    """Base class of all expression nodes."""

    @cached_property
    def key(self) -> str:
        return str(self)

    # Operator sugar; everything routes through the smart constructors.
    def __add__(self, other: ExprLike) -> Expr:
        return add(self, other)

    def __radd__(self, other: ExprLike) -> Expr:
        return add(other, self)

    def __sub__(self, other: ExprLike) -> Expr:
        return add(self, neg(other))

    def __rsub__(self, other: ExprLike) -> Expr:
        return add(other, neg(self))

    def __mul__(self, other: ExprLike) -> Expr:
        return mul(self, other)

    def __rmul__(self, other: ExprLike) -> Expr:
        return mul(other, self)

    def __truediv__(self, other: ExprLike) -> Expr:
        return div(self, other)

    def __rtruediv__(self, other: ExprLike) -> Expr:
        return div(other, self)

    def __neg__(self) -> Expr:
        return neg(self)

    def __pow__(self, other: ExprLike) -> Expr:
        return power(self, other)


ExprLike = Union[Expr, LinForm, int, Fraction]


@dataclass(frozen=True, eq=True)
class RatLit(Expr):
    value: Fraction

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    """Named constant: pi, euler (Euler-Mascheroni) or G (Catalan)."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=True)
class Sym(Expr):
    """A non-constant affine form."""

    form: LinForm

    def __str__(self) -> str:
        return str(self.form)

    @property
    def bare(self) -> bool:
        terms = self.form.terms
        return len(terms) == 1 and terms[0][1] == 1 and self.form.constant == 0


@dataclass(frozen=True, eq=True)
class Neg1Pow(Expr):
    form: LinForm

    def __str__(self) -> str:
        inner = str(self.form)
        if not _bare_form(self.form):
            inner = f"({inner})"
        return f"(-1)^{inner}"


@dataclass(frozen=True, eq=True)
class Apply(Expr):
    func: Fn
    arg: Expr

    def __str__(self) -> str:
        return f"{self.func.value}({self.arg})"


@dataclass(frozen=True, eq=True)
class Polygamma(Expr):
    order: int
    arg: Expr

    def __str__(self) -> str:
        if self.order == 0:
            return f"psi({self.arg})"
        return f"psi({self.order},{self.arg})"


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Expr

    def __str__(self) -> str:
        base = str(self.base) if _atomic(self.base) else f"({self.base})"
        exponent = str(self.exponent) if _atomic(self.exponent) else f"({self.exponent})"
        return f"{base}^{exponent}"


@dataclass(frozen=True, eq=True)
class Sum(Expr):
    """Sum over an integer index; empty when lower > upper.

    An ``INFINITY`` upper limit makes it a convergent series.
    """

    index: str
    lower: Expr
    upper: Expr
    body: Expr

    def __str__(self) -> str:
        return f"sum({self.index},{self.lower},{self.upper},{self.body})"

    @property
    def infinite(self) -> bool:
        return self.upper == INFINITY


@dataclass(frozen=True, eq=True)
class Binom(Expr):
    top: Expr
    bottom: Expr

    def __str__(self) -> str:
        return f"binom({self.top},{self.bottom})"


@dataclass(frozen=True, eq=True)
class Pochhammer(Expr):
    base: Expr
    length: Expr

    def __str__(self) -> str:
        return f"poch({self.base},{self.length})"


@dataclass(frozen=True, eq=True)
class MinMax(Expr):
    largest: bool
    args: tuple[Expr, ...]

    def __str__(self) -> str:
        name = "max" if self.largest else "min"
        return f"{name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True, eq=True)
class Hyp(Expr):
    spec: HypSpec

    def __str__(self) -> str:
        return str(self.spec)


@dataclass(frozen=True, eq=True)
class Add(Expr):
    terms: tuple[Expr, ...]

    def __str__(self) -> str:
        text = ""
        for i, term in enumerate(self.terms):
            piece = str(term)
            if i and not piece.startswith("-"):
                text += "+"
            text += piece
        return text


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    coeff: Fraction
    factors: tuple[Expr, ...]

    def __str__(self) -> str:
        body = "*".join(_factor_str(f) for f in self.factors)
        if self.coeff == 1:
            return body
        if self.coeff == -1:
            return f"-{body}"
        return f"{self.coeff}*{body}"


@dataclass(frozen=True, eq=True)
class Div(Expr):
    num: Expr
    den: Expr

    def __str__(self) -> str:
        num = str(self.num)
        if isinstance(self.num, Add) or (isinstance(self.num, Sym) and not _monomial(self.num.form)):
            num = f"({num})"
        den = str(self.den)
        if isinstance(self.den, (Add, Mul)) or (isinstance(self.den, Sym) and not self.den.bare):
            den = f"({den})"
        return f"{num}/{den}"


PI = Const("pi")
EULER = Const("euler")
CATALAN = Const("G")
CONSTANTS = {c.name: c for c in (PI, EULER, CATALAN)}
# Upper limit of an infinite sum; never a value on its own.
INFINITY = Const("inf")
ZERO = RatLit(Fraction(0))
ONE = RatLit(Fraction(1))


# Printing helpers


def _bare_form(form: LinForm) -> bool:
    return len(form.terms) == 1 and form.terms[0][1] == 1 and form.constant == 0


def _monomial(form: LinForm) -> bool:
    """A single scaled symbol; prints as a product, so it may lead a quotient unbracketed."""
    return len(form.terms) == 1 and form.constant == 0


def _atomic(e: Expr) -> bool:
    if isinstance(e, RatLit):
        return e.value >= 0 and e.value.denominator == 1
    if isinstance(e, Sym):
        return e.bare
    return isinstance(e, (Const, Apply, Polygamma, Sum, Binom, Pochhammer, MinMax, Hyp))


def _factor_str(e: Expr) -> str:
    if isinstance(e, Add) or (isinstance(e, Sym) and not e.bare):
        return f"({e})"
    return str(e)


# Smart constructors


def to_expr(value: ExprLike) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, LinForm):
        return lin(value)
    if isinstance(value, (int, Fraction)):
        return RatLit(as_rat(value))
    raise TypeError(f"Cannot convert {value!r} to an expression")


def rat(value: Scalar | str) -> RatLit:
    return RatLit(as_rat(value))


def lin(form: LinForm) -> Expr:
    return RatLit(form.constant) if form.is_constant else Sym(form)


def sym(name: str) -> Expr:
    return Sym(LinForm.symbol(name))


def linear_form(e: Expr) -> LinForm | None:
    if isinstance(e, RatLit):
        return LinForm.const(e.value)
    if isinstance(e, Sym):
        return e.form
    return None


def add(*terms: ExprLike) -> Expr:
    flat: list[Expr] = []
    for term in terms:
        t = to_expr(term)
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    linear = LinForm()
    others: list[Expr] = []
    for t in flat:
        form = linear_form(t)
        if form is not None:
            linear = linear + form
        else:
            others.append(t)
    if not others:
        return lin(linear)
    ordered = sorted(others, key=lambda x: x.key)
    if linear != LinForm():
        ordered.append(lin(linear))
    if len(ordered) == 1:
        return ordered[0]
    return Add(tuple(ordered))


def neg(value: ExprLike) -> Expr:
    return mul(-1, value)


def sub(a: ExprLike, b: ExprLike) -> Expr:
    return add(a, neg(b))


def _mul_core(coeff: Fraction, factors: list[Expr]) -> Expr:
    if coeff == 0:
        return ZERO
    if not factors:
        return RatLit(coeff)
    if len(factors) == 1:
        only = factors[0]
        if isinstance(only, Sym):
            return lin(only.form * coeff)
        if coeff == 1:
            return only
    return Mul(coeff, tuple(sorted(factors, key=lambda x: x.key)))


def mul(*args: ExprLike) -> Expr:
    coeff = Fraction(1)
    factors: list[Expr] = []
    dens: list[Expr] = []
    stack = [to_expr(a) for a in args]
    while stack:
        f = stack.pop()
        if isinstance(f, RatLit):
            coeff *= f.value
        elif isinstance(f, Mul):
            coeff *= f.coeff
            stack.extend(f.factors)
        elif isinstance(f, Div):
            stack.append(f.num)
            dens.append(f.den)
        elif isinstance(f, Sym):
            scale, primitive = f.form.content()
            coeff *= scale
            factors.append(Sym(primitive))
        else:
            factors.append(f)
    if coeff == 0:
        return ZERO
    core = _mul_core(coeff, factors)
    if dens:
        return div(core, mul(*dens))
    return core


def div(num: ExprLike, den: ExprLike) -> Expr:
    n, d = to_expr(num), to_expr(den)
    if isinstance(d, RatLit):
        if d.value == 0:
            raise EvaluationError("division by zero")
        return mul(Fraction(1) / d.value, n)
    if isinstance(n, Div):
        return div(n.num, mul(n.den, d))
    if isinstance(d, Div):
        return div(mul(n, d.den), d.num)
    if isinstance(d, Mul) and d.coeff != 1:
        n = mul(n, Fraction(1) / d.coeff)
        d = _mul_core(Fraction(1), list(d.factors))
    elif isinstance(d, Sym):
        scale, primitive = d.form.content()
        if scale != 1:
            n = mul(n, Fraction(1) / scale)
            d = Sym(primitive)
    if isinstance(n, RatLit) and n.value == 0:
        return ZERO
    if isinstance(n, Div):
        return div(n, d)
    return Div(n, d)


def neg1pow(form: LinForm) -> Expr:
    if form.is_constant:
        if form.constant.denominator != 1:
            raise NonIntegerSignError(form.constant)
        return ONE if form.constant.numerator % 2 == 0 else RatLit(Fraction(-1))
    constant = form.constant
    if constant.denominator == 1:
        constant = constant % 2
    return Neg1Pow(LinForm(constant, form.terms))


def power(base: ExprLike, exponent: ExprLike) -> Expr:
    b, e = to_expr(base), to_expr(exponent)
    if isinstance(e, RatLit):
        if e.value == 0:
            return ONE
        if e.value == 1:
            return b
        if isinstance(b, RatLit) and e.value.denominator == 1:
            if b.value == 0 and e.value < 0:
                raise EvaluationError("zero to a negative power")
            return RatLit(b.value ** int(e.value))
    if isinstance(b, RatLit) and b.value == -1:
        form = linear_form(e)
        if form is not None:
            return neg1pow(form)
    return Pow(b, e)


def gamma(arg: ExprLike) -> Expr:
    return Apply(Fn.GAMMA, to_expr(arg))


def psi(arg: ExprLike, order: int = 0) -> Expr:
    return Polygamma(order, to_expr(arg))


def sin(arg: ExprLike) -> Expr:
    return Apply(Fn.SIN, to_expr(arg))


def cos(arg: ExprLike) -> Expr:
    return Apply(Fn.COS, to_expr(arg))


def ln(arg: ExprLike) -> Expr:
    return Apply(Fn.LN, to_expr(arg))


def sqrt(arg: ExprLike) -> Expr:
    return Apply(Fn.SQRT, to_expr(arg))


def arctanh(arg: ExprLike) -> Expr:
    return Apply(Fn.ARCTANH, to_expr(arg))


def binom(top: ExprLike, bottom: ExprLike) -> Expr:
    return Binom(to_expr(top), to_expr(bottom))


def poch(base: ExprLike, length: ExprLike) -> Expr:
    return Pochhammer(to_expr(base), to_expr(length))


def minimum(*args: ExprLike) -> Expr:
    items = [to_expr(a) for a in args]
    if all(isinstance(a, RatLit) for a in items):
        return min(items, key=lambda a: a.value)  # type: ignore[attr-defined]
    return MinMax(False, tuple(items))


def maximum(*args: ExprLike) -> Expr:
    items = [to_expr(a) for a in args]
    if all(isinstance(a, RatLit) for a in items):
        return max(items, key=lambda a: a.value)  # type: ignore[attr-defined]
    return MinMax(True, tuple(items))


def summation(index: str, lower: ExprLike, upper: ExprLike, body: ExprLike) -> Expr:
    return Sum(index, to_expr(lower), to_expr(upper), to_expr(body))


def hyp(spec: HypSpec) -> Expr:
    return Hyp(spec)


def product(items: list[ExprLike]) -> Expr:
    return mul(*items) if items else ONE


# Traversal


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Apply, Polygamma)):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    if isinstance(e, Sum):
        return (e.lower, e.upper, e.body)
    if isinstance(e, Binom):
        return (e.top, e.bottom)
    if isinstance(e, Pochhammer):
        return (e.base, e.length)
    if isinstance(e, MinMax):
        return e.args
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Div):
        return (e.num, e.den)
    return ()


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for child in children(e):
        yield from walk(child)


def contains(e: Expr, predicate: Callable[[Expr], bool]) -> bool:
    return any(predicate(node) for node in walk(e))


def hyp_nodes(e: Expr) -> list[HypSpec]:
    return [node.spec for node in walk(e) if isinstance(node, Hyp)]


def free_symbols(e: Expr) -> frozenset[str]:
    if isinstance(e, (Sym, Neg1Pow)):
        return e.form.symbols
    if isinstance(e, Hyp):
        return e.spec.symbols
    if isinstance(e, Sum):
        inner = free_symbols(e.body) - {e.index}
        return inner | free_symbols(e.lower) | free_symbols(e.upper)
    names: frozenset[str] = frozenset()
    for child in children(e):
        names |= free_symbols(child)
    return names


def _fresh(index: str, taken: set[str]) -> str:
    n = 1
    while f"{index}{n}" in taken:
        n += 1
    return f"{index}{n}"


def substitute(e: Expr, mapping: Mapping[str, LinForm]) -> Expr:
    """Capture-avoiding substitution of symbols by affine forms."""
    if not mapping:
        return e
    if isinstance(e, (RatLit, Const)):
        return e
    if isinstance(e, Sym):
        return lin(e.form.substitute(mapping))
    if isinstance(e, Neg1Pow):
        return neg1pow(e.form.substitute(mapping))
    if isinstance(e, Hyp):
        return Hyp(e.spec.substitute(mapping))
    if isinstance(e, Apply):
        return Apply(e.func, substitute(e.arg, mapping))
    if isinstance(e, Polygamma):
        return Polygamma(e.order, substitute(e.arg, mapping))
    if isinstance(e, Pow):
        return power(substitute(e.base, mapping), substitute(e.exponent, mapping))
    if isinstance(e, Binom):
        return Binom(substitute(e.top, mapping), substitute(e.bottom, mapping))
    if isinstance(e, Pochhammer):
        return Pochhammer(substitute(e.base, mapping), substitute(e.length, mapping))
    if isinstance(e, MinMax):
        args = [substitute(a, mapping) for a in e.args]
        return maximum(*args) if e.largest else minimum(*args)
    if isinstance(e, Add):
        return add(*(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return mul(e.coeff, *(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Div):
        return div(substitute(e.num, mapping), substitute(e.den, mapping))
    if isinstance(e, Sum):
        lower = substitute(e.lower, mapping)
        upper = substitute(e.upper, mapping)
        inner = {name: form for name, form in mapping.items() if name != e.index}
        index, body = e.index, e.body
        captured = any(index in form.symbols for name, form in inner.items() if name in free_symbols(body))
        if captured:
            taken = set(free_symbols(body)) | {s for form in inner.values() for s in form.symbols} | set(inner)
            fresh = _fresh(index, taken)
            body = substitute(body, {index: LinForm.symbol(fresh)})
            index = fresh
        return Sum(index, lower, upper, substitute(body, inner))
    raise TypeError(f"Unknown node {type(e).__name__}")


def expr_substitute(e: Expr, binding: Mapping[str, LinForm]) -> Expr:
    return substitute(e, binding)


def expr_equal_structural(x: Expr, y: Expr) -> bool:
    """Equality of normal-form trees (linear forms are already normalized)."""
    return x == y
