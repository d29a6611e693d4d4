from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Union

from .enums import SymbolKind
from .errors import UnboundSymbolError

Rat = Fraction
Scalar = Union[int, Fraction]


def as_rat(value: Scalar | str) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def format_rat(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class LinForm:
    """Affine form c + sum(q_i * x_i) with exact rational coefficients.

    Terms are kept sorted by symbol name and never hold a zero coefficient,
    so dataclass equality is structural equality.
    """

    constant: Fraction = Fraction(0)
    terms: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def build(cls, constant: Scalar = 0, coefficients: Mapping[str, Scalar] | None = None) -> LinForm:
        items = sorted(
            (name, as_rat(coef)) for name, coef in (coefficients or {}).items() if coef != 0
        )
        return cls(as_rat(constant), tuple(items))

    @classmethod
    def const(cls, value: Scalar) -> LinForm:
        return cls(as_rat(value), ())

    @classmethod
    def symbol(cls, name: str, coefficient: Scalar = 1) -> LinForm:
        return cls.build(0, {name: coefficient})

    # Introspection

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def coefficient(self, name: str) -> Fraction:
        for symbol, coef in self.terms:
            if symbol == name:
                return coef
        return Fraction(0)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)

    # Arithmetic

    def __add__(self, other: LinForm | Scalar) -> LinForm:
        if not isinstance(other, LinForm):
            return LinForm(self.constant + as_rat(other), self.terms)
        merged = self.as_dict()
        for name, coef in other.terms:
            merged[name] = merged.get(name, Fraction(0)) + coef
        return LinForm.build(self.constant + other.constant, merged)

    __radd__ = __add__

    def __neg__(self) -> LinForm:
        return LinForm(-self.constant, tuple((name, -coef) for name, coef in self.terms))

    def __sub__(self, other: LinForm | Scalar) -> LinForm:
        return self + (-other)

    def __rsub__(self, other: LinForm | Scalar) -> LinForm:
        return (-self) + other

    def __mul__(self, factor: Scalar) -> LinForm:
        factor = as_rat(factor)
        if factor == 0:
            return LinForm()
        return LinForm(self.constant * factor, tuple((name, coef * factor) for name, coef in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, divisor: Scalar) -> LinForm:
        return self * (1 / as_rat(divisor))

    # Evaluation and substitution

    def evaluate(self, binding: Mapping[str, Fraction]) -> Fraction:
        total = self.constant
        for name, coef in self.terms:
            if name not in binding:
                raise UnboundSymbolError(name)
            total += coef * binding[name]
        return total

    def substitute(self, mapping: Mapping[str, LinForm]) -> LinForm:
        result = LinForm.const(self.constant)
        for name, coef in self.terms:
            replacement = mapping.get(name)
            result = result + (replacement * coef if replacement is not None else LinForm.symbol(name, coef))
        return result

    def content(self) -> tuple[Fraction, LinForm]:
        """Split into (scale, primitive) with integer coprime coefficients.

        The primitive part has a positive leading symbol coefficient (or a
        positive constant when the form has no symbols).
        """
        values = [coef for _, coef in self.terms] + ([self.constant] if self.constant else [])
        if not values:
            return Fraction(0), LinForm()
        denominator = lcm(*(v.denominator for v in values))
        numerator = 0
        for v in values:
            numerator = gcd(numerator, (v * denominator).numerator)
        scale = Fraction(numerator, denominator)
        lead = self.terms[0][1] if self.terms else self.constant
        if lead < 0:
            scale = -scale
        return scale, self / scale

    def is_integer_valued(self, integer_symbols: Iterable[str]) -> bool:
        allowed = set(integer_symbols)
        if self.constant.denominator != 1:
            return False
        return all(name in allowed and coef.denominator == 1 for name, coef in self.terms)

    # Printing

    def __str__(self) -> str:
        pieces: list[str] = []
        for name, coef in self.terms:
            pieces.append(_format_term(name, coef))
        if self.constant or not pieces:
            pieces.append(format_rat(self.constant))
        text = pieces[0]
        for piece in pieces[1:]:
            text += piece if piece.startswith("-") else f"+{piece}"
        return text

    @property
    def sort_key(self) -> str:
        return str(self)


def _format_term(name: str, coef: Fraction) -> str:
    sign = "-" if coef < 0 else ""
    magnitude = abs(coef)
    num, den = magnitude.numerator, magnitude.denominator
    head = name if num == 1 else f"{num}*{name}"
    tail = "" if den == 1 else f"/{den}"
    return f"{sign}{head}{tail}"


def linform_eval(form: LinForm, binding: Mapping[str, Fraction]) -> Fraction:
    """Exact affine evaluation of form at binding."""
    return form.evaluate(binding)


@dataclass(frozen=True)
class SymbolDecl:
    """Declared symbol: kind plus optional sampling bounds or a definition."""

    name: str
    kind: SymbolKind = SymbolKind.REAL
    lower: Fraction | None = None
    upper: Fraction | None = None
    definition: str | None = None  # source text of a derived symbol

    @property
    def is_integer(self) -> bool:
        return self.kind.is_integer

    @property
    def is_derived(self) -> bool:
        return self.definition is not None

    def admits(self, value: Fraction) -> bool:
        if self.kind.is_integer:
            if value.denominator != 1:
                return False
            minimum = self.kind.minimum
            if minimum is not None and value < minimum:
                return False
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True

    def __str__(self) -> str:
        if self.definition is not None:
            return f"{self.name}:={self.definition}"
        bounds = ""
        if self.lower is not None or self.upper is not None:
            low = "" if self.lower is None else format_rat(self.lower)
            high = "" if self.upper is None else format_rat(self.upper)
            bounds = f"[{low},{high}]"
        return f"{self.name}:{self.kind.value}{bounds}"
