"""The nine Thomae relations between non-terminating 3F2(1).

Slots are read as 3F2(a,b,c;e,f) and s is the parametric excess
e+f-a-b-c.  Each relation swaps one or two of {e,f} against the tops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, ClassVar, NamedTuple

from app.domain.enums import RuleFamily
from app.domain.expr import Expr, div, gamma, product
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm

from .base import TransformRule


class Slots(NamedTuple):
    a: LinForm
    b: LinForm
    c: LinForm
    e: LinForm
    f: LinForm

    @property
    def s(self) -> LinForm:
        return self.e + self.f - self.a - self.b - self.c

    @classmethod
    def read(cls, spec: HypSpec) -> Slots:
        a, b, c = spec.tops
        e, f = spec.bottoms
        return cls(a, b, c, e, f)


Forms = Callable[[Slots], tuple[LinForm, ...]]


@dataclass(frozen=True)
class ThomaeRule(TransformRule):
    number: int
    numer: Forms
    denom: Forms
    tops: Forms
    bottoms: Forms

    family: ClassVar[RuleFamily] = RuleFamily.THOMAE

    @property
    def id(self) -> str:  # type: ignore[override]
        return f"thom{self.number}"

    def image(self, spec: HypSpec) -> HypSpec:
        slots = Slots.read(spec)
        return HypSpec(self.tops(slots), self.bottoms(slots))

    def prefactor(self, spec: HypSpec) -> Expr:
        slots = Slots.read(spec)
        return div(
            product([gamma(x) for x in self.numer(slots)]),
            product([gamma(x) for x in self.denom(slots)]),
        )


THOMAE_RULES: tuple[ThomaeRule, ...] = (
    ThomaeRule(
        1,
        numer=lambda x: (x.s, x.f, x.e),
        denom=lambda x: (x.c, x.e + x.f - x.b - x.c, x.e + x.f - x.a - x.c),
        tops=lambda x: (x.s, x.f - x.c, x.e - x.c),
        bottoms=lambda x: (x.e + x.f - x.b - x.c, x.e + x.f - x.a - x.c),
    ),
    ThomaeRule(
        2,
        numer=lambda x: (x.s, x.f, x.e),
        denom=lambda x: (x.b, x.e + x.f - x.b - x.c, x.e + x.f - x.b - x.a),
        tops=lambda x: (x.s, x.e - x.b, x.f - x.b),
        bottoms=lambda x: (x.e + x.f - x.b - x.c, x.e + x.f - x.b - x.a),
    ),
    ThomaeRule(
        3,
        numer=lambda x: (x.s, x.e),
        denom=lambda x: (x.e - x.a, x.e + x.f - x.b - x.c),
        tops=lambda x: (x.a, x.f - x.b, x.f - x.c),
        bottoms=lambda x: (x.f, x.e + x.f - x.b - x.c),
    ),
    ThomaeRule(
        4,
        numer=lambda x: (x.s, x.f),
        denom=lambda x: (x.f - x.a, x.e + x.f - x.b - x.c),
        tops=lambda x: (x.a, x.e - x.c, x.e - x.b),
        bottoms=lambda x: (x.e, x.e + x.f - x.b - x.c),
    ),
    ThomaeRule(
        5,
        numer=lambda x: (x.s, x.f, x.e),
        denom=lambda x: (x.a, x.e + x.f - x.a - x.c, x.e + x.f - x.b - x.a),
        tops=lambda x: (x.s, x.e - x.a, x.f - x.a),
        bottoms=lambda x: (x.e + x.f - x.b - x.a, x.e + x.f - x.a - x.c),
    ),
    ThomaeRule(
        6,
        numer=lambda x: (x.s, x.e),
        denom=lambda x: (x.e - x.b, x.e + x.f - x.a - x.c),
        tops=lambda x: (x.b, x.f - x.c, x.f - x.a),
        bottoms=lambda x: (x.f, x.e + x.f - x.a - x.c),
    ),
    ThomaeRule(
        7,
        numer=lambda x: (x.s, x.f),
        denom=lambda x: (x.f - x.b, x.e + x.f - x.a - x.c),
        tops=lambda x: (x.b, x.e - x.c, x.e - x.a),
        bottoms=lambda x: (x.e, x.e + x.f - x.a - x.c),
    ),
    ThomaeRule(
        8,
        numer=lambda x: (x.s, x.e),
        denom=lambda x: (x.e - x.c, x.e + x.f - x.a - x.b),
        tops=lambda x: (x.c, x.f - x.a, x.f - x.b),
        bottoms=lambda x: (x.f, x.e + x.f - x.b - x.a),
    ),
    ThomaeRule(
        9,
        numer=lambda x: (x.s, x.f),
        denom=lambda x: (x.f - x.c, x.e + x.f - x.a - x.b),
        tops=lambda x: (x.c, x.e - x.a, x.e - x.b),
        bottoms=lambda x: (x.e, x.e + x.f - x.b - x.a),
    ),
)


def apply_thomae(k: int, spec: HypSpec) -> tuple[Expr, HypSpec]:
    if not 1 <= k <= len(THOMAE_RULES):
        msg = f"Unknown Thomae relation {k}"
        raise ValueError(msg)
    return THOMAE_RULES[k - 1].apply(spec)
