"""Transformations of terminating 3F2(-n,a,b;d,e;1).

The seven basic relations of the RJRJR family.  Slot 0 must hold the
terminating top -n; the remaining maps of the group come from permuting
{a,b} and {d,e} before applying a rule, which the orbit search does by
enumerating slot orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, ClassVar, Iterable, NamedTuple

from app.domain.enums import RuleFamily
from app.domain.expr import Expr, div, mul, neg1pow, poch, product
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm
from app.numerics.hypseries import find_negative_top, reverse_terminating

from .base import TransformRule, termination_length


class TermSlots(NamedTuple):
    n: LinForm
    a: LinForm
    b: LinForm
    d: LinForm
    e: LinForm

    @property
    def s(self) -> LinForm:
        """Sheppard's excess d+e-a-b+n."""
        return self.d + self.e - self.a - self.b + self.n

    @classmethod
    def read(cls, spec: HypSpec) -> TermSlots:
        minus_n, a, b = spec.tops
        d, e = spec.bottoms
        return cls(-minus_n, a, b, d, e)


Forms = Callable[[TermSlots], tuple[LinForm, ...]]


def _terminates_in_first_slot(spec: HypSpec, integers: Iterable[str]) -> bool:
    return bool(spec.tops) and termination_length(spec.tops[0], integers) is not None


@dataclass(frozen=True)
class RjrjrRule(TransformRule):
    name: str
    alternating: bool
    numer: Forms
    denom: Forms
    tops: Forms
    bottoms: Forms

    family: ClassVar[RuleFamily] = RuleFamily.RJRJR

    @property
    def id(self) -> str:  # type: ignore[override]
        return self.name

    def applies(self, spec: HypSpec, integers: Iterable[str] = ()) -> bool:
        return super().applies(spec) and _terminates_in_first_slot(spec, integers)

    def image(self, spec: HypSpec) -> HypSpec:
        slots = TermSlots.read(spec)
        return HypSpec((-slots.n,) + self.tops(slots), self.bottoms(slots))

    def prefactor(self, spec: HypSpec) -> Expr:
        slots = TermSlots.read(spec)
        ratio = div(
            product([poch(x, slots.n) for x in self.numer(slots)]),
            product([poch(x, slots.n) for x in self.denom(slots)]),
        )
        return mul(neg1pow(slots.n), ratio) if self.alternating else ratio


def _d_e(x: TermSlots) -> tuple[LinForm, ...]:
    return (x.d, x.e)


RJRJR_RULES: tuple[RjrjrRule, ...] = (
    RjrjrRule(
        "ra1p",
        alternating=False,
        numer=lambda x: (x.d - x.a,),
        denom=lambda x: (x.d,),
        tops=lambda x: (x.a, x.e - x.b),
        bottoms=lambda x: (x.e, 1 + x.a - x.d - x.n),
    ),
    RjrjrRule(
        "ra2p",
        alternating=True,
        numer=lambda x: (1 - x.s,),
        denom=lambda x: (x.d,),
        tops=lambda x: (x.e - x.b, x.e - x.a),
        bottoms=lambda x: (x.e, x.s - x.n),
    ),
    RjrjrRule(
        "ra3",
        alternating=False,
        numer=lambda x: (x.d - x.a, x.e - x.a),
        denom=_d_e,
        tops=lambda x: (x.a, 1 - x.s),
        bottoms=lambda x: (1 + x.a - x.d - x.n, 1 - x.e + x.a - x.n),
    ),
    RjrjrRule(
        "ra4",
        alternating=False,
        numer=lambda x: (x.d - x.a, x.b),
        denom=_d_e,
        tops=lambda x: (x.e - x.b, 1 - x.d - x.n),
        bottoms=lambda x: (1 - x.b - x.n, 1 + x.a - x.d - x.n),
    ),
    RjrjrRule(
        "ra6",
        alternating=True,
        numer=lambda x: (1 - x.s, x.b),
        denom=_d_e,
        tops=lambda x: (x.e - x.b, x.d - x.b),
        bottoms=lambda x: (1 - x.b - x.n, x.s - x.n),
    ),
    RjrjrRule(
        "ra8",
        alternating=True,
        numer=lambda x: (x.d - x.a, x.d - x.b),
        denom=_d_e,
        tops=lambda x: (1 - x.s, 1 - x.d - x.n),
        bottoms=lambda x: (1 + x.b - x.d - x.n, 1 + x.a - x.d - x.n),
    ),
    RjrjrRule(
        "raB",
        alternating=True,
        numer=lambda x: (x.a, x.b),
        denom=_d_e,
        tops=lambda x: (1 - x.d - x.n, 1 - x.e - x.n),
        bottoms=lambda x: (1 - x.b - x.n, 1 - x.a - x.n),
    ),
)


class ReverseRule(TransformRule):
    """Reversal of a terminating pFq(1) with p = q + 1, slot 0 terminating."""

    id: ClassVar[str] = "reverse"
    family: ClassVar[RuleFamily] = RuleFamily.REVERSE

    def applies(self, spec: HypSpec, integers: Iterable[str] = ()) -> bool:
        return spec.p == spec.q + 1 and _terminates_in_first_slot(spec, integers)

    def image(self, spec: HypSpec) -> HypSpec:
        return reverse_terminating(spec, -spec.tops[0])[1]

    def prefactor(self, spec: HypSpec) -> Expr:
        return reverse_terminating(spec, -spec.tops[0])[0]


REVERSE_RULES: tuple[ReverseRule, ...] = (ReverseRule(),)


def _lead_with(spec: HypSpec, n: str | LinForm) -> HypSpec:
    where = find_negative_top(spec, n)
    order = (where,) + tuple(i for i in range(spec.p) if i != where)
    return spec.reorder(order, tuple(range(spec.q)))


def apply_rjrjr(rule_id: str, spec: HypSpec, n: str | LinForm) -> tuple[Expr, HypSpec]:
    """Apply a basic terminating transformation with -n moved to the first slot."""
    normalized = rule_id.lower()
    rules: tuple[TransformRule, ...] = RJRJR_RULES + REVERSE_RULES
    for rule in rules:
        if rule.id.lower() == normalized:
            length = LinForm.symbol(n) if isinstance(n, str) else n
            return rule.apply(_lead_with(spec, n), length.symbols)
    msg = f"Unknown terminating transformation {rule_id}"
    raise ValueError(msg)
