from __future__ import annotations

from abc import ABC, abstractmethod
from typing import ClassVar, Iterable

from app.domain.enums import RuleFamily
from app.domain.errors import RuleNotApplicableError
from app.domain.expr import Expr
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm


class TransformRule(ABC):
    """Two-term map pFq(1) = prefactor * pFq'(1) at the symbolic level.

    Rules read parameters by slot, so the caller chooses which top plays
    which role by reordering the spec first.
    """

    id: ClassVar[str]
    family: ClassVar[RuleFamily]

    def applies(self, spec: HypSpec, integers: Iterable[str] = ()) -> bool:
        return spec.p == 3 and spec.q == 2

    @abstractmethod
    def image(self, spec: HypSpec) -> HypSpec:
        """Return the transformed series."""

    @abstractmethod
    def prefactor(self, spec: HypSpec) -> Expr:
        """Return the coefficient multiplying the transformed series."""

    def apply(self, spec: HypSpec, integers: Iterable[str] = ()) -> tuple[Expr, HypSpec]:
        if not self.applies(spec, integers):
            raise RuleNotApplicableError(f"{self.id} does not apply to {spec.ordered_str()}")
        return self.prefactor(spec), self.image(spec)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.id}>"


def termination_length(top: LinForm, integers: Iterable[str]) -> LinForm | None:
    """N when top = -N for a nonnegative integer N, else None."""
    length = -top
    if length.is_constant:
        value = length.constant
        return length if value.denominator == 1 and value >= 0 else None
    if not length.is_integer_valued(integers):
        return None
    if any(coef < 0 for _, coef in length.terms):
        return None
    return length


def guess_integer_symbols(spec: HypSpec) -> frozenset[str]:
    """Symbols entering some top as c - x with integer c <= 1.

    Covers the usual -n and 1-n termination slots when the caller has no
    declarations to offer.
    """
    names: set[str] = set()
    for top in spec.tops:
        if len(top.terms) == 1 and top.terms[0][1] == -1:
            if top.constant.denominator == 1 and top.constant <= 1:
                names.add(top.terms[0][0])
    return frozenset(names)
