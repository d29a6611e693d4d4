from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator, Mapping, Sequence

from .linform import LinForm, Scalar


def to_form(value: LinForm | Scalar | str) -> LinForm:
    if isinstance(value, LinForm):
        return value
    if isinstance(value, str):
        return LinForm.symbol(value)
    return LinForm.const(value)


@dataclass(frozen=True, eq=False)
class HypSpec:
    """pFq at unit argument.

    Parameter order is kept because transformation rules read slots
    positionally, but equality and hashing treat tops and bottoms as
    multisets.
    """

    tops: tuple[LinForm, ...]
    bottoms: tuple[LinForm, ...]

    @classmethod
    def of(
        cls,
        tops: Iterable[LinForm | Scalar | str],
        bottoms: Iterable[LinForm | Scalar | str],
    ) -> HypSpec:
        return cls(tuple(to_form(t) for t in tops), tuple(to_form(b) for b in bottoms))

    @property
    def p(self) -> int:
        return len(self.tops)

    @property
    def q(self) -> int:
        return len(self.bottoms)

    @property
    def excess(self) -> LinForm:
        """Parametric excess: sum of bottoms minus sum of tops."""
        total = LinForm()
        for form in self.bottoms:
            total = total + form
        for form in self.tops:
            total = total - form
        return total

    @property
    def symbols(self) -> frozenset[str]:
        names: set[str] = set()
        for form in self.tops + self.bottoms:
            names |= form.symbols
        return frozenset(names)

    def canonical(self) -> HypSpec:
        return HypSpec(
            tuple(sorted(self.tops, key=str)),
            tuple(sorted(self.bottoms, key=str)),
        )

    @property
    def key(self) -> str:
        return str(self)

    def substitute(self, mapping: Mapping[str, LinForm]) -> HypSpec:
        return HypSpec(
            tuple(form.substitute(mapping) for form in self.tops),
            tuple(form.substitute(mapping) for form in self.bottoms),
        )

    def evaluate(self, binding: Mapping[str, Fraction]) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        return (
            tuple(form.evaluate(binding) for form in self.tops),
            tuple(form.evaluate(binding) for form in self.bottoms),
        )

    def reorder(self, top_order: Sequence[int], bottom_order: Sequence[int]) -> HypSpec:
        return HypSpec(
            tuple(self.tops[i] for i in top_order),
            tuple(self.bottoms[i] for i in bottom_order),
        )

    def slot_orders(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Every distinct slot assignment, skipping orders that repeat parameters."""
        seen: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
        for top_order in permutations(range(self.p)):
            for bottom_order in permutations(range(self.q)):
                signature = (
                    tuple(str(self.tops[i]) for i in top_order),
                    tuple(str(self.bottoms[i]) for i in bottom_order),
                )
                if signature in seen:
                    continue
                seen.add(signature)
                yield top_order, bottom_order

    def _multiset(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (
            tuple(sorted(str(t) for t in self.tops)),
            tuple(sorted(str(b) for b in self.bottoms)),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HypSpec):
            return NotImplemented
        return self._multiset() == other._multiset()

    def __hash__(self) -> int:
        return hash(self._multiset())

    def __str__(self) -> str:
        tops, bottoms = self._multiset()
        return f"{self.p}F{self.q}({','.join(tops)};{','.join(bottoms)})"

    def ordered_str(self) -> str:
        """Print in slot order (used for chain provenance)."""
        tops = ",".join(str(t) for t in self.tops)
        bottoms = ",".join(str(b) for b in self.bottoms)
        return f"{self.p}F{self.q}({tops};{bottoms})"
