from __future__ import annotations

import logging
from fractions import Fraction
from math import factorial
from typing import Mapping

import mpmath

from app.config import Settings, settings
from app.domain import expr as E
from app.domain.errors import PatternMismatchError, UnknownEntryError
from app.domain.expr import Expr
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm
from app.domain.models import ContigRelation
from app.domain.statuses import EntryStatus
from app.numerics.numeval import EvalContext, eval_exact, eval_expr
from app.repositories.catalog_store import InMemoryCatalogStore


class ContiguityService:
    """Contiguous relations stored as records, and the rewrites built on them."""

    def __init__(self, store: InMemoryCatalogStore, cfg: Settings = settings):
        self.store = store
        self.settings = cfg
        self.logger = logging.getLogger(__name__)
        self._relations: dict[str, ContigRelation] | None = None

    def relations(self) -> list[ContigRelation]:
        if self._relations is None:
            entries = self.store.list_by(status=EntryStatus.RELATION)
            self._relations = {entry.id: ContigRelation.from_entry(entry) for entry in entries}
            self.logger.debug("Relations loaded", extra={"records": len(self._relations)})
        return list(self._relations.values())

    def get_relation(self, relation_id: str) -> ContigRelation:
        self.relations()
        assert self._relations is not None
        try:
            return self._relations[relation_id]
        except KeyError:
            raise UnknownEntryError(relation_id) from None

    # Checking

    @staticmethod
    def exact_residual(rel: ContigRelation, binding: Mapping[str, Fraction]) -> Fraction | None:
        """Signed sum in exact arithmetic, or None when some term is not rational."""
        total = Fraction(0)
        for coefficient, spec in rel.terms:
            value = eval_exact(E.mul(coefficient, E.hyp(spec)), binding)
            if value is None:
                return None
            total += value
        inhomogeneous = eval_exact(rel.inhomogeneous, binding)
        if inhomogeneous is None:
            return None
        return total + inhomogeneous

    def check_relation(
        self,
        rel: ContigRelation,
        binding: Mapping[str, Fraction],
        precision: int | None = None,
        *,
        pole_margin: Fraction | None = None,
    ) -> mpmath.mpf:
        """|sum of coefficient * value + inhomogeneous| relative to the largest term."""
        precision = precision or self.settings.precision
        ctx = EvalContext(binding, precision, pole_margin=pole_margin)
        with mpmath.workdps(precision):
            values = [eval_expr(E.mul(coefficient, E.hyp(spec)), ctx) for coefficient, spec in rel.terms]
            values.append(eval_expr(rel.inhomogeneous, ctx))
            scale = max([mpmath.mpf(1)] + [abs(v) for v in values])
            residual = abs(mpmath.fsum(values)) / scale
        self.logger.debug("Relation checked", extra={"entry_id": rel.id, "residual": residual})
        return residual

    # Rewrites

    @staticmethod
    def _shift_pair(spec: HypSpec, m: LinForm | None) -> tuple[int, int, LinForm]:
        for i, top in enumerate(spec.tops):
            for j, bottom in enumerate(spec.bottoms):
                gap = bottom - top
                if m is not None and gap == m:
                    return i, j, gap
                if m is None and gap.is_constant and gap.constant.denominator == 1 and gap.constant >= 1:
                    return i, j, gap
        raise PatternMismatchError(f"{spec} has no top/bottom pair a, a+m")

    @staticmethod
    def unit_ladder(a: LinForm, b: LinForm, c: LinForm, e: LinForm, steps: int) -> Expr:
        """3F2(a+steps,b,c;a+steps+1,e) written through 3F2(a,b,c;a+1,e) and Gamma terms."""
        base = HypSpec((a, b, c), (a + 1, e))
        gammas = E.div(
            E.mul(E.gamma(E.lin(e)), E.gamma(E.lin(e - b - c + 1))),
            E.mul(E.gamma(E.lin(e - b)), E.gamma(E.lin(e - c))),
        )
        current: Expr = E.hyp(base)
        for j in range(steps):
            x = a + j
            den = E.mul(E.lin(x - b + 1), E.lin(x - c + 1))
            ratio = E.div(E.mul(E.lin(x + 1 - e), E.lin(x + 1)), den)
            inhomogeneous = E.div(E.mul(gammas, E.lin(x + 1)), den)
            current = E.add(E.mul(ratio, current), inhomogeneous)
        return current

    def chen_shift(self, spec: HypSpec, m: int | str | LinForm | None = None, reduce: bool = True) -> Expr:
        """Rewrite 3F2(a,b,c;a+m,e) as a combination of unit-shift series.

        With a concrete m each unit-shift term is walked down the ladder to
        3F2(a,b,c;a+1,e); a symbolic m gives the finite sum unreduced.
        """
        if spec.p != 3 or spec.q != 2:
            raise PatternMismatchError(f"{spec} is not a 3F2")
        wanted: LinForm | None
        if m is None or isinstance(m, LinForm):
            wanted = m
        else:
            wanted = LinForm.symbol(m) if isinstance(m, str) else LinForm.const(m)
        i, j, gap = self._shift_pair(spec, wanted)
        a = spec.tops[i]
        b, c = (t for k, t in enumerate(spec.tops) if k != i)
        e = spec.bottoms[1 - j]
        self.logger.debug("Shift rewrite", extra={"spec": spec, "rule": f"m={gap}"})

        if not gap.is_constant:
            index = "k" if "k" not in spec.symbols and "k" not in gap.symbols else "k_"
            k = LinForm.symbol(index)
            body = E.div(
                E.mul(E.neg1pow(k), E.hyp(HypSpec((a + k, b, c), (a + k + 1, e)))),
                E.mul(E.gamma(E.lin(k + 1)), E.gamma(E.lin(gap - k)), E.lin(a + k)),
            )
            return E.mul(E.div(E.gamma(E.lin(a + gap)), E.gamma(E.lin(a))), E.summation(index, 0, E.lin(gap - 1), body))

        shift = int(gap.constant)
        if shift < 1:
            raise PatternMismatchError(f"Shift {shift} must be at least 1")
        if shift == 1:
            return E.hyp(spec)
        terms: list[Expr] = []
        for k in range(shift):
            weight = Fraction((-1) ** k, factorial(k) * factorial(shift - 1 - k))
            atom = (
                self.unit_ladder(a, b, c, e, k) if reduce else E.hyp(HypSpec((a + k, b, c), (a + k + 1, e)))
            )
            terms.append(E.div(E.mul(weight, atom), E.lin(a + k)))
        return E.mul(E.poch(E.lin(a), shift), E.add(*terms))

    @staticmethod
    def split_shifted_pair(spec: HypSpec) -> Expr:
        """Split a top/bottom pair (x+1, x) into two series without the pair.

        pFq(x+1, a_i; x, b_j) = F(a_i; b_j) + prod(a_i)/(x*prod(b_j)) * F(a_i+1; b_j+1)
        """
        for i, top in enumerate(spec.tops):
            for j, bottom in enumerate(spec.bottoms):
                if top - bottom != LinForm.const(1):
                    continue
                tops = tuple(t for k, t in enumerate(spec.tops) if k != i)
                bottoms = tuple(b for k, b in enumerate(spec.bottoms) if k != j)
                plain = HypSpec(tops, bottoms)
                raised = HypSpec(tuple(t + 1 for t in tops), tuple(b + 1 for b in bottoms))
                weight = E.div(
                    E.product([E.lin(t) for t in tops]),
                    E.mul(E.lin(bottom), E.product([E.lin(b) for b in bottoms])),
                )
                return E.add(E.hyp(plain), E.mul(weight, E.hyp(raised)))
        raise PatternMismatchError(f"{spec} has no top/bottom pair x+1, x")
