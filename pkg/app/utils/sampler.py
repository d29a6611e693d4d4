"""Deterministic sampling of admissible rational bindings."""

from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from app.config import Settings, settings
from app.domain.enums import Comparison
from app.domain.errors import HypError, NoAdmissibleBindingError
from app.domain.linform import LinForm, SymbolDecl
from app.domain.models import Constraint
from app.numerics.numeval import eval_exact
from app.textio.parser import parse_expr

logger = logging.getLogger(__name__)

Binding = dict[str, Fraction]

# Small odd denominators keep sampled reals off half-integers and poles.
DENOMINATORS = (3, 5, 7, 11, 13)


class BindingSampler:
    """Draws bindings that respect declarations and constraints.

    Reals come from a window with small denominators and are never
    integers; integers are uniform between the kind's minimum and the
    declared (or configured) upper bound. An equality constraint is met by
    solving it for one of its real symbols after the others are drawn.
    """

    def __init__(self, seed: int | None = None, cfg: Settings = settings):
        self.settings = cfg
        self.random = random.Random(cfg.seed if seed is None else seed)

    def draw_value(self, decl: SymbolDecl) -> Fraction:
        if decl.is_integer:
            low = decl.kind.minimum or 0
            if decl.lower is not None:
                low = max(low, int(decl.lower))
            high = int(decl.upper) if decl.upper is not None else max(low, self.settings.int_upper)
            return Fraction(self.random.randint(low, high))
        low, high = self.settings.real_window
        if decl.lower is not None:
            low = decl.lower
        if decl.upper is not None:
            high = decl.upper
        for _ in range(50):
            q = self.random.choice(DENOMINATORS)
            first = int(low * q) + 1
            p = self.random.randint(first, max(first, int(high * q) - 1))
            if p % q:
                return Fraction(p, q)
        return (low + high) / 2

    @staticmethod
    def _solved_symbols(decls: Sequence[SymbolDecl], constraints: Sequence[Constraint]) -> dict[str, Constraint]:
        """Pick one real symbol per equality to be solved for instead of drawn."""
        reals = {d.name for d in decls if not d.is_integer and not d.is_derived and d.lower is None and d.upper is None}
        chosen: dict[str, Constraint] = {}
        for constraint in constraints:
            if constraint.op is not Comparison.EQ:
                continue
            candidates = sorted(
                name for name in constraint.difference.symbols if name in reals and name not in chosen
            )
            if candidates:
                chosen[candidates[-1]] = constraint
        return chosen

    @staticmethod
    def _solve(solved: Mapping[str, Constraint], binding: Binding) -> bool:
        pending = dict(solved)
        while pending:
            progress = False
            for name, constraint in list(pending.items()):
                diff = constraint.difference
                others = diff.symbols - {name}
                if any(other not in binding for other in others):
                    continue
                rest = diff - LinForm.symbol(name, diff.coefficient(name))
                binding[name] = -rest.evaluate(binding) / diff.coefficient(name)
                del pending[name]
                progress = True
            if not progress:
                return False
        return True

    @staticmethod
    def _derive(decls: Sequence[SymbolDecl], binding: Binding) -> bool:
        pending = [d for d in decls if d.is_derived]
        while pending:
            remaining = []
            for decl in pending:
                try:
                    value = eval_exact(parse_expr(decl.definition or ""), binding)
                except HypError:
                    remaining.append(decl)
                    continue
                if value is None:
                    return False
                binding[decl.name] = value
            if len(remaining) == len(pending):
                return False
            pending = remaining
        return True

    def draw(self, decls: Sequence[SymbolDecl], constraints: Sequence[Constraint] = ()) -> Binding | None:
        """One attempt; None when the drawn point is not admissible."""
        solved = self._solved_symbols(decls, constraints)
        binding: Binding = {}
        for decl in decls:
            if decl.is_derived or decl.name in solved:
                continue
            binding[decl.name] = self.draw_value(decl)
        if not self._solve(solved, binding):
            return None
        for name in solved:
            value = binding[name]
            if value.denominator == 1:
                return None
        if not self._derive(decls, binding):
            return None
        for decl in decls:
            if not decl.is_derived and not decl.admits(binding[decl.name]):
                return None
        try:
            if not all(c.check(binding) for c in constraints):
                return None
        except HypError:
            return None
        return binding

    def sample(
        self,
        decls: Sequence[SymbolDecl],
        constraints: Sequence[Constraint] = (),
        *,
        accept: Callable[[Binding], bool] | None = None,
        attempts: int | None = None,
        entry_id: str = "",
    ) -> Binding:
        limit = attempts or self.settings.max_attempts
        for _ in range(limit):
            binding = self.draw(decls, constraints)
            if binding is None:
                continue
            if accept is None or accept(binding):
                return binding
        logger.warning("No admissible binding", extra={"entry_id": entry_id, "attempts": limit})
        raise NoAdmissibleBindingError(entry_id, limit)

    def sample_many(
        self,
        count: int,
        decls: Sequence[SymbolDecl],
        constraints: Sequence[Constraint] = (),
        **kwargs: object,
    ) -> Iterable[Binding]:
        for _ in range(count):
            yield self.sample(decls, constraints, **kwargs)  # type: ignore[arg-type]

