from __future__ import annotations

import logging
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import mpmath

from app.config import Settings, settings
from app.domain.enums import SymbolKind
from app.domain.errors import ConstraintViolationError, EvaluationError, HypError
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm
from app.domain.models import IdentityEntry, MatchResult
from app.domain.statuses import EntryStatus
from app.numerics.numeval import EvalContext, eval_exact, eval_expr
from app.repositories.catalog_store import InMemoryCatalogStore
from app.rules import guess_integer_symbols
from app.textio.parser import parse_expr

Row = tuple[dict[str, Fraction], LinForm]


def solve_affine(
    patterns: Sequence[LinForm], targets: Sequence[LinForm], unknowns: Iterable[str]
) -> dict[str, LinForm] | None:
    """Solve patterns[i](x) = targets[i] for the unknowns by Gauss-Jordan elimination.

    Right-hand sides are affine forms in the target's own symbols. Returns
    None when the system is inconsistent or leaves an unknown free.
    """
    rows: list[Row] = []
    for pattern, target in zip(patterns, targets):
        rows.append((pattern.as_dict(), target - pattern.constant))
    solved: list[tuple[str, Row]] = []
    for name in sorted(unknowns):
        pivot = next((row for row in rows if row[0].get(name)), None)
        if pivot is None:
            return None
        rows.remove(pivot)
        scale = pivot[0][name]
        coefs = {k: v / scale for k, v in pivot[0].items()}
        rhs = pivot[1] / scale

        def eliminate(row: Row) -> Row:
            factor = row[0].get(name)
            if not factor:
                return row
            merged = dict(row[0])
            for key, value in coefs.items():
                merged[key] = merged.get(key, Fraction(0)) - factor * value
            return {k: v for k, v in merged.items() if v}, row[1] - rhs * factor

        rows = [eliminate(row) for row in rows]
        solved = [(other, eliminate(row)) for other, row in solved]
        solved.append((name, (coefs, rhs)))
    if any(row[0] or row[1] != LinForm() for row in rows):
        return None
    return {name: row[1] for name, row in solved}


class CatalogService:
    """Pattern matching, instantiation and listing over the identity catalog."""

    def __init__(self, store: InMemoryCatalogStore, cfg: Settings = settings):
        self.store = store
        self.settings = cfg
        self.logger = logging.getLogger(__name__)

    def list_entries(self, section: str | None = None, status: EntryStatus | str | None = None) -> list[IdentityEntry]:
        wanted = EntryStatus(status) if isinstance(status, str) else status
        return self.store.list_by(section=section, status=wanted)

    # Matching

    @staticmethod
    def unifiers(pattern: HypSpec, query: HypSpec, unknowns: frozenset[str]) -> list[dict[str, LinForm]]:
        found: dict[str, dict[str, LinForm]] = {}
        for top_order in permutations(range(query.p)):
            for bottom_order in permutations(range(query.q)):
                ordered = query.reorder(top_order, bottom_order)
                solution = solve_affine(
                    pattern.tops + pattern.bottoms, ordered.tops + ordered.bottoms, unknowns
                )
                if solution is not None:
                    found.setdefault(repr(sorted((k, str(v)) for k, v in solution.items())), solution)
        return list(found.values())

    @staticmethod
    def _integer_check(
        entry: IdentityEntry, unifier: Mapping[str, LinForm], integers: frozenset[str]
    ) -> bool:
        for decl in entry.decls:
            if not decl.is_integer or decl.name not in unifier:
                continue
            value = unifier[decl.name]
            if value.is_constant:
                if not decl.admits(value.constant):
                    return False
                continue
            # A form in generic (non-integer) query symbols is never an integer.
            if not value.is_integer_valued(integers):
                return False
        return True

    @staticmethod
    def _query_kinds(entry: IdentityEntry, unifier: Mapping[str, LinForm]) -> dict[str, SymbolKind]:
        kinds: dict[str, SymbolKind] = {}
        for decl in entry.decls:
            value = unifier.get(decl.name)
            if value is not None and value.constant == 0 and len(value.terms) == 1 and value.terms[0][1] == 1:
                kinds[value.terms[0][0]] = decl.kind
        return kinds

    def _match_entry(
        self,
        entry: IdentityEntry,
        query: HypSpec,
        binding: Mapping[str, Fraction] | None,
        integers: frozenset[str],
    ) -> MatchResult | None:
        pattern = entry.lhs_spec
        if pattern is None or pattern.p != query.p or pattern.q != query.q:
            return None
        unknowns = pattern.symbols
        if binding is not None:
            integers = integers | {name for name, value in binding.items() if value.denominator == 1}
        for unifier in self.unifiers(pattern, query, unknowns):
            if not self._integer_check(entry, unifier, integers):
                continue
            pending: list[str] = []
            derived = [d.name for d in entry.decls if d.is_derived and d.name in unknowns]
            pending.extend(f"{name} is derived" for name in derived)
            if binding is not None:
                try:
                    self._bind(entry, unifier, binding)
                except (ConstraintViolationError, EvaluationError):
                    continue
                return MatchResult(entry.id, unifier, tuple(str(c) for c in entry.constraints), ())
            verified: list[str] = []
            kinds = self._query_kinds(entry, unifier)
            rejected = False
            for constraint in entry.resolved_constraints:
                image = type(constraint)(
                    constraint.op, constraint.left.substitute(unifier), constraint.right.substitute(unifier)
                )
                decision = image.decide(kinds)
                if decision is False:
                    rejected = True
                    break
                (verified if decision else pending).append(str(image))
            if not rejected:
                return MatchResult(entry.id, unifier, tuple(verified), tuple(pending))
        return None

    def match(
        self,
        spec: HypSpec,
        binding: Mapping[str, Fraction] | None = None,
        integers: Iterable[str] | None = None,
        statuses: Iterable[EntryStatus] = (EntryStatus.CLOSED, EntryStatus.SUMMABLE),
    ) -> list[MatchResult]:
        """Entries of the given statuses whose left-hand series unifies with spec."""
        known = frozenset(integers) if integers is not None else guess_integer_symbols(spec)
        wanted = frozenset(statuses)
        results: list[MatchResult] = []
        for entry in self.store.list_all():
            if entry.status not in wanted:
                continue
            result = self._match_entry(entry, spec, binding, known)
            if result is not None:
                results.append(result)
        results.sort(key=lambda result: len(result.pending))
        self.logger.info("Catalog match", extra={"spec": str(spec), "records": len(results)})
        return results

    # Instantiation

    def _bind(
        self, entry: IdentityEntry, unifier: Mapping[str, LinForm], binding: Mapping[str, Fraction]
    ) -> dict[str, Fraction]:
        """Entry-level binding from a query binding, checked against decls and constraints."""
        values: dict[str, Fraction] = {}
        for decl in entry.decls:
            if decl.is_derived:
                continue
            if decl.name in unifier:
                values[decl.name] = unifier[decl.name].evaluate(binding)
            elif decl.name in binding:
                values[decl.name] = binding[decl.name]
        for decl in entry.decls:
            if decl.is_derived:
                value = eval_exact(parse_expr(decl.definition or ""), values)
                if value is None:
                    raise EvaluationError(f"Derived symbol {decl.name} is not rational here")
                values[decl.name] = value
        for decl in entry.decls:
            if decl.name not in values:
                raise ConstraintViolationError(f"{entry.id}: no value for {decl.name}")
            if not decl.admits(values[decl.name]):
                raise ConstraintViolationError(f"{entry.id}: {decl.name}={values[decl.name]} violates {decl}")
        for constraint in entry.resolved_constraints:
            if not constraint.check(values):
                raise ConstraintViolationError(f"{entry.id}: constraint {constraint} fails")
        return values

    def instantiate(
        self,
        entry_id: str,
        unifier: Mapping[str, LinForm] | None,
        binding: Mapping[str, Fraction],
        precision: int | None = None,
    ) -> tuple[mpmath.mpf, mpmath.mpf]:
        """High-precision values of both sides of an entry at a binding."""
        entry = self.store.get(entry_id)
        values = self._bind(entry, unifier or {}, binding)
        ctx = EvalContext(values, precision or self.settings.precision)
        try:
            return eval_expr(entry.lhs, ctx), eval_expr(entry.rhs, ctx)
        except HypError:
            self.logger.warning("Instantiation failed", extra={"entry_id": entry_id, "binding": values})
            raise
