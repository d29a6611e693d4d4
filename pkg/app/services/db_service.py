from __future__ import annotations

import logging
from typing import Iterable

from app.config import Settings, settings
from app.domain import expr as E
from app.domain.dtos import ScanCandidate
from app.domain.enums import RuleFamily
from app.domain.errors import DuplicateRecordError, HypError
from app.domain.expr import Expr
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm
from app.domain.models import ContigRelation, DbRecord, IdentityEntry
from app.domain.statuses import EntryStatus
from app.repositories.catalog_store import InMemoryCatalogStore
from app.repositories.db_store import FlatFileDbStore
from app.rules import guess_integer_symbols, termination_length
from app.services.catalog_service import CatalogService
from app.services.orbit_service import OrbitService
from app.textio.printer import print_expr, print_spec

TERMINATING_FAMILIES = (RuleFamily.THOMAE, RuleFamily.RJRJR, RuleFamily.REVERSE)


def is_terminating(spec: HypSpec, integers: Iterable[str]) -> bool:
    known = frozenset(integers)
    return any(termination_length(top, known) is not None for top in spec.tops)


class DbService:
    """Evaluation database: orbit-keyed lookup, guarded appends and scanning."""

    def __init__(
        self,
        db: FlatFileDbStore,
        catalog: InMemoryCatalogStore | None = None,
        cfg: Settings = settings,
    ):
        self.db = db
        self.catalog = catalog or InMemoryCatalogStore()
        self.settings = cfg
        self.logger = logging.getLogger(__name__)
        self.orbits = OrbitService(cfg)
        self._records: list[DbRecord] | None = None
        self._keys: dict[str, str] = {}

    # Loading

    def records(self) -> list[DbRecord]:
        """Database entries followed by catalog entries with a series on the left."""
        if self._records is None:
            loaded = [DbRecord(entry, provenance=entry.ref or "database") for entry in self.db.load()]
            seen = {record.id for record in loaded}
            for entry in self.catalog.list_all():
                if entry.lhs_spec is None or entry.is_relation or entry.id in seen:
                    continue
                loaded.append(DbRecord(entry, provenance=entry.ref or "catalog"))
            self._records = loaded
            self.logger.info("Database loaded", extra={"path": str(self.db.path), "records": len(loaded)})
        return self._records

    def _families(self, spec: HypSpec, integers: Iterable[str]) -> tuple[RuleFamily, ...]:
        return TERMINATING_FAMILIES if is_terminating(spec, integers) else (RuleFamily.THOMAE,)

    def key_for(self, entry: IdentityEntry) -> str:
        """Least printed form over the orbit of the entry's left-hand series."""
        cached = self._keys.get(entry.id)
        if cached is not None:
            return cached
        spec = entry.lhs_spec
        if spec is None:
            raise HypError(f"{entry.id} has no series on the left-hand side")
        integers = entry.integer_symbols
        if spec.p == 3 and spec.q == 2:
            key = self.orbits.orbit_key(spec, self._families(spec, integers), integers)
        else:
            key = spec.canonical().key
        self._keys[entry.id] = key
        return key

    @staticmethod
    def signature(entry: IdentityEntry) -> tuple[str, ...]:
        return tuple(sorted(str(c) for c in entry.resolved_constraints))

    # Operations

    def lookup(self, spec: HypSpec, integers: Iterable[str] | None = None) -> list[DbRecord]:
        """Records whose orbit key lies in the orbit of spec."""
        known = frozenset(integers) if integers is not None else guess_integer_symbols(spec)
        if spec.p == 3 and spec.q == 2:
            orbit = self.orbits.orbit_closure(spec, self._families(spec, known), integers=known)
            keys = set(orbit.members)
        else:
            keys = {spec.canonical().key}
        hits = []
        for record in self.records():
            stored = record.entry.lhs_spec
            # orbit members share their symbol set
            if stored is None or stored.p != spec.p or stored.symbols != spec.symbols:
                continue
            try:
                key = self.key_for(record.entry)
            except HypError:
                self.logger.warning("Record has no usable key", extra={"entry_id": record.id})
                continue
            if key in keys:
                hits.append(DbRecord(record.entry, key, record.provenance))
        self.logger.info("Database lookup", extra={"spec": str(spec), "records": len(hits)})
        return hits

    def add(self, entry: IdentityEntry) -> DbRecord:
        """Append entry unless its key and constraint signature are already stored."""
        key = self.key_for(entry)
        signature = self.signature(entry)
        for record in self.records():
            if record.id == entry.id:
                raise DuplicateRecordError(record.id)
            stored = record.entry.lhs_spec
            if stored is None or entry.lhs_spec is None or stored.symbols != entry.lhs_spec.symbols:
                continue
            if self.key_for(record.entry) == key and self.signature(record.entry) == signature:
                self.logger.warning("Duplicate record rejected", extra={"entry_id": entry.id, "key": key})
                raise DuplicateRecordError(record.id)
        self.db.append(entry)
        record = DbRecord(entry, key, entry.ref or "added")
        self.records().insert(0, record)
        return record

    # Scanning

    def _known_value(
        self, spec: HypSpec, integers: frozenset[str], matcher: CatalogService
    ) -> tuple[Expr, str] | None:
        if is_terminating(spec, integers):
            return E.hyp(spec), "terminating"
        for result in matcher.match(spec, integers=integers):
            if result.pending:
                continue
            entry = matcher.store.get(result.entry_id)
            return E.substitute(entry.rhs, result.unifier), result.entry_id
        return None

    def _scan_relation(
        self, rel: ContigRelation, records: list[DbRecord], matcher: CatalogService
    ) -> list[ScanCandidate]:
        found: dict[str, ScanCandidate] = {}
        if any(d.is_derived for d in rel.entry.decls):
            return []
        unknowns = frozenset().union(*(spec.symbols for _, spec in rel.terms))
        for record in records:
            source = record.entry.lhs_spec
            if source is None or source.p != 3 or source.q != 2:
                continue
            integers = record.entry.integer_symbols
            for anchor, (_, pattern) in enumerate(rel.terms):
                if pattern.p != 3 or pattern.q != 2:
                    continue
                for unifier in CatalogService.unifiers(pattern, source, pattern.symbols & unknowns):
                    if any(name not in unifier for name in unknowns):
                        continue
                    candidate = self._resolve(rel, anchor, record, unifier, integers, matcher)
                    if candidate is not None:
                        found.setdefault(candidate.unresolved + candidate.expression, candidate)
        return list(found.values())

    def _resolve(
        self,
        rel: ContigRelation,
        anchor: int,
        record: DbRecord,
        unifier: dict[str, LinForm],
        integers: frozenset[str],
        matcher: CatalogService,
    ) -> ScanCandidate | None:
        known: list[Expr] = [E.substitute(rel.inhomogeneous, unifier)]
        used = [record.id]
        open_terms: list[tuple[Expr, HypSpec]] = []
        for index, (coefficient, pattern) in enumerate(rel.terms):
            weight = E.substitute(coefficient, unifier)
            spec = pattern.substitute(unifier)
            value: tuple[Expr, str] | None
            if index == anchor:
                value = record.entry.rhs, record.id
            else:
                value = self._known_value(spec, integers, matcher)
            if value is None:
                open_terms.append((weight, spec))
                continue
            known.append(E.mul(weight, value[0]))
            if value[1] not in used:
                used.append(value[1])
        if len(open_terms) != 1:
            return None
        weight, unresolved = open_terms[0]
        expression = E.div(E.neg(E.add(*known)), weight)
        return ScanCandidate(
            relation=rel.id,
            unresolved=print_spec(unresolved),
            known=used,
            expression=print_expr(expression),
        )

    def scan_for_new(
        self,
        relations: Iterable[ContigRelation],
        entry_ids: Iterable[str] | None = None,
    ) -> list[ScanCandidate]:
        """Relation instances where every term but one is known; nothing is verified here."""
        records = [record for record in self.records() if record.entry.status.verifiable]
        if entry_ids is not None:
            wanted = set(entry_ids)
            records = [record for record in records if record.id in wanted]
        pool = InMemoryCatalogStore(
            record.entry
            for record in self.records()
            if record.entry.status in (EntryStatus.CLOSED, EntryStatus.SUMMABLE)
        )
        matcher = CatalogService(pool, self.settings)
        candidates: list[ScanCandidate] = []
        for rel in relations:
            candidates.extend(self._scan_relation(rel, records, matcher))
        candidates.sort(key=lambda c: (c.relation, c.unresolved, c.expression))
        self.logger.info("Database scan", extra={"records": len(candidates)})
        return candidates
