from __future__ import annotations

import pathlib
import sys
from fractions import Fraction as F

import mpmath
import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.domain.errors import ConstraintViolationError, UnknownEntryError
from app.domain.models import EXCESS_NAMES
from app.domain.statuses import EntryStatus
from app.repositories.catalog_store import InMemoryCatalogStore
from app.repositories.db_store import FlatFileDbStore
from app.services.catalog_service import CatalogService, solve_affine
from app.textio.parser import parse_linform, parse_spec


@pytest.fixture(scope="module")
def store() -> InMemoryCatalogStore:
    return InMemoryCatalogStore.shipped()


@pytest.fixture
def service(store: InMemoryCatalogStore) -> CatalogService:
    return CatalogService(store)


def test_shipped_catalog_loads(store: InMemoryCatalogStore) -> None:
    assert "gauss" in store
    assert "cl1" in store
    assert store.get("saalschuetz").status is EntryStatus.CLOSED
    with pytest.raises(UnknownEntryError):
        store.get("no-such-entry")


def test_list_by_status(service: CatalogService) -> None:
    ids = {entry.id for entry in service.list_entries(status="transformation")}
    assert {"thom8n", "r8rev"} <= ids
    assert "gauss" not in ids


def test_solve_affine() -> None:
    a, b = parse_linform("a"), parse_linform("1+a-b")
    solution = solve_affine([a, b], [parse_linform("x"), parse_linform("y")], {"a", "b"})
    assert solution == {"a": parse_linform("x"), "b": parse_linform("1+x-y")}


def test_solve_affine_inconsistent() -> None:
    patterns = [parse_linform("a"), parse_linform("a+1")]
    assert solve_affine(patterns, [parse_linform("x"), parse_linform("x")], {"a"}) is None


def test_match_symbolic_query(service: CatalogService) -> None:
    results = {result.entry_id: result for result in service.match(parse_spec("2F1(x,y;z)"))}
    assert "gauss" in results
    assert any("z" in text for text in results["gauss"].pending)


def test_match_terminating_query(service: CatalogService) -> None:
    ids = [result.entry_id for result in service.match(parse_spec("2F1(-n,x;y)"), integers={"n"})]
    assert "chuvandermonde" in ids


def test_match_checks_constraints_at_binding(service: CatalogService) -> None:
    spec = parse_spec("2F1(x,y;z)")
    good = {"x": F(1, 3), "y": F(1, 5), "z": F(3)}
    bad = {"x": F(1, 3), "y": F(1, 5), "z": F(1, 2)}
    assert "gauss" in [r.entry_id for r in service.match(spec, binding=good)]
    assert "gauss" not in [r.entry_id for r in service.match(spec, binding=bad)]


def test_instantiate_both_sides_agree(service: CatalogService) -> None:
    spec = parse_spec("2F1(x,y;z)")
    binding = {"x": F(1, 3), "y": F(1, 5), "z": F(3)}
    (result,) = [r for r in service.match(spec, binding=binding) if r.entry_id == "gauss"]
    left, right = service.instantiate("gauss", result.unifier, binding)
    with mpmath.workdps(40):
        assert abs(left - right) < mpmath.mpf(10) ** -30


def test_instantiate_rejects_constraint_violation(service: CatalogService) -> None:
    with pytest.raises(ConstraintViolationError):
        service.instantiate("gauss", None, {"a": F(1), "b": F(1), "c": F(1)})


def test_shipped_constraints_name_only_declared_symbols(store: InMemoryCatalogStore) -> None:
    for entry in [*store.list_all(), *FlatFileDbStore().load()]:
        for constraint in entry.resolved_constraints:
            assert not constraint.symbols & set(EXCESS_NAMES), entry.id


def test_match_drops_impossible_integer_slots(service: CatalogService) -> None:
    results = service.match(parse_spec("3F2(a,b,c+n;c,b+1)"), integers={"n"})
    ids = [result.entry_id for result in results]
    assert "k10" in ids
    # case1 would need m=-a with a generic
    assert "case1" not in ids
    counts = [len(result.pending) for result in results]
    assert counts == sorted(counts)


def test_integer_binding_can_fill_an_integer_slot(service: CatalogService) -> None:
    spec = parse_spec("2F1(x,y;z)")
    binding = {"x": F(-2), "y": F(1, 3), "z": F(5, 2)}
    assert "chuvandermonde" in [r.entry_id for r in service.match(spec, binding=binding)]
    assert "chuvandermonde" not in [r.entry_id for r in service.match(spec)]
