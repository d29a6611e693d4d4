from __future__ import annotations

import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.config import settings
from app.domain.errors import DuplicateRecordError
from app.repositories.catalog_store import InMemoryCatalogStore
from app.repositories.db_store import FlatFileDbStore
from app.rules.thomae import apply_thomae
from app.services.contiguity_service import ContiguityService
from app.services.db_service import DbService
from app.textio.parser import parse_spec
from app.textio.records import parse_identity_record

GENERIC = "gx | a:real,b:real,c:real,e:real,f:real | - | 3F2(a,b,c;e,f) | 1 | placeholder value"
SCAN_SOURCE = "r1 | y:real,z:real,w:real | - | 3F2(1/3,y,z;4/3,w) | Gamma(w)/Gamma(w-y) | test value"


@pytest.fixture
def db(tmp_path: pathlib.Path) -> DbService:
    return DbService(FlatFileDbStore(tmp_path / "db.txt"))


def test_missing_file_starts_empty(db: DbService) -> None:
    assert db.records() == []


def test_add_then_lookup_through_orbit(db: DbService) -> None:
    record = db.add(parse_identity_record(GENERIC))
    assert record.key == db.key_for(record.entry)
    assert "gx |" in db.db.path.read_text(encoding="utf-8")
    _, image = apply_thomae(6, parse_spec("3F2(a,b,c;e,f)"))
    assert [hit.id for hit in db.lookup(image)] == ["gx"]


def test_lookup_misses_other_orbit(db: DbService) -> None:
    db.add(parse_identity_record(GENERIC))
    assert db.lookup(parse_spec("3F2(a,b,c;e,f+1)")) == []


def test_add_rejects_same_id(db: DbService) -> None:
    db.add(parse_identity_record(GENERIC))
    with pytest.raises(DuplicateRecordError):
        db.add(parse_identity_record(GENERIC.replace("3F2(a,b,c;e,f)", "3F2(a,b,c;e,f+2)")))


def test_add_rejects_orbit_duplicate(db: DbService) -> None:
    db.add(parse_identity_record(GENERIC))
    _, image = apply_thomae(2, parse_spec("3F2(a,b,c;e,f)"))
    duplicate = parse_identity_record(f"gy | a:real,b:real,c:real,e:real,f:real | - | {image} | 1 | same orbit")
    with pytest.raises(DuplicateRecordError):
        db.add(duplicate)


def test_shipped_database_lookup() -> None:
    service = DbService(FlatFileDbStore(settings.db_path))
    spec = parse_spec("3F2(a,b,c;c+n,1+c-m)")
    _, image = apply_thomae(4, spec)
    assert "data483" in [hit.id for hit in service.lookup(image, integers={"m", "n"})]


def test_scan_finds_the_missing_term(tmp_path: pathlib.Path) -> None:
    path = tmp_path / "db.txt"
    path.write_text(SCAN_SOURCE + "\n", encoding="utf-8")
    service = DbService(FlatFileDbStore(path))
    relation = ContiguityService(InMemoryCatalogStore.shipped()).get_relation("cl1")
    candidates = service.scan_for_new([relation])
    assert candidates
    assert all(candidate.relation == "cl1" and "r1" in candidate.known for candidate in candidates)
    assert parse_spec("3F2(4/3,y,z;7/3,w)") in [parse_spec(c.unresolved) for c in candidates]


def test_scan_skips_external_records(tmp_path: pathlib.Path) -> None:
    path = tmp_path / "db.txt"
    path.write_text(SCAN_SOURCE + " | external\n", encoding="utf-8")
    service = DbService(FlatFileDbStore(path))
    relation = ContiguityService(InMemoryCatalogStore.shipped()).get_relation("cl1")
    assert service.scan_for_new([relation]) == []
