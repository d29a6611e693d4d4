from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Iterable, Optional

from app.config import settings
from app.domain.errors import DuplicateRecordError, UnknownEntryError
from app.domain.models import IdentityEntry
from app.domain.statuses import EntryStatus
from app.textio.records import load_records

logger = logging.getLogger(__name__)


class InMemoryCatalogStore:
    """Immutable-after-load catalog of identity records, indexed by id."""

    def __init__(self, entries: Iterable[IdentityEntry] = ()) -> None:
        self.by_id: Dict[str, IdentityEntry] = {}
        for entry in entries:
            self.save(entry)

    @classmethod
    def from_files(cls, *paths: str | Path) -> InMemoryCatalogStore:
        store = cls()
        for path in paths:
            for entry in load_records(path):
                store.save(entry)
        return store

    @classmethod
    def shipped(cls) -> InMemoryCatalogStore:
        """The catalog and contiguity files named in settings."""
        return cls.from_files(settings.catalog_path, settings.relations_path)

    def save(self, entry: IdentityEntry) -> None:
        if entry.id in self.by_id:
            raise DuplicateRecordError(entry.id)
        self.by_id[entry.id] = entry

    def get(self, entry_id: str) -> IdentityEntry:
        entry = self.find(entry_id)
        if entry is None:
            raise UnknownEntryError(entry_id)
        return entry

    def find(self, entry_id: str) -> Optional[IdentityEntry]:
        return self.by_id.get(entry_id)

    def list_all(self) -> list[IdentityEntry]:
        return sorted(self.by_id.values(), key=lambda e: e.id)

    def list_by(self, *, section: str | None = None, status: EntryStatus | None = None) -> list[IdentityEntry]:
        return [
            entry
            for entry in self.list_all()
            if (section is None or entry.section == section) and (status is None or entry.status is status)
        ]

    def sections(self) -> list[str]:
        return sorted({entry.section for entry in self.by_id.values()})

    def __len__(self) -> int:
        return len(self.by_id)

    def __contains__(self, entry_id: object) -> bool:
        return entry_id in self.by_id
