from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable

from app.config import settings
from app.domain.models import IdentityEntry
from app.textio.records import dump_records, format_record, load_records

logger = logging.getLogger(__name__)


class FlatFileDbStore:
    """Evaluation database kept as a text file of identity records.

    The whole file is read on load, so readers see one snapshot; writes
    append single lines, or rewrite the file in one go on save().
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path or settings.db_path)

    def load(self) -> list[IdentityEntry]:
        if not self.path.exists():
            logger.warning("Database file missing; starting empty", extra={"path": str(self.path)})
            return []
        return load_records(self.path, default_section="database")

    def append(self, entry: IdentityEntry) -> None:
        needs_newline = self.path.exists() and self.path.stat().st_size > 0 and not self._ends_with_newline()
        with self.path.open("a", encoding="utf-8") as handle:
            if needs_newline:
                handle.write("\n")
            handle.write(format_record(entry) + "\n")
        logger.info("Appended record", extra={"entry_id": entry.id, "path": str(self.path)})

    def save(self, entries: Iterable[IdentityEntry]) -> None:
        entries = list(entries)
        self.path.write_text(dump_records(entries), encoding="utf-8")
        logger.info("Saved database", extra={"path": str(self.path), "records": len(entries)})

    def _ends_with_newline(self) -> bool:
        with self.path.open("rb") as handle:
            handle.seek(-1, 2)
            return handle.read(1) == b"\n"
