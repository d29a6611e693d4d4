from __future__ import annotations

from enum import Enum


class EntryStatus(str, Enum):
    """Kind of statement a catalog record makes."""

    CLOSED = "closed"
    SUMMABLE = "summable"
    TRANSFORMATION = "transformation"
    RELATION = "relation"
    EXTERNAL = "external"

    @property
    def display_name(self) -> str:
        """Human-friendly label for listings."""

        mapping = {
            self.CLOSED: "closed form",
            self.SUMMABLE: "finite sum",
            self.TRANSFORMATION: "transformation",
            self.RELATION: "contiguous relation",
            self.EXTERNAL: "external citation (not shipped)",
        }
        return mapping.get(self, self.value)

    @property
    def verifiable(self) -> bool:
        return self is not EntryStatus.EXTERNAL
