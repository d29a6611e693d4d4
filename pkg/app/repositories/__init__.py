from .catalog_store import InMemoryCatalogStore
from .db_store import FlatFileDbStore

__all__ = ["FlatFileDbStore", "InMemoryCatalogStore"]
