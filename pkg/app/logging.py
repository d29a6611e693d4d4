from __future__ import annotations

import json
import logging
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict

import mpmath


class JsonFormatter(logging.Formatter):
    """Format log records as JSON."""

    def _coerce(self, value: Any) -> Any:
        if isinstance(value, (Decimal, Fraction)):
            return str(value)
        if isinstance(value, (mpmath.mpf, mpmath.mpc)):
            return mpmath.nstr(value, 12)
        if isinstance(value, dict):
            return {str(k): self._coerce(v) for k, v in value.items()}
        if isinstance(value, (list, tuple, set, frozenset)):
            return [self._coerce(item) for item in value]
        if isinstance(value, (str, int, float, bool)) or value is None:
            return value
        return str(value)

    def format(self, record: logging.LogRecord) -> str:  # noqa: D401
        data: Dict[str, Any] = {
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
        }
        # Whitelisted extra fields to enrich logs
        extra_fields = (
            "entry_id",
            "rule",
            "rules",
            "precision",
            "residual",
            "trials",
            "failures",
            "spec",
            "key",
            "depth",
            "orbit_size",
            "attempts",
            "excess",
            "verb",
            "path",
            "records",
            "binding",
            "status",
        )
        for field in extra_fields:
            if hasattr(record, field):
                data[field] = self._coerce(getattr(record, field))
        return json.dumps(data)


def setup_logging(level: str = "INFO") -> None:
    """Configure root logger to emit JSON on stderr."""
    handler = logging.StreamHandler()
    handler.setFormatter(JsonFormatter())
    logging.basicConfig(level=level.upper(), handlers=[handler], force=True)
