from __future__ import annotations

from fractions import Fraction
from typing import Mapping

import mpmath

from app.domain.expr import Expr
from app.domain.hypspec import HypSpec
from app.domain.linform import LinForm


def print_expr(e: Expr) -> str:
    """Canonical text of a normal-form tree; parse_expr reads it back unchanged."""
    return str(e)


def print_spec(spec: HypSpec, ordered: bool = False) -> str:
    return spec.ordered_str() if ordered else str(spec)


def print_linform(form: LinForm) -> str:
    return str(form)


def print_binding(binding: Mapping[str, Fraction | LinForm]) -> str:
    return ",".join(f"{name}={value}" for name, value in sorted(binding.items()))


def print_number(value: object, digits: int = 30) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(value, digits)
    return str(value)
