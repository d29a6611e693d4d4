from __future__ import annotations

import pathlib
import sys
from fractions import Fraction

import mpmath
import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.domain import expr as E
from app.domain.errors import EvaluationError, UnknownEntryError
from app.numerics.numeval import eval_expr
from app.numerics.psi_rational import (
    harmonic,
    is_exotic_reducible,
    polygamma_at_integer,
    psi_constants_lookup,
    psi_difference,
    psi_rational,
    reduce_psi,
)
from app.textio.parser import parse_expr


def close(expression: E.Expr, expected: mpmath.mpf) -> bool:
    with mpmath.workdps(40):
        return abs(eval_expr(expression) - expected) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("p, q", [(1, 3), (2, 3), (1, 4), (3, 8), (5, 12), (2, 5), (3, 7)])
def test_gauss_digamma_values(p: int, q: int) -> None:
    with mpmath.workdps(40):
        assert close(psi_rational(p, q), mpmath.psi(0, mpmath.mpf(p) / q))


def test_argument_must_be_reduced() -> None:
    with pytest.raises(EvaluationError):
        psi_rational(2, 4)
    with pytest.raises(EvaluationError):
        psi_rational(5, 4)


def test_psi_difference_uses_table() -> None:
    value = psi_difference(5, 1, 8)
    assert value == parse_expr("sqrt(2)*(pi-2*ln(sqrt(2)-1))")
    with mpmath.workdps(40):
        assert close(value, mpmath.psi(0, mpmath.mpf(5) / 8) - mpmath.psi(0, mpmath.mpf(1) / 8))


def test_harmonic_numbers() -> None:
    assert harmonic(4) == E.rat(Fraction(25, 12))
    with mpmath.workdps(40):
        assert close(harmonic(Fraction(1, 2)), 2 - 2 * mpmath.log(2))
        assert close(harmonic(Fraction(5, 2)), mpmath.psi(0, mpmath.mpf(7) / 2) + mpmath.euler)


def test_polygamma_at_integers() -> None:
    with mpmath.workdps(40):
        assert close(polygamma_at_integer(1, 3), mpmath.psi(1, 3))
        assert close(polygamma_at_integer(0, 5), mpmath.psi(0, 5))
    with pytest.raises(EvaluationError):
        polygamma_at_integer(2, 3)
    with pytest.raises(EvaluationError):
        polygamma_at_integer(0, 0)


@pytest.mark.parametrize("q, reducible", [(17, True), (12, True), (64, True), (7, False), (9, False), (11, False)])
def test_constructible_denominators(q: int, reducible: bool) -> None:
    assert is_exotic_reducible(q) is reducible


def test_reduce_psi_shifts_into_the_table() -> None:
    reduced = reduce_psi(parse_expr("psi(7/4)"))
    assert not E.contains(reduced, lambda node: isinstance(node, E.Polygamma))
    with mpmath.workdps(40):
        assert close(reduced, mpmath.psi(0, mpmath.mpf(7) / 4))


def test_constants_lookup() -> None:
    assert psi_constants_lookup("psi(1,1/4)") == parse_expr("pi^2+8*G")
    with pytest.raises(UnknownEntryError):
        psi_constants_lookup("psi(2/7)")
