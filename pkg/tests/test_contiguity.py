from __future__ import annotations

import pathlib
import sys
from fractions import Fraction as F

import mpmath
import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.domain import expr as E
from app.domain.errors import PatternMismatchError, UnknownEntryError
from app.numerics.numeval import EvalContext, eval_expr
from app.repositories.catalog_store import InMemoryCatalogStore
from app.services.contiguity_service import ContiguityService
from app.textio.parser import parse_linform, parse_spec

POINT = {"a": F(1, 3), "b": F(2, 5), "c": F(3, 7), "e": F(7, 2)}


@pytest.fixture(scope="module")
def service() -> ContiguityService:
    return ContiguityService(InMemoryCatalogStore.shipped())


def close(left: mpmath.mpf, right: mpmath.mpf) -> bool:
    with mpmath.workdps(40):
        return abs(left - right) < mpmath.mpf(10) ** -25


def test_relations_are_loaded(service: ContiguityService) -> None:
    ids = {rel.id for rel in service.relations()}
    assert {"cl1", "cm2", "rainv19a"} <= ids
    assert len(service.get_relation("cl1").terms) == 2
    with pytest.raises(UnknownEntryError):
        service.get_relation("gauss")


def test_unit_step_relation_holds(service: ContiguityService) -> None:
    assert service.check_relation(service.get_relation("cl1"), POINT) < mpmath.mpf(10) ** -25


def test_terminating_relation_is_exactly_zero(service: ContiguityService) -> None:
    binding = {"a": F(1, 3), "b": F(-2), "c": F(3, 7), "e": F(7, 2)}
    assert service.exact_residual(service.get_relation("cm2"), binding) == 0


def test_exact_residual_gives_up_on_gamma_values(service: ContiguityService) -> None:
    assert service.exact_residual(service.get_relation("cl1"), POINT) is None


def test_unit_ladder(service: ContiguityService) -> None:
    a, b, c, e = (parse_linform(name) for name in "abce")
    ladder = service.unit_ladder(a, b, c, e, 3)
    ctx = EvalContext(POINT)
    assert close(eval_expr(ladder, ctx), eval_expr(E.hyp(parse_spec("3F2(a+3,b,c;a+4,e)")), ctx))


@pytest.mark.parametrize("reduce", [True, False])
def test_integer_shift_rewrite(service: ContiguityService, reduce: bool) -> None:
    spec = parse_spec("3F2(a,b,c;a+3,e)")
    rewritten = service.chen_shift(spec, 3, reduce=reduce)
    ctx = EvalContext(POINT)
    assert close(eval_expr(rewritten, ctx), eval_expr(E.hyp(spec), ctx))


def test_symbolic_shift_rewrite(service: ContiguityService) -> None:
    spec = parse_spec("3F2(a,b,c;a+m,e)")
    rewritten = service.chen_shift(spec, "m")
    assert "k" not in E.free_symbols(rewritten)
    ctx = EvalContext({**POINT, "m": F(4)})
    assert close(eval_expr(rewritten, ctx), eval_expr(E.hyp(spec), ctx))


def test_shift_needs_a_pair(service: ContiguityService) -> None:
    with pytest.raises(PatternMismatchError):
        service.chen_shift(parse_spec("3F2(a,b,c;e,f)"))


def test_split_shifted_pair(service: ContiguityService) -> None:
    spec = parse_spec("3F2(x+1,a,b;x,e)")
    split = service.split_shifted_pair(spec)
    ctx = EvalContext({"x": F(2, 3), "a": F(1, 3), "b": F(1, 5), "e": F(4)})
    assert close(eval_expr(split, ctx), eval_expr(E.hyp(spec), ctx))
    with pytest.raises(PatternMismatchError):
        service.split_shifted_pair(parse_spec("3F2(a,b,c;e,f)"))
