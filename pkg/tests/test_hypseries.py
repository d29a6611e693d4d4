from __future__ import annotations

import pathlib
import random
import sys
from fractions import Fraction as F
from itertools import permutations

import mpmath
import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.domain import expr as E
from app.domain.enums import SeriesKind
from app.domain.errors import (
    ConvergenceError,
    DegenerateSeriesError,
    DivergentSeriesError,
    ExcessTooSmallError,
    HypError,
)
from app.numerics import hypseries
from app.numerics.hypseries import (
    classify_values,
    evaluate_values,
    reverse_terminating,
    sum_convergent,
    sum_convergent_certified,
    sum_convergent_values,
    sum_direct_values,
    sum_terminating_exact,
    sum_terminating_values,
    tail_start,
    to_mpf,
)
from app.numerics.numeval import EvalContext, eval_exact, eval_expr, pochhammer_exact
from app.rules.thomae import THOMAE_RULES
from app.textio.parser import parse_spec

TERMINATING = parse_spec("3F2(-n,a,b;d,e)")


def gauss(a: F, b: F, c: F) -> mpmath.mpf:
    g = lambda x: mpmath.gamma(mpmath.mpf(x.numerator) / x.denominator)  # noqa: E731
    return g(c) * g(c - a - b) / (g(c - a) * g(c - b))


def test_classify_terminating() -> None:
    info = classify_values((F(-2), F(1, 2), F(1, 3)), (F(5, 7), F(3, 5)))
    assert info.kind is SeriesKind.TERMINATING
    assert info.length == 3


def test_classify_bottom_pole_before_termination() -> None:
    assert classify_values((F(-3), F(1, 2), F(1, 3)), (F(-1), F(3, 5))).kind is SeriesKind.DEGENERATE
    # a bottom pole past the last term is harmless
    assert classify_values((F(-1), F(1, 2), F(1, 3)), (F(-3), F(3, 5))).kind is SeriesKind.TERMINATING


def test_classify_by_excess() -> None:
    assert classify_values((F(1, 3), F(1, 5), F(1, 7)), (F(2), F(1, 2))).kind is SeriesKind.CONVERGENT
    assert classify_values((F(1, 3), F(1, 5), F(1, 7)), (F(1, 3), F(1, 3))).kind is SeriesKind.DIVERGENT
    assert classify_values((F(1, 3),), (F(1, 5),)).kind is SeriesKind.DIVERGENT


def test_terminating_sum_matches_chu_vandermonde() -> None:
    n, b, c = 4, F(1, 3), F(2, 5)
    value = sum_terminating_values((F(-n), b), (c,))
    assert value == pochhammer_exact(c - b, n) / pochhammer_exact(c, n)


def test_terminating_sum_rejects_degenerate() -> None:
    with pytest.raises(DegenerateSeriesError):
        sum_terminating_values((F(-3), F(1, 2)), (F(-1),))


def test_convergent_sum_matches_gauss() -> None:
    a, b, c = F(1, 3), F(1, 5), F(7, 3)
    with mpmath.workdps(40):
        value = sum_convergent_values((a, b), (c,), 40)
        assert abs(value - gauss(a, b, c)) < mpmath.mpf(10) ** -30


def test_divergent_sum_is_refused() -> None:
    with pytest.raises(DivergentSeriesError):
        sum_convergent_values((F(1, 3), F(1, 5), F(1, 7)), (F(1, 3), F(1, 3)))


def test_small_excess_is_refused_without_usable_image() -> None:
    tops = (F(1, 3), F(1, 5), F(1, 7))
    bottoms = (F(1, 2), sum(tops, F(0)) + F(1, 4) - F(1, 2))
    with pytest.raises(ExcessTooSmallError):
        sum_convergent_values(tops, bottoms)
    with pytest.raises(ExcessTooSmallError):
        evaluate_values(tops, bottoms)


def test_small_excess_goes_through_thomae_image() -> None:
    # 3F2(a,b,c;c,e) is 2F1(a,b;e); excess 1/4 forces the Thomae route
    a, b, c = F(3, 2), F(1, 3), F(2, 3)
    e = a + b + F(1, 4)
    with mpmath.workdps(40):
        value = evaluate_values((a, b, c), (c, e), 40)
        assert abs(value - gauss(a, b, e)) < mpmath.mpf(10) ** -25


def test_direct_summation_agrees_with_hyper() -> None:
    tops, bottoms = (F(1, 3), F(2, 5), F(3, 7)), (F(9, 4), F(803, 420))
    with mpmath.workdps(30):
        direct = sum_direct_values(tops, bottoms, 30)
        fast = sum_convergent_values(tops, bottoms, 30)
        assert abs(direct - fast) < mpmath.mpf(10) ** -15


def test_reversal_preserves_value() -> None:
    spec = parse_spec("3F2(-n,a,b;c,e)")
    binding = {"n": F(4), "a": F(1, 3), "b": F(2, 5), "c": F(3, 7), "e": F(5, 11)}
    prefactor, image = reverse_terminating(spec, "n")
    assert image == parse_spec("3F2(-n,1-c-n,1-e-n;1-a-n,1-b-n)")
    assert eval_exact(E.mul(prefactor, E.hyp(image)), binding) == sum_terminating_exact(spec, binding)


def generic(rng: random.Random, denominator: int, low: int, high: int) -> F:
    while True:
        value = F(rng.randint(low * denominator, high * denominator), denominator)
        if value.denominator != 1:
            return value


@pytest.mark.parametrize(
    "a, b, c",
    [(F(1, 3), F(1, 5), F(53, 15)), (F(1, 3), F(1, 5), F(31, 30)), (F(-3, 2), F(2, 3), F(23, 6))],
)
def test_tail_bound_covers_gauss_remainder(a: F, b: F, c: F) -> None:
    result = sum_convergent_certified((a, b), (c,), 40)
    assert result.terms >= tail_start((a, b), (c,))
    with mpmath.workdps(50):
        exact = gauss(a, b, c)
        assert result.tail_bound > 0
        assert abs(result.partial - exact) <= result.tail_bound
        assert abs(result.value - exact) < mpmath.mpf(10) ** -30


def test_tail_bound_shrinks_with_excess() -> None:
    result = sum_convergent_certified((F(1, 3), F(1, 5)), (F(53, 15),), 40)
    assert result.tail_bound < mpmath.mpf(10) ** -6


@pytest.mark.parametrize(
    "tops, bottoms",
    [
        ((F(1, 3), F(1, 5)), (F(31, 30),)),
        ((F(7, 2), F(-5, 3), F(9, 4)), (F(-11, 5), F(17, 2))),
        ((F(1, 2), F(1, 2), F(1, 2)), (F(1), F(3, 2))),
    ],
)
def test_term_ratio_decays_from_tail_start(tops: tuple[F, ...], bottoms: tuple[F, ...]) -> None:
    start = tail_start(tops, bottoms)
    excess = sum(bottoms, F(0)) - sum(tops, F(0))
    with mpmath.workdps(30):
        power = 1 + to_mpf(excess) / 2
        for k in range(start, start + 2000):
            ratio = abs(mpmath.fprod(to_mpf(t) + k for t in tops)) / abs((k + 1) * mpmath.fprod(to_mpf(x) + k for x in bottoms))
            assert ratio <= (mpmath.mpf(k) / (k + 1)) ** power


def test_value_outside_tail_enclosure_is_refused(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(hypseries, "_hyper", lambda tops, bottoms, dps: mpmath.mpf(2))
    with pytest.raises(ConvergenceError):
        sum_convergent_certified((F(1, 3), F(1, 5)), (F(53, 15),), 40)


def test_terminating_sum_is_its_own_certificate() -> None:
    result = sum_convergent_certified((F(-2), F(1, 2), F(1, 3)), (F(5, 7), F(3, 5)), 40)
    assert result.tail_bound == 0
    assert result.terms == 3
    assert result.value == result.partial


def test_bound_spec_carries_its_enclosure() -> None:
    binding = {"a": F(1, 3), "b": F(1, 5), "c": F(53, 15)}
    result = sum_convergent(parse_spec("2F1(a,b;c)"), binding, 40)
    with mpmath.workdps(50):
        assert abs(result.partial - gauss(F(1, 3), F(1, 5), F(53, 15))) <= result.tail_bound
        assert abs(result.value - result.partial) <= result.tail_bound + mpmath.mpf(10) ** -25


def test_terminating_sum_agrees_with_convergent_image() -> None:
    rng = random.Random(200)
    checked = 0
    while checked < 200:
        binding = {
            "n": F(rng.randint(0, 6)),
            "a": generic(rng, 7, 2, 4),
            "b": generic(rng, 11, 2, 4),
            "d": generic(rng, 13, 4, 7),
            "e": generic(rng, 17, 4, 7),
        }
        exact = sum_terminating_exact(TERMINATING, binding)
        for rule in THOMAE_RULES:
            prefactor, image = rule.apply(TERMINATING)
            tops, bottoms = image.evaluate(binding)
            info = classify_values(tops, bottoms)
            # the two-term image led by a or b has a prefactor free of -n
            if info.kind is not SeriesKind.CONVERGENT or info.excess not in (binding["a"], binding["b"]):
                continue
            try:
                factor = eval_expr(prefactor, EvalContext(binding, 50))
                value = sum_convergent_values(tops, bottoms, 40)
            except HypError:
                continue
            with mpmath.workdps(50):
                scale = max(1, abs(to_mpf(exact)))
                assert abs(factor * value - to_mpf(exact)) <= mpmath.mpf(10) ** -30 * scale, binding
            checked += 1
            break
        else:
            pytest.fail(f"no convergent Thomae image at {binding}")


def test_reversal_is_an_involution() -> None:
    rng = random.Random(100)
    for _ in range(100):
        binding = {
            "n": F(rng.randint(0, 8)),
            "a": generic(rng, 7, -3, 3),
            "b": generic(rng, 11, -3, 3),
            "d": generic(rng, 13, -3, 3),
            "e": generic(rng, 17, -3, 3),
        }
        first, image = reverse_terminating(TERMINATING, "n")
        second, back = reverse_terminating(image, "n")
        assert back == TERMINATING
        assert eval_exact(E.mul(first, second), binding) == 1
        assert eval_exact(first, binding) * sum_terminating_exact(image, binding) == sum_terminating_exact(
            TERMINATING, binding
        )


def test_classify_ignores_parameter_order() -> None:
    rng = random.Random(3)
    pool = [F(-2), F(-1), F(0), F(1, 2), F(3), F(-5, 3), F(7, 4)]
    for _ in range(50):
        tops = tuple(rng.choice(pool) for _ in range(3))
        bottoms = tuple(rng.choice(pool) for _ in range(2))
        expected = classify_values(tops, bottoms)
        for top_order in permutations(tops):
            for bottom_order in permutations(bottoms):
                assert classify_values(top_order, bottom_order) == expected
