from __future__ import annotations

import pathlib
import random
import sys
from fractions import Fraction

import mpmath
import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from app.domain.enums import PolePolicy
from app.domain.errors import NonCancellingPoleError, NonIntegerSignError, PoleError, UnboundSymbolError
from app.domain.linform import LinForm
from app.numerics.numeval import EvalContext, eval_exact, eval_expr, gamma_ratio_limit_exact
from app.textio.parser import parse_expr, parse_linform


def close(left: object, right: object, digits: int = 30) -> bool:
    with mpmath.workdps(digits + 10):
        return abs(mpmath.mpf(left) - mpmath.mpf(right)) <= mpmath.mpf(10) ** (-digits) * max(1, abs(mpmath.mpf(right)))


def test_gamma_ratio_is_exact() -> None:
    assert eval_exact(parse_expr("Gamma(7/2)/Gamma(3/2)"), {}) == Fraction(15, 4)
    assert eval_exact(parse_expr("Gamma(a+3)/Gamma(a)"), {"a": Fraction(1, 3)}) == Fraction(1, 3) * Fraction(4, 3) * Fraction(7, 3)


def test_unpaired_gamma_is_not_exact() -> None:
    assert eval_exact(parse_expr("Gamma(1/3)"), {}) is None


def test_finite_sum_and_pochhammer() -> None:
    binding = {"n": Fraction(5)}
    assert eval_exact(parse_expr("sum(k,0,n,binom(n,k))"), binding) == 32
    assert eval_exact(parse_expr("poch(1/2,3)"), {}) == Fraction(15, 8)
    assert eval_exact(parse_expr("sum(k,3,2,k)"), {}) == 0


def test_numeric_constants() -> None:
    with mpmath.workdps(40):
        assert close(eval_expr(parse_expr("Gamma(1/2)^2")), mpmath.pi)
        assert close(eval_expr(parse_expr("psi(1,1/4)-pi^2")), 8 * mpmath.catalan)
        assert close(eval_expr(parse_expr("psi(1)")), -mpmath.euler)


def test_infinite_sum() -> None:
    value = eval_expr(parse_expr("sum(k,1,inf,1/k^2)"))
    with mpmath.workdps(40):
        assert close(value, mpmath.pi**2 / 6, digits=15)


def test_gamma_pole_policy() -> None:
    tree = parse_expr("Gamma(-2)")
    with pytest.raises(PoleError):
        eval_expr(tree)
    assert eval_expr(tree, EvalContext(pole_policy=PolePolicy.SIGNED_INFINITY)) == mpmath.inf


def test_reciprocal_gamma_vanishes_at_pole() -> None:
    assert eval_expr(parse_expr("1/Gamma(-2)")) == 0


def test_near_pole_is_rejected_with_margin() -> None:
    ctx = EvalContext({"x": Fraction(-199, 100)}, pole_margin=Fraction(1, 20))
    with pytest.raises(PoleError):
        eval_expr(parse_expr("Gamma(x)"), ctx)


def test_sign_needs_integer_exponent() -> None:
    with pytest.raises(NonIntegerSignError):
        eval_expr(parse_expr("(-1)^n"), EvalContext({"n": Fraction(1, 2)}))


def test_unbound_symbol() -> None:
    with pytest.raises(UnboundSymbolError):
        eval_expr(parse_expr("Gamma(a)"))


def test_psi_over_gamma_limit_at_pole() -> None:
    # psi(-x)/Gamma(-x) -> (-1)^(k+1) k! as x -> k
    x = LinForm.symbol("x", -1)
    for k in range(5):
        value = gamma_ratio_limit_exact(x, x, {"x": Fraction(k)}, "x", numerator="psi")
        assert value == (-1) ** (k + 1) * [1, 1, 2, 6, 24][k]
    with mpmath.workdps(60):
        eps = mpmath.mpf(10) ** -30
        near = mpmath.psi(0, -(3 + eps)) * mpmath.rgamma(-(3 + eps))
        assert close(near, 6, digits=20)


def test_gamma_ratio_limit_on_two_poles() -> None:
    # Gamma(1-b-n+k)/Gamma(1-n+k) at b=-m with n moving: (-1)^m Gamma(n-k)/Gamma(n-m-k)
    m, n, k = 1, 4, 1
    numer = parse_linform(f"1-b-n+{k}")
    denom = parse_linform(f"1-n+{k}")
    value = gamma_ratio_limit_exact(numer, denom, {"b": Fraction(-m), "n": Fraction(n)}, "n")
    assert value == (-1) ** m * Fraction(2, 1)


def test_gamma_ratio_limit_needs_two_poles() -> None:
    with pytest.raises(NonCancellingPoleError):
        gamma_ratio_limit_exact(parse_linform("x"), parse_linform("x-1"), {"x": Fraction(1, 2)}, "x")


def sample_points(count: int) -> list[Fraction]:
    rng = random.Random(count)
    points: list[Fraction] = []
    while len(points) < count:
        x = Fraction(rng.randint(-33, 44), rng.choice([7, 11]))
        if x.denominator != 1:
            points.append(x)
    return points


def mp(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


@pytest.mark.parametrize("x", sample_points(20))
def test_gamma_reflection(x: Fraction) -> None:
    value = eval_expr(parse_expr("Gamma(x)*Gamma(1-x)"), EvalContext({"x": x}, 40))
    with mpmath.workdps(50):
        assert close(value, mpmath.pi / mpmath.sin(mpmath.pi * mp(x)))


@pytest.mark.parametrize("x", sample_points(20))
def test_digamma_reflection(x: Fraction) -> None:
    value = eval_expr(parse_expr("psi(1-x)-psi(x)"), EvalContext({"x": x}, 40))
    with mpmath.workdps(50):
        assert close(value, mpmath.pi * mpmath.cot(mpmath.pi * mp(x)), digits=28)


@pytest.mark.parametrize("x", sample_points(20))
def test_recurrences(x: Fraction) -> None:
    assert eval_exact(parse_expr("Gamma(x+1)/Gamma(x)"), {"x": x}) == x
    value = eval_expr(parse_expr("psi(x+1)-psi(x)"), EvalContext({"x": x}, 40))
    with mpmath.workdps(50):
        assert close(value, 1 / mp(x), digits=28)


@pytest.mark.parametrize("text", ["Gamma(x)*psi(1,x)", "psi(x)/Gamma(x+1/3)", "Gamma(x)^2*sin(pi*x)"])
def test_more_digits_refine_the_value(text: str) -> None:
    e = parse_expr(text)
    for x in sample_points(5):
        coarse = eval_expr(e, EvalContext({"x": x}, 25))
        fine = eval_expr(e, EvalContext({"x": x}, 60))
        assert close(coarse, fine, digits=22)
